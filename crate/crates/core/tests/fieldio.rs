use gpvortex::fieldio::{self, AnyField};
use gpvortex::{ComplexField, GridSpec, RealField};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid_strategy() -> impl Strategy<Value = GridSpec> {
    (8usize..14, 8usize..14, 0.5..20.0f64, 0.5..20.0f64)
        .prop_map(|(a, b, lx, ly)| GridSpec::new(2 * a, 2 * b, lx, ly).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn real_round_trip_is_bitwise(g in grid_strategy(), seed in any::<u64>()) {
        let f = RealField::from_index_fn(g, |i, j| f64::from_bits(seed.rotate_left((i * 7 + j) as u32) & 0x7fef_ffff_ffff_ffff) * if (i + j) % 2 == 0 { 1.0 } else { -1.0 });
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.gpf");
        fieldio::write_real(&f, &p).unwrap();
        let back = fieldio::read_real(&p).unwrap();
        prop_assert_eq!(back.grid, f.grid);
        prop_assert!(back.values.iter().zip(&f.values).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn complex_round_trip_is_bitwise(g in grid_strategy(), re in -1e300..1e300f64, im in -1e-300..1e-300f64) {
        let u = ComplexField::from_fn(g, |x1, x2| Complex64::new(re * x1, im * x2 + x1));
        let bytes = fieldio::encode_complex(&u).unwrap();
        match fieldio::decode(&bytes).unwrap() {
            AnyField::Complex(back) => prop_assert_eq!(back, u),
            AnyField::Real(_) => prop_assert!(false, "kind changed"),
        }
    }
}

#[test]
fn non_finite_samples_are_refused() {
    let g = GridSpec::square(16, 1.0).unwrap();
    let mut f = RealField::zeros(g);
    f.values[5] = f64::NAN;
    assert!(fieldio::encode_real(&f).is_err());
}
