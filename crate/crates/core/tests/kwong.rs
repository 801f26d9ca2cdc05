mod common;

use common::*;
use gpvortex::kwong::{self, gn_ratio, rasterize, verify_identities};
use gpvortex::{GridSpec, RealField};

#[test]
fn radial_profile_is_positive_decreasing_and_flat_at_origin() {
    let rp = radial();
    assert!(rp.dw_of_r[0].abs() < 1e-2 * rp.w0, "w'(r_start) = {}", rp.dw_of_r[0]);
    assert!(rp.w_of_r.iter().all(|&w| w > 0.0));
    assert!(rp.w_of_r.windows(2).all(|p| p[1] < p[0]));
    // r^{1/2} e^r w(r) tends to a constant.
    let tail = |r: f64| r.sqrt() * r.exp() * rp.eval(r).0;
    let (t10, t15, t20) = (tail(10.0), tail(15.0), tail(20.0));
    assert!((t15 / t10 - 1.0).abs() < 0.02, "{t10} {t15}");
    assert!((t20 / t15 - 1.0).abs() < 0.01, "{t15} {t20}");
}

#[test]
fn radial_values_match_oracle() {
    let rp = radial();
    let o = oracle();
    assert!(rel(rp.w0, o.w0) < 1e-10, "w0 {} vs {}", rp.w0, o.w0);
    assert!(rel(rp.a_star, o.a_star) < 1e-9, "a* {} vs {}", rp.a_star, o.a_star);
    assert!(rel(rp.second_moment() / 2.0, o.second_moment_x1) < 1e-9);
    assert!(rel(rp.tail_amplitude, o.tail_amplitude) < 1e-6);
}

#[test]
fn tighter_tolerance_does_not_move_the_profile() {
    let fine = kwong::solve_kwong_radial(1e-13).unwrap();
    let rp = radial();
    assert!((fine.w0 - rp.w0).abs() < 1e-11);
    assert!(rel(fine.a_star, rp.a_star) < 1e-10);
}

#[test]
fn grid_critical_mass_matches_radial() {
    let kp = default_profile();
    assert!(rel(kp.a_star_2d, kp.radial.a_star) < 1e-6);
    assert!(rel(kp.a_star_2d, oracle().a_star) < 1e-6);
    assert!(kp.residual < 1e-8, "residual {}", kp.residual);
}

#[test]
fn grid_profile_matches_frozen_values() {
    let kp = default_profile();
    let g = kp.grid();
    assert!(rel(kp.a_star_2d, frozen(&["a_star_2d"])) < 1e-9);
    assert!(rel(kp.w().values[g.origin_index()], frozen(&["w_origin"])) < 1e-9);
    assert!(rel(gpvortex::coefficients::second_moment_x1(&kp), frozen(&["second_moment_x1"])) < 1e-9);
}

#[test]
fn rasterized_field_is_even_sample_exactly() {
    let kp = rasterize(radial(), GridSpec::square(64, 8.0).unwrap()).unwrap();
    let w = kp.w();
    assert_eq!(w.parity_defect(1.0, 1.0), 0.0);
}

#[test]
fn rasterize_rejects_box_beyond_radial_extent() {
    assert!(rasterize(radial(), GridSpec::square(64, 30.0).unwrap()).is_err());
}

#[test]
fn identities_and_gn_ratio() {
    let kp = default_profile();
    let id = verify_identities(&kp);
    assert!(id.max_relative_defect < 1e-7, "{id:?}");
    assert!((id.gn_ratio - 1.0).abs() < 1e-7);
    let gauss = RealField::from_fn(kp.grid(), |x1, x2| 2.0 * (-(x1 * x1 + x2 * x2) / 2.0).exp());
    assert!(gn_ratio(&gauss, kp.critical_mass()) < 0.99);
}

#[test]
fn laplacian_of_profile_is_w_minus_w_cubed() {
    let kp = default_profile();
    let r = kwong::kwong_residual(kp.w());
    assert!(r.sup_norm() / kp.w().sup_norm() < 1e-8);
}

#[test]
fn critical_mass_converges_under_refinement() {
    let a: Vec<f64> = [32, 64, 128, 256].iter().map(|&n| profile(n, 12.0).a_star_2d).collect();
    let floor = 1e-10 * a[3];
    for k in 0..2 {
        let d0 = (a[k] - a[k + 1]).abs();
        let d1 = (a[k + 1] - a[k + 2]).abs();
        assert!(d1 <= d0 / 4.0 || d1 < floor, "{a:?}");
    }
}
