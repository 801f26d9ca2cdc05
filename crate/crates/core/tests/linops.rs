mod common;

use common::*;
use gpvortex::linops::{psi2_closed_form, Gauge, Linearization, Operator};
use gpvortex::quadrature::inner;
use gpvortex::spectral;
use gpvortex::{Error, RealField};
use proptest::prelude::*;

#[test]
fn kernels_are_annihilated() {
    let kp = default_profile();
    let lin = Linearization::new(kp.w());
    let lw = lin.apply(Operator::L, kp.w()).unwrap();
    assert!(lw.sup_norm() / kp.w().sup_norm() < 1e-8);
    let (d1, d2) = spectral::gradient(kp.w());
    for d in [&d1, &d2] {
        let r = lin.apply(Operator::LTilde, d).unwrap();
        assert!(r.sup_norm() / d.sup_norm() < 1e-7, "{}", r.sup_norm());
    }
}

#[test]
fn closed_form_second_corrector() {
    let kp = default_profile();
    let lin = Linearization::new(kp.w());
    let psi2 = psi2_closed_form(kp.w());
    let diff = lin.apply(Operator::LTilde, &psi2).unwrap().sub(kp.w()).unwrap();
    // x . grad w is not periodic-smooth across the box edge, so the identity
    // only holds to truncation level there.
    let g = kp.grid();
    let inner_sup = g
        .points()
        .filter(|(_, a, b)| a.hypot(*b) <= 0.8 * g.inscribed_radius())
        .map(|(k, _, _)| diff.values[k].abs())
        .fold(0.0, f64::max);
    assert!(inner_sup / kp.w().sup_norm() < 1e-7, "{inner_sup}");
    assert!(diff.sup_norm() / kp.w().sup_norm() < 1e-4);
    let solved = lin.solve_deflated(Operator::LTilde, kp.w(), Gauge::GradZeroAtOrigin).unwrap();
    let d = solved.solution.sub(&psi2).unwrap();
    let inner_d = g
        .points()
        .filter(|(_, a, b)| a.hypot(*b) <= 0.8 * g.inscribed_radius())
        .map(|(k, _, _)| d.values[k].abs())
        .fold(0.0, f64::max);
    assert!(inner_d < 1e-7, "{inner_d} (full grid {})", d.sup_norm());
}

#[test]
fn zero_rhs_gives_zero() {
    let kp = profile(64, 8.0);
    let lin = Linearization::new(kp.w());
    let zero = RealField::zeros(kp.grid());
    for (op, g) in [(Operator::L, Gauge::L2OrthogonalToW), (Operator::LTilde, Gauge::GradZeroAtOrigin)] {
        let s = lin.solve_deflated(op, &zero, g).unwrap();
        assert_eq!(s.solution.sup_norm(), 0.0);
    }
}

#[test]
fn kernel_rhs_is_a_cokernel_violation() {
    let kp = profile(64, 8.0);
    let lin = Linearization::new(kp.w());
    let (d1, _) = spectral::gradient(kp.w());
    let err = lin.solve_deflated(Operator::LTilde, &d1, Gauge::GradZeroAtOrigin).unwrap_err();
    assert!(matches!(err, Error::CokernelViolation { .. }));
    let err = lin.solve_deflated(Operator::L, kp.w(), Gauge::L2OrthogonalToW).unwrap_err();
    assert!(matches!(err, Error::CokernelViolation { .. }));
}

#[test]
fn corrector_set_diagnostics_and_gauges() {
    let ps = psi_set(0.8);
    for (name, d) in &ps.diagnostics {
        assert!(d.residual < 1e-9, "{name}: residual {}", d.residual);
        assert!(d.solvability_defect < 1e-9, "{name}: defect {}", d.solvability_defect);
    }
    let o = ps.w.grid.origin_index();
    for (name, f) in [
        ("psi1", &ps.psi1),
        ("psi_aniso", &ps.psi_aniso),
        ("psi3_static", &ps.psi3_static),
        ("psi3_rot", &ps.psi3_rot),
        ("psi4", &ps.psi4),
        ("psi5", &ps.psi5),
    ] {
        let (g1, g2) = spectral::gradient(f);
        assert!(g1.values[o].abs().max(g2.values[o].abs()) < 1e-9, "{name}");
    }
    let orth = inner(&ps.psi_i, &ps.w).abs() / (inner(&ps.psi_i, &ps.psi_i) * inner(&ps.w, &ps.w)).sqrt();
    assert!(orth < 1e-9);
}

#[test]
fn corrector_parities() {
    let ps = psi_set(0.8);
    for (name, f) in [
        ("psi1", &ps.psi1),
        ("psi2", &ps.psi2),
        ("psi_aniso", &ps.psi_aniso),
        ("psi3_static", &ps.psi3_static),
        ("psi3_rot", &ps.psi3_rot),
        ("psi4", &ps.psi4),
        ("psi5", &ps.psi5),
    ] {
        assert!(f.parity_defect(1.0, 1.0) < 1e-9 * f.sup_norm().max(1.0), "{name}");
    }
    assert!(ps.psi_i.parity_defect(-1.0, -1.0) < 1e-9 * ps.psi_i.sup_norm());
}

#[test]
fn correctors_decay_exponentially() {
    let ps = psi_set(0.8);
    let g = ps.w.grid;
    let shell = |f: &RealField, r: f64| {
        g.points()
            .filter(|(_, a, b)| (a.hypot(*b) - r).abs() <= 0.5)
            .map(|(k, _, _)| f.values[k].abs())
            .fold(0.0, f64::max)
    };
    for (name, f) in ps.named_fields() {
        if f.sup_norm() == 0.0 {
            continue;
        }
        let rate = (shell(f, 6.0) / shell(f, 12.0)).ln() / 6.0;
        assert!(rate > 0.3, "{name}: effective rate {rate}");
    }
}

#[test]
fn isotropic_trap_has_no_anisotropic_part() {
    let ps = psi_set(1.0);
    assert_eq!(ps.psi_aniso.sup_norm(), 0.0);
    assert_eq!(ps.psi_i.sup_norm(), 0.0);
    assert_eq!(ps.psi3_rot.sup_norm(), 0.0);
}

#[test]
fn corrector_norms_match_frozen_values() {
    for lam in ["0.5", "0.8", "1"] {
        let ps = psi_set(lam.parse().unwrap());
        for (name, f) in ps.named_fields() {
            let want = frozen(&["Lambda", lam, "l2_norms", name]);
            let got = inner(f, f).sqrt();
            assert!((got - want).abs() <= 1e-8 * want.max(1e-300), "Lambda {lam} {name}: {got} vs {want}");
        }
    }
}

#[test]
fn first_corrector_is_resolved() {
    // Halving the spacing changes psi1 at shared nodes by far less than its size.
    let coarse = psi_set(0.8);
    let kp = profile(512, 16.0);
    let fine = gpvortex::linops::build_psi_set(0.8, &kp).unwrap();
    let gc = coarse.w.grid;
    let gf = fine.w.grid;
    let mut worst: f64 = 0.0;
    for j in 0..gc.ny {
        for i in 0..gc.nx {
            worst = worst.max((coarse.psi1.at(i, j) - fine.psi1.at(2 * i, 2 * j)).abs());
        }
    }
    assert_eq!(gf.x1(2 * 7), gc.x1(7));
    assert!(worst < 1e-8 * coarse.psi1.sup_norm(), "{worst}");
}

fn bump(g: gpvortex::GridSpec, c: &[(f64, f64, f64, f64)]) -> RealField {
    RealField::from_fn(g, |x1, x2| {
        c.iter().map(|&(a, s, t, w)| a * (-w * ((x1 - s).powi(2) + (x2 - t).powi(2))).exp()).sum()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn operators_are_self_adjoint(
        c1 in proptest::collection::vec((-1.0..1.0f64, -2.0..2.0f64, -2.0..2.0f64, 0.5..2.0f64), 1..4),
        c2 in proptest::collection::vec((-1.0..1.0f64, -2.0..2.0f64, -2.0..2.0f64, 0.5..2.0f64), 1..4),
    ) {
        let kp = profile(64, 8.0);
        let lin = Linearization::new(kp.w());
        let f = bump(kp.grid(), &c1);
        let g = bump(kp.grid(), &c2);
        for op in [Operator::L, Operator::LTilde] {
            let a = inner(&f, &lin.apply(op, &g).unwrap());
            let b = inner(&g, &lin.apply(op, &f).unwrap());
            let scale = (inner(&f, &f) * inner(&g, &g)).sqrt();
            prop_assert!((a - b).abs() <= 1e-10 * scale.max(a.abs()), "{a} {b}");
        }
    }
}
