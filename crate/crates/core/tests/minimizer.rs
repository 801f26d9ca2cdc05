mod common;

use std::f64::consts::PI;

use common::*;
use gpvortex::minimizer::{
    collapse_probe, energy, initial_state, minimize, minimize_from, FlowConfig, Frame, Functional, GPParams, Init,
};
use gpvortex::{ComplexField, Error, GridSpec};
use num_complex::Complex64;
use proptest::prelude::*;

fn physical(n: usize, l: f64) -> GridSpec {
    GridSpec::square(n, l).unwrap()
}

fn gaussian(g: GridSpec, lambda: f64) -> ComplexField {
    let c = (lambda.sqrt() / PI).sqrt();
    ComplexField::from_fn(g, |x1, x2| Complex64::new(c * (-(x1 * x1 + lambda * x2 * x2) / 2.0).exp(), 0.0))
}

#[test]
fn oscillator_ground_state_energies() {
    let kp = default_profile();
    let g = physical(64, 8.0);
    assert!((energy(&gaussian(g, 1.0), &GPParams::new(0.0, 1.0, 0.0), &kp).unwrap() - 2.0).abs() < 1e-10);
    assert!((energy(&gaussian(g, 0.5), &GPParams::new(0.0, 0.5, 0.0), &kp).unwrap() - 1.5).abs() < 1e-10);
}

#[test]
fn real_states_carry_no_angular_momentum() {
    let kp = default_profile();
    let g = physical(64, 8.0);
    let p = GPParams::new(3.0, 0.8, 1.2);
    let f = Functional::new(&p, g, Frame::Physical, &kp).unwrap();
    let u =
        ComplexField::from_fn(g, |x1, x2| Complex64::new((1.0 + 0.3 * x1) * (-(x1 * x1 + 2.0 * x2 * x2)).exp(), 0.0));
    assert!(f.energy_parts(&u.values).angular_momentum.abs() < 1e-14);
}

#[test]
fn energy_requires_unit_mass() {
    let kp = default_profile();
    let g = physical(64, 8.0);
    let u = gaussian(g, 1.0);
    let doubled = ComplexField { grid: g, values: u.values.iter().map(|z| z * 2.0).collect() };
    let err = energy(&doubled, &GPParams::new(0.0, 1.0, 0.0), &kp).unwrap_err();
    assert!(matches!(err, Error::MassViolation { .. }));
}

#[test]
fn linear_problem_minimizers() {
    let kp = default_profile();
    let cfg = FlowConfig { frame: Frame::Physical, init: Init::Gaussian, tol_residual: 1e-10, ..FlowConfig::default() };
    for lam in [1.0, 0.5] {
        let r = minimize(&GPParams::new(0.0, lam, 0.0), physical(64, 8.0), &cfg, &kp).unwrap();
        assert!((r.report.energy - (1.0 + lam)).abs() < 1e-8, "{:?}", r.report);
        assert!((r.report.mu - r.report.energy).abs() < 1e-8, "{:?}", r.report);
    }
}

#[test]
fn multiplier_matches_energy_identity() {
    let kp = default_profile();
    let p = GPParams::new(6.0, 0.8, 0.6);
    let g = physical(96, 6.0);
    let cfg = FlowConfig { frame: Frame::Physical, init: Init::Gaussian, ..FlowConfig::default() };
    let r = minimize(&p, g, &cfg, &kp).unwrap();
    let f = Functional::new(&p, g, Frame::Physical, &kp).unwrap();
    let parts = f.energy_parts(&r.field.values);
    assert!((r.report.mu - (parts.total - 0.5 * p.a * parts.quartic)).abs() < 1e-8);
    assert!(r.report.mass_defect < 1e-12);
    assert!(r.report.energy >= r.report.diamagnetic_bound - 1e-10);
}

#[test]
fn validation_messages() {
    let kp = default_profile();
    let g = physical(64, 8.0);
    let cfg = FlowConfig::default();
    let above = GPParams::new(kp.critical_mass() + 0.3, 0.8, 0.5);
    let msg = minimize(&above, g, &cfg, &kp).unwrap_err().to_string();
    assert!(msg.contains("nonexistence regime"), "{msg}");
    let fast = GPParams::new(1.0, 0.8, 1.6);
    assert!(minimize(&fast, g, &cfg, &kp).unwrap_err().to_string().contains("Omega*"));
    assert!(GridSpec::square(63, 8.0).is_err());
    let bad = FlowConfig { dt: 0.0, ..FlowConfig::default() };
    assert!(minimize(&GPParams::new(1.0, 0.8, 0.5), g, &bad, &kp).is_err());
}

#[test]
fn rescaled_multiplier_is_near_minus_one() {
    let kp = profile(128, 12.0);
    let p = GPParams::new(kp.critical_mass() - 1e-2, 0.8, 0.8);
    let r = minimize(&p, kp.grid(), &FlowConfig::default(), &kp).unwrap();
    let eps = r.report.eps.unwrap();
    let beta = 1.0 + r.report.mu * eps * eps;
    assert!(beta.abs() < 10.0 * eps.powi(4), "beta {beta} eps {eps}");
}

#[test]
fn sweep_matches_frozen_values() {
    let kp = default_profile();
    let sweep = constants()["sweep_lambda_0_8_omega_0_5"].as_array().unwrap();
    for point in sweep.iter().take(2) {
        let da = point["a_star_minus_a"].as_f64().unwrap();
        let p = GPParams::new(kp.critical_mass() - da, 0.8, 0.8);
        let r = minimize(&p, kp.grid(), &FlowConfig::default(), &kp).unwrap();
        assert!(rel(r.report.energy, point["energy"].as_f64().unwrap()) < 1e-8);
        assert!(rel(r.report.mu, point["mu"].as_f64().unwrap()) < 1e-8);
    }
}

#[test]
fn frames_agree() {
    let kp = profile(128, 12.0);
    let p = GPParams::new(kp.critical_mass() - 5e-2, 0.8, 0.8);
    let resc = minimize(&p, kp.grid(), &FlowConfig::default(), &kp).unwrap();
    let cfg = FlowConfig { frame: Frame::Physical, ..FlowConfig::default() };
    let phys = minimize(&p, physical(256, 3.0), &cfg, &kp).unwrap();
    assert!(rel(phys.report.energy, resc.report.energy) < 1e-7, "{} vs {}", phys.report.energy, resc.report.energy);
}

#[test]
fn constant_phase_is_a_symmetry() {
    let kp = profile(128, 12.0);
    let p = GPParams::new(kp.critical_mass() - 1e-2, 0.8, 0.8);
    let cfg = FlowConfig::default();
    let f = Functional::new(&p, kp.grid(), Frame::Rescaled, &kp).unwrap();
    let u0 = initial_state(&f, &Init::KwongSeeded, &kp).unwrap();
    let rot = Complex64::from_polar(1.0, 1.1);
    let u1: Vec<Complex64> = u0.iter().map(|z| z * rot).collect();
    let a = minimize_from(&f, u0, &cfg).unwrap();
    let b = minimize_from(&f, u1, &cfg).unwrap();
    let diff = a.field.values.iter().zip(&b.field.values).map(|(x, y)| (x.norm() - y.norm()).abs()).fold(0.0, f64::max);
    assert!(diff < 1e-10, "{diff}");
    assert!((a.report.energy - b.report.energy).abs() < 1e-10 * a.report.energy.abs());
}

#[test]
fn flow_energy_is_monotone() {
    let kp = default_profile();
    let p = GPParams::new(4.0, 0.8, 0.8);
    let f = Functional::new(&p, physical(64, 6.0), Frame::Physical, &kp).unwrap();
    let mut u = initial_state(&f, &Init::Gaussian, &kp).unwrap();
    let mut e = f.energy(&u);
    let bound = -p.a * 1e3;
    for step in 0..400 {
        u = f.flow_step(&u, 1e-3);
        let next = f.energy(&u);
        if step > 5 {
            assert!(next <= e + 1e-12, "step {step}: {next} > {e}");
        }
        assert!(next > bound);
        e = next;
    }
}

#[test]
fn collapse_signature_above_critical_mass() {
    let kp = default_profile();
    let g = physical(128, 6.0);
    let cfg = FlowConfig { max_steps: 200_000, ..FlowConfig::default() };
    let over = collapse_probe(&GPParams::new(kp.critical_mass() + 0.1, 0.8, 0.8), g, &cfg, &kp).unwrap();
    assert!(over.nonexistence_signature, "{over:?}");
    let short = FlowConfig { max_steps: 3000, ..FlowConfig::default() };
    let at = collapse_probe(&GPParams::new(kp.critical_mass(), 0.8, 0.8), g, &short, &kp).unwrap();
    assert!(!at.residual_converged, "{at:?}");
    let below = collapse_probe(&GPParams::new(kp.critical_mass() - 0.5, 0.8, 0.8), g, &cfg, &kp).unwrap();
    assert!(below.residual_converged && !below.nonexistence_signature, "{below:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]
    #[test]
    fn gradient_matches_finite_differences(seed in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.5..1.5f64, -1.5..1.5f64), 3)) {
        let kp = default_profile();
        let g = physical(64, 6.0);
        let p = GPParams::new(5.0, 0.7, 0.9);
        let f = Functional::new(&p, g, Frame::Physical, &kp).unwrap();
        let u = initial_state(&f, &Init::Gaussian, &kp).unwrap();
        let u: Vec<Complex64> = u.iter().zip(g.points()).map(|(z, (_, x1, _))| z * Complex64::from_polar(1.0, 0.4 * x1)).collect();
        let d: Vec<Complex64> = g.points().map(|(_, x1, x2)| {
            seed.iter().map(|&(a, b, s, t)| Complex64::new(a, b) * (-((x1 - s).powi(2) + (x2 - t).powi(2))).exp()).sum()
        }).collect();
        let h = 1e-5;
        let shifted = |t: f64| -> Vec<Complex64> { u.iter().zip(&d).map(|(a, b)| a + t * b).collect() };
        let fd = (f.energy(&shifted(h)) - f.energy(&shifted(-h))) / (2.0 * h);
        let grad = f.gradient(&u);
        let w = g.cell_area();
        let exact = 2.0 * w * grad.iter().zip(&d).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
        prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1e-3), "{fd} vs {exact}");
    }
}
