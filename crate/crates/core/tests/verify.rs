mod common;

use std::f64::consts::PI;

use common::*;
use gpvortex::minimizer::{minimize, FlowConfig, Frame, GPParams};
use gpvortex::spectral::Spectral;
use gpvortex::verify::{decay_envelope_check, decompose_and_compare, fit_gauge, locate_maximum, xa_scaling_check};
use gpvortex::{ComplexField, Error, GridSpec, RealField};
use num_complex::Complex64;

fn near_critical(da: f64, lambda: f64, frac: f64) -> GPParams {
    let kp = default_profile();
    GPParams::new(kp.critical_mass() - da, lambda, frac * 2.0 * lambda.min(1.0))
}

fn l2_dist(u: &ComplexField, w: &RealField) -> f64 {
    let h = w.grid.cell_area();
    (h * u.values.iter().zip(&w.values).map(|(z, x)| (z - x).norm_sqr()).sum::<f64>()).sqrt()
}

fn sup_dist(u: &ComplexField, w: &RealField) -> f64 {
    u.values.iter().zip(&w.values).map(|(z, x)| (z - x).norm()).fold(0.0, f64::max)
}

#[test]
fn identity_gauge_on_w() {
    let kp = default_profile();
    let gf = fit_gauge(&kp.w().to_complex(), &near_critical(1e-2, 0.8, 0.5), Frame::Rescaled, &kp).unwrap();
    assert!(gf.y_a[0].hypot(gf.y_a[1]) < 1e-12, "{:?}", gf.y_a);
    assert_eq!(gf.theta, 0.0);
    assert!(sup_dist(&gf.v, kp.w()) < 1e-14);
}

#[test]
fn pure_phase_is_removed() {
    let kp = default_profile();
    let u = kp.w().to_complex().scale(Complex64::from_polar(1.0, PI / 3.0));
    let gf = fit_gauge(&u, &near_critical(1e-2, 0.8, 0.5), Frame::Rescaled, &kp).unwrap();
    // theta multiplies the input, so e^{i pi/3} w is undone by theta = 5 pi / 3.
    assert!((gf.theta - 5.0 * PI / 3.0).abs() < 1e-12, "{}", gf.theta);
    assert!(sup_dist(&gf.v, kp.w()) < 1e-13);
}

#[test]
fn translated_field_is_recentered_in_rescaled_frame() {
    let kp = default_profile();
    let p = near_critical(1e-2, 0.8, 0.5);
    let g = kp.grid();
    let eps = fit_gauge(&kp.w().to_complex(), &p, Frame::Rescaled, &kp).unwrap().eps;
    let ya = [0.37, -0.21];
    let xa = [eps * ya[0], eps * ya[1]];
    let k = 0.5 * eps * p.omega;
    let shifted = Spectral::for_grid(&g).translate_c(&kp.w().to_complex().values, [-ya[0], -ya[1]]);
    let values = g
        .points()
        .zip(shifted)
        .map(|((_, y1, y2), z)| {
            z * Complex64::from_polar(1.0, k * (-(y1 - ya[0]) * xa[1] + (y2 - ya[1]) * xa[0]) + 0.4)
        })
        .collect();
    let gf = fit_gauge(&ComplexField { grid: g, values }, &p, Frame::Rescaled, &kp).unwrap();
    assert!((gf.y_a[0] - ya[0]).abs() < 1e-9 && (gf.y_a[1] - ya[1]).abs() < 1e-9, "{:?}", gf.y_a);
    // w is only 1e-7 at the box edge, which bounds the periodic translation.
    assert!(sup_dist(&gf.v, kp.w()) < 1e-7, "{}", sup_dist(&gf.v, kp.w()));
}

#[test]
fn translated_field_is_recentered_in_physical_frame() {
    let kp = default_profile();
    let p = near_critical(1e-1, 0.8, 0.5);
    let eps = fit_gauge(&kp.w().to_complex(), &p, Frame::Rescaled, &kp).unwrap().eps;
    let amp = 1.0 / (eps * kp.critical_mass().sqrt());
    let xa = [0.013, 0.021];
    let k = 0.5 * eps * p.omega;
    let g = GridSpec::square(256, 6.0).unwrap();
    let u = ComplexField::from_fn(g, |x1, x2| {
        let (y1, y2) = ((x1 - xa[0]) / eps, (x2 - xa[1]) / eps);
        let w = radial().eval(y1.hypot(y2)).0;
        Complex64::from_polar(amp * w, k * (-y1 * xa[1] + y2 * xa[0]) - 1.0)
    });
    let gf = fit_gauge(&u, &p, Frame::Physical, &kp).unwrap();
    assert!((gf.x_a[0] - xa[0]).abs() < 1e-8 && (gf.x_a[1] - xa[1]).abs() < 1e-8, "{:?}", gf.x_a);
    assert!(sup_dist(&gf.v, kp.w()) < 1e-6, "{}", sup_dist(&gf.v, kp.w()));
}

#[test]
fn twin_peaks_are_rejected() {
    let kp = default_profile();
    let g = kp.grid();
    let f =
        RealField::from_fn(g, |y1, y2| radial().eval((y1 - 3.0).hypot(y2)).0 + radial().eval((y1 + 3.0).hypot(y2)).0);
    match locate_maximum(&f) {
        Err(Error::DegenerateMaximum(a1, a2, b1, b2)) => {
            assert!((a1.abs() - 3.0).abs() < 0.2 && (b1.abs() - 3.0).abs() < 0.2 && a1 * b1 < 0.0);
            assert!(a2.abs() < 0.2 && b2.abs() < 0.2);
        }
        other => panic!("expected a degenerate maximum, got {other:?}"),
    }
    let err = fit_gauge(&f.to_complex(), &near_critical(1e-2, 0.8, 0.5), Frame::Rescaled, &kp).unwrap_err();
    assert!(err.to_string().contains("3"), "{err}");
}

#[test]
fn fitted_phase_is_a_local_minimum() {
    let kp = default_profile();
    let p = near_critical(1e-2, 0.8, 0.5);
    let r = minimize(&p, kp.grid(), &FlowConfig::default(), &kp).unwrap();
    let gf = fit_gauge(&r.field, &p, Frame::Rescaled, &kp).unwrap();
    let d0 = l2_dist(&gf.v, kp.w());
    for s in [1e-3, -1e-3] {
        let d = l2_dist(&gf.v.scale(Complex64::from_polar(1.0, s)), kp.w());
        assert!(d > d0, "{s}: {d} <= {d0}");
    }
    assert!(gf.orthogonality < 1e-9);
}

#[test]
fn maximum_tracks_a_shifted_trap() {
    let kp = default_profile();
    let base = near_critical(1e-2, 0.8, 0.0);
    let s = [0.02, -0.015];
    let shifted = GPParams { trap_shift: s, ..base };
    let cfg = FlowConfig::default();
    let r0 = minimize(&base, kp.grid(), &cfg, &kp).unwrap();
    let r1 = minimize(&shifted, kp.grid(), &cfg, &kp).unwrap();
    let g0 = fit_gauge(&r0.field, &base, Frame::Rescaled, &kp).unwrap();
    let g1 = fit_gauge(&r1.field, &shifted, Frame::Rescaled, &kp).unwrap();
    assert!(g0.x_a[0].hypot(g0.x_a[1]) < 1e-10, "{:?}", g0.x_a);
    assert!((g1.x_a[0] - s[0]).abs() < 1e-8 && (g1.x_a[1] - s[1]).abs() < 1e-8, "{:?}", g1.x_a);
    assert!((r0.report.energy - r1.report.energy).abs() < 1e-9);
    let d = g0.v.values.iter().zip(&g1.v.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(d < 1e-7, "{d}");
}

#[test]
fn rotation_pulls_a_shifted_maximum_outward() {
    // Rotation about the origin adds -Omega^2 |x|^2 / 4 to the effective
    // trap, so the maximum overshoots the trap center.
    let kp = default_profile();
    let s = [0.02, -0.015];
    let p = GPParams { trap_shift: s, ..near_critical(1e-2, 0.8, 0.5) };
    let r = minimize(&p, kp.grid(), &FlowConfig::default(), &kp).unwrap();
    let gf = fit_gauge(&r.field, &p, Frame::Rescaled, &kp).unwrap();
    for (x, shift) in gf.x_a.iter().zip(s) {
        let ratio = x / shift;
        assert!(ratio > 1.0 && ratio < 1.5, "{:?}", gf.x_a);
    }
}

#[test]
fn decay_ratio_vanishes_for_w() {
    let kp = default_profile();
    let gf = fit_gauge(&kp.w().to_complex(), &near_critical(1e-2, 0.8, 0.5), Frame::Rescaled, &kp).unwrap();
    let d = decay_envelope_check(&gf, kp.w(), 5.6);
    assert_eq!(d.c1, 0.0);
    assert!(d.bounded);
    assert!((d.outer_radius - 0.8 * 16.0).abs() < 1e-12);
}

#[test]
fn xa_scaling_needs_three_points() {
    let kp = default_profile();
    let psis = psi_set(0.8);
    let gf = fit_gauge(&kp.w().to_complex(), &near_critical(1e-2, 0.8, 0.5), Frame::Rescaled, &kp).unwrap();
    let rep = decompose_and_compare(&gf, &psis, -1.0 / (gf.eps * gf.eps)).unwrap();
    assert!(rep.beta.abs() < 1e-12);
    assert!(rep.vortices.is_empty());
    assert!(xa_scaling_check(&[rep.clone(), rep.clone()], 1e-3).is_err());
    let x = xa_scaling_check(&[rep.clone(), rep.clone(), rep], 1e-3).unwrap();
    assert!(x.pass && x.max_cells == 0.0);
}

#[test]
fn mismatched_anisotropy_is_rejected() {
    let kp = default_profile();
    let gf = fit_gauge(&kp.w().to_complex(), &near_critical(1e-2, 0.5, 0.5), Frame::Rescaled, &kp).unwrap();
    assert!(decompose_and_compare(&gf, &psi_set(0.8), -1.0).is_err());
}
