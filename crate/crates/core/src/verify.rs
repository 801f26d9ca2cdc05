//! Gauge fitting of minimizers and comparison with the near-critical
//! expansion `v = w + eps^4 psi1 + beta psi2 + ... + i eps^6 Omega psiI + ...`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coefficients;
use crate::error::{Error, Result};
use crate::field::{ensure_same_grid, ComplexField, RealField};
use crate::grid::GridSpec;
use crate::kwong::KwongProfile;
use crate::linops::PsiSet;
use crate::minimizer::{Frame, GPParams};
use crate::quadrature::{inner, pairwise_sum_by};
use crate::spectral::{self, Spectral, SpectralInterpolant};
use crate::vortex::{vortex_scan, Vortex};

type C = Complex64;

#[derive(Debug, Clone)]
pub struct GaugeFit {
    pub params: GPParams,
    pub frame: Frame,
    pub eps: f64,
    /// Maximum point of `|u|` in physical units.
    pub x_a: [f64; 2],
    /// The same point in rescaled units, `x_a / eps`.
    pub y_a: [f64; 2],
    /// Maximum point from the 3x3 quadratic fit alone, in input-frame units.
    pub x_a_stencil: [f64; 2],
    pub theta: f64,
    /// Rescaled, recentered and rephased field on the grid of `w`.
    pub v: ComplexField,
    /// `|int w Im v| / (||w|| ||v||)`.
    pub orthogonality: f64,
    /// `int w Re v`.
    pub overlap: f64,
}

/// Quadratic least-squares fit of `f` on the 3x3 stencil centered at
/// `(i, j)`; returns the stationary point offset in index units.
fn stencil_peak(f: &RealField, i: usize, j: usize) -> Option<[f64; 2]> {
    let g = f.grid;
    let at = |di: i64, dj: i64| {
        let a = ((i as i64 + di).rem_euclid(g.nx as i64)) as usize;
        let b = ((j as i64 + dj).rem_euclid(g.ny as i64)) as usize;
        f.at(a, b)
    };
    let (mut bx, mut by, mut bxy) = (0.0, 0.0, 0.0);
    let mut sx = [0.0; 3];
    let mut sy = [0.0; 3];
    for dj in -1..=1i64 {
        for di in -1..=1i64 {
            let v = at(di, dj);
            bx += di as f64 * v / 6.0;
            by += dj as f64 * v / 6.0;
            bxy += (di * dj) as f64 * v / 4.0;
            sx[(di + 1) as usize] += v;
            sy[(dj + 1) as usize] += v;
        }
    }
    let axx = (sx[0] + sx[2] - 2.0 * sx[1]) / 6.0;
    let ayy = (sy[0] + sy[2] - 2.0 * sy[1]) / 6.0;
    let (h11, h12, h22) = (2.0 * axx, bxy, 2.0 * ayy);
    let det = h11 * h22 - h12 * h12;
    if !(det > 0.0 && h11 < 0.0) {
        return None;
    }
    Some([-(h22 * bx - h12 * by) / det, -(-h12 * bx + h11 * by) / det])
}

/// Location of the global maximum of `f` (assumed smooth): grid argmax, 3x3
/// quadratic fit, then Newton on the spectral interpolant. Returns
/// `(refined, stencil)`.
pub fn locate_maximum(f: &RealField) -> Result<([f64; 2], [f64; 2])> {
    let g = f.grid;
    let (k0, &m0) = f
        .values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::InvalidGrid("empty field".into()))?;
    let (i0, j0) = (k0 % g.nx, k0 / g.nx);
    // A competing local maximum outside the stencil with (numerically) the
    // same height makes the location ambiguous.
    for j in 0..g.ny {
        for i in 0..g.nx {
            let di = (i as i64 - i0 as i64).rem_euclid(g.nx as i64).min((i0 as i64 - i as i64).rem_euclid(g.nx as i64));
            let dj = (j as i64 - j0 as i64).rem_euclid(g.ny as i64).min((j0 as i64 - j as i64).rem_euclid(g.ny as i64));
            if di <= 1 && dj <= 1 {
                continue;
            }
            let v = f.at(i, j);
            if v >= m0 * (1.0 - 1e-10) {
                let neighbors = [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)];
                let is_local = neighbors.iter().all(|&(a, b)| {
                    let ii = (i as i64 + a).rem_euclid(g.nx as i64) as usize;
                    let jj = (j as i64 + b).rem_euclid(g.ny as i64) as usize;
                    f.at(ii, jj) <= v
                });
                if is_local {
                    return Err(Error::DegenerateMaximum(g.x1(i0), g.x2(j0), g.x1(i), g.x2(j)));
                }
            }
        }
    }
    let off = stencil_peak(f, i0, j0).unwrap_or([0.0, 0.0]);
    let stencil = [g.x1(i0) + off[0] * g.hx(), g.x2(j0) + off[1] * g.hy()];
    let interp = SpectralInterpolant::new(f);
    let mut x = stencil;
    for _ in 0..30 {
        let (_, grad, h) = interp.eval(x[0], x[1]);
        let det = h[0] * h[2] - h[1] * h[1];
        if !(det > 0.0 && h[0] < 0.0) {
            return Ok((stencil, stencil));
        }
        let s = [(h[2] * grad[0] - h[1] * grad[1]) / det, (-h[1] * grad[0] + h[0] * grad[1]) / det];
        x = [x[0] - s[0], x[1] - s[1]];
        if s[0].hypot(s[1]) < 1e-15 * g.lx.max(g.ly) {
            break;
        }
    }
    if (x[0] - stencil[0]).abs() > g.hx() || (x[1] - stencil[1]).abs() > g.hy() {
        return Ok((stencil, stencil));
    }
    Ok((x, stencil))
}

fn wrap_angle(t: f64) -> f64 {
    let r = t.rem_euclid(2.0 * PI);
    // rem_euclid of a tiny negative angle lands just below 2 pi.
    if 2.0 * PI - r < 1e-13 {
        0.0
    } else {
        r
    }
}

/// Recenters at the maximum of `|u|`, rescales to the grid of `w`, removes
/// the momentum gauge factor `exp(-i eps Omega x . x_a_perp / 2)` and fixes
/// the phase by `theta = -arg(int w v~)`.
pub fn fit_gauge(field: &ComplexField, p: &GPParams, frame: Frame, kp: &KwongProfile) -> Result<GaugeFit> {
    let w = kp.w();
    let wg = w.grid;
    let a_star = kp.critical_mass();
    let l0 = coefficients::lambda0(p.lambda, kp);
    let eps = p.eps(a_star, l0);
    let (mut peak, stencil) = locate_maximum(&field.norm_sqr())?;
    // Offsets below 1e-12 cells are roundoff; translating by them only adds noise.
    let cell = field.grid.hx().min(field.grid.hy());
    for c in &mut peak {
        if c.abs() < 1e-12 * cell {
            *c = 0.0;
        }
    }
    let (x_a, y_a, mut vt) = match frame {
        Frame::Rescaled => {
            ensure_same_grid(&wg, &field.grid)?;
            let shifted = if peak == [0.0, 0.0] {
                field.values.clone()
            } else {
                Spectral::for_grid(&wg).translate_c(&field.values, peak)
            };
            ([eps * peak[0], eps * peak[1]], peak, shifted)
        }
        Frame::Physical => {
            let amp = eps * a_star.sqrt();
            let r = spectral::resample_affine_c(field, wg, eps, peak);
            (peak, [peak[0] / eps, peak[1] / eps], r.values.iter().map(|z| z * amp).collect())
        }
    };
    let k = 0.5 * eps * p.omega;
    for (n, (_, y1, y2)) in wg.points().enumerate() {
        // y . x_a_perp with x_perp = (-x2, x1).
        let dotp = -y1 * x_a[1] + y2 * x_a[0];
        vt[n] *= C::from_polar(1.0, -k * dotp);
    }
    let h = wg.cell_area();
    let overlap_c = h * C::new(
        pairwise_sum_by(vt.len(), &|n| w.values[n] * vt[n].re),
        pairwise_sum_by(vt.len(), &|n| w.values[n] * vt[n].im),
    );
    let theta = wrap_angle(-overlap_c.arg());
    let rot = C::from_polar(1.0, theta);
    let v = ComplexField { grid: wg, values: vt.iter().map(|z| z * rot).collect() };
    let im = v.im();
    let re = v.re();
    let vnorm = (h * pairwise_sum_by(v.values.len(), &|n| v.values[n].norm_sqr())).sqrt();
    let orthogonality = inner(w, &im).abs() / (inner(w, w).sqrt() * vnorm);
    Ok(GaugeFit {
        params: *p,
        frame,
        eps,
        x_a,
        y_a,
        x_a_stencil: stencil,
        theta,
        orthogonality,
        overlap: inner(w, &re),
        v,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayEnvelope {
    /// `sup |v - w| / (eps^4 |x|^(5/2) exp(-sqrt(1 - c eps^4) |x|))` over the annulus.
    pub c1: f64,
    pub argmax_radius: f64,
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub bounded: bool,
}

/// Envelope ratio over `2 <= |x| <= 0.8 L` with `c = |c_star|`.
pub fn decay_envelope_check(gf: &GaugeFit, w: &RealField, c_star: f64) -> DecayEnvelope {
    let g = gf.v.grid;
    let e4 = gf.eps.powi(4);
    let kappa = (1.0 - c_star.abs() * e4).max(0.0).sqrt();
    let (r0, r1) = (2.0, 0.8 * g.inscribed_radius());
    let mut c1: f64 = 0.0;
    let mut arg = 0.0;
    for (n, (_, x1, x2)) in g.points().enumerate() {
        let r = x1.hypot(x2);
        if r < r0 || r > r1 {
            continue;
        }
        let diff = (gf.v.values[n] - w.values[n]).norm();
        let ratio = diff / (e4 * r.powf(2.5) * (-kappa * r).exp());
        if ratio > c1 {
            c1 = ratio;
            arg = r;
        }
    }
    DecayEnvelope { c1, argmax_radius: arg, inner_radius: r0, outer_radius: r1, bounded: c1.is_finite() }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub params: GPParams,
    pub eps: f64,
    pub mu: f64,
    /// `1 + mu eps^2`.
    pub beta: f64,
    pub beta_over_eps4: f64,
    pub c_star: f64,
    pub c_star_mass_consistent: f64,
    /// `||R - eps^4 psi1 - beta psi2||_inf / eps^4`.
    pub r_residual1: f64,
    /// Second-order remainder over `(eps^4 + |beta|)^2`, third corrector
    /// recombined with `Omega^2`.
    pub r_residual2: f64,
    /// Same with a linear `Omega` recombination, for the exponent check.
    pub r_residual2_linear_omega: f64,
    /// `||I - eps^6 Omega psiI||_inf / (eps^6 Omega)`; absolute when `Omega = 0`.
    pub i_residual: f64,
    pub i_residual_abs: f64,
    /// `i_residual` restricted to `|x| <= 0.8 L`, away from the periodic seam.
    pub i_residual_interior: f64,
    /// `||I||_inf`.
    pub i_sup: f64,
    /// Least-squares coefficient of `w + x . grad w` in `R - eps^4 psi1`, over `eps^4`.
    pub c_fit_over_eps4: f64,
    pub minus_two_c_fit_over_eps4: f64,
    /// `|x_a|` in physical units.
    pub xa_norm: f64,
    pub xa_over_eps5: f64,
    /// `|x_a / eps|` in grid cells of the rescaled frame.
    pub ya_cells: f64,
    pub theta: f64,
    pub orthogonality: f64,
    pub decay: DecayEnvelope,
    pub vortices: Vec<Vortex>,
    pub vortex_free_radius: f64,
    /// `0.5 eps^(-4/3)`.
    pub vortex_free_target: f64,
    pub vortices_inside_target: usize,
}

/// Compares the gauge-fitted field with the expansion. `mu` is the physical
/// chemical potential.
pub fn decompose_and_compare(gf: &GaugeFit, psis: &PsiSet, mu: f64) -> Result<ExpansionReport> {
    ensure_same_grid(&psis.w.grid, &gf.v.grid)?;
    if (psis.lambda - gf.params.lambda).abs() > 1e-14 {
        return Err(Error::InvalidParameter(format!(
            "corrector set built for Lambda = {} but the minimizer has Lambda = {}",
            psis.lambda, gf.params.lambda
        )));
    }
    let w = &psis.w;
    let g = w.grid;
    let eps = gf.eps;
    let e4 = eps.powi(4);
    let omega = gf.params.omega;
    let beta = 1.0 + mu * eps * eps;
    let re = gf.v.re();
    let r = re.sub(w)?;
    let im = gf.v.im();

    let first = RealField::from_index_fn(g, |i, j| {
        let n = g.index(i, j);
        r.values[n] - e4 * psis.psi1.values[n] - beta * psis.psi2.values[n]
    });
    let r_residual1 = first.sup_norm() / e4;
    let second = |psi3: &RealField| {
        RealField::from_index_fn(g, |i, j| {
            let n = g.index(i, j);
            first.values[n]
                - e4 * e4 * psi3.values[n]
                - beta * beta * psis.psi4.values[n]
                - e4 * beta * psis.psi5.values[n]
        })
        .sup_norm()
            / (e4 + beta.abs()).powi(2)
    };
    let r_residual2 = second(&psis.psi3(omega));
    let r_residual2_linear_omega = second(&psis.psi3_with_exponent(omega, 1));

    let e6w = e4 * eps * eps * omega;
    let i_diff = im.zip_map(&psis.psi_i, |a, b| a - e6w * b)?;
    let i_residual_abs = i_diff.sup_norm();
    let i_scale = if omega == 0.0 { 1.0 } else { e6w };
    let i_residual = i_residual_abs / i_scale;
    let r_in = 0.8 * g.inscribed_radius();
    let i_residual_interior = g
        .points()
        .enumerate()
        .filter(|(_, (_, x1, x2))| x1.hypot(*x2) <= r_in)
        .map(|(n, _)| i_diff.values[n].abs())
        .fold(0.0, f64::max)
        / i_scale;

    let phi = psis.psi2.scale(-2.0);
    let rem = r.zip_map(&psis.psi1, |a, b| a - e4 * b)?;
    let c_fit = inner(&rem, &phi) / inner(&phi, &phi);

    let c_star = coefficients::c_star(psis);
    let decay = decay_envelope_check(gf, w, c_star);
    let scan = vortex_scan(&gf.v, 1e-12);
    let target = 0.5 * eps.powf(-4.0 / 3.0);
    let inside = scan.vortices.iter().filter(|v| v.x[0].hypot(v.x[1]) <= target).count();
    let xa_norm = gf.x_a[0].hypot(gf.x_a[1]);
    Ok(ExpansionReport {
        params: gf.params,
        eps,
        mu,
        beta,
        beta_over_eps4: beta / e4,
        c_star,
        c_star_mass_consistent: coefficients::c_star_mass_consistent(psis),
        r_residual1,
        r_residual2,
        r_residual2_linear_omega,
        i_residual,
        i_residual_abs,
        i_residual_interior,
        i_sup: im.sup_norm(),
        c_fit_over_eps4: c_fit / e4,
        minus_two_c_fit_over_eps4: -2.0 * c_fit / e4,
        xa_norm,
        xa_over_eps5: xa_norm / eps.powi(5),
        ya_cells: gf.y_a[0].hypot(gf.y_a[1]) / g.hx().min(g.hy()),
        theta: gf.theta,
        orthogonality: gf.orthogonality,
        decay,
        vortex_free_radius: scan.vortex_free_radius,
        vortices: scan.vortices,
        vortex_free_target: target,
        vortices_inside_target: inside,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct XaScaling {
    /// `|x_a| / eps^5` per point.
    pub ratios: Vec<f64>,
    /// `|x_a / eps|` in rescaled grid cells per point.
    pub cells: Vec<f64>,
    pub max_cells: f64,
    /// All points below `floor_cells`.
    pub pass: bool,
    pub floor_cells: f64,
}

/// Checks that `|x_a|` stays below `floor_cells` rescaled grid cells along a
/// sweep of at least three reports.
pub fn xa_scaling_check(reports: &[ExpansionReport], floor_cells: f64) -> Result<XaScaling> {
    if reports.len() < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 sweep points, got {}", reports.len())));
    }
    let ratios: Vec<f64> = reports.iter().map(|r| r.xa_over_eps5).collect();
    let cells: Vec<f64> = reports.iter().map(|r| r.ya_cells).collect();
    let max_cells = cells.iter().cloned().fold(0.0, f64::max);
    Ok(XaScaling { ratios, cells, max_cells, pass: max_cells < floor_cells, floor_cells })
}

/// Coefficient of the rotational third corrector in a gauge-fitted field:
/// the second-order remainder with the static part removed, projected on
/// `eps^8 psi3_rot`.
pub fn rotational_coefficient(gf: &GaugeFit, psis: &PsiSet, mu: f64) -> Result<f64> {
    ensure_same_grid(&psis.w.grid, &gf.v.grid)?;
    let g = psis.w.grid;
    let e4 = gf.eps.powi(4);
    let beta = 1.0 + mu * gf.eps * gf.eps;
    let re = gf.v.re();
    let d = RealField::from_index_fn(g, |i, j| {
        let n = g.index(i, j);
        re.values[n]
            - psis.w.values[n]
            - e4 * psis.psi1.values[n]
            - beta * psis.psi2.values[n]
            - e4 * e4 * psis.psi3_static.values[n]
            - beta * beta * psis.psi4.values[n]
            - e4 * beta * psis.psi5.values[n]
    });
    let r = &psis.psi3_rot;
    Ok(inner(&d, r) / (e4 * e4 * inner(r, r)))
}

/// Observed order `p` in `|x_k - x_inf| ~ h_k^p` from a log-log least-squares
/// fit.
pub fn observed_order(h: &[f64], errors: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = h.iter().zip(errors).filter(|(_, e)| **e > 0.0).map(|(a, e)| (a.ln(), e.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Convenience: grid of the rescaled frame for a Kwong profile.
pub fn rescaled_grid(kp: &KwongProfile) -> GridSpec {
    kp.grid()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OmegaExponent {
    pub omegas: Vec<f64>,
    /// `rotational_coefficient` per speed, the first at `Omega = 0`.
    pub coefficients: Vec<f64>,
    /// `(c(Omega) - c(0)) / Omega^2`; tends to 1 under quadratic recombination.
    pub normalized: Vec<f64>,
    /// Log-log slope of `|c(Omega) - c(0)|` against `Omega`.
    pub order: f64,
}

/// Measures how the rotational part of the third corrector scales with
/// `Omega`. The first speed must be zero; it removes the Omega-independent
/// higher-order background.
pub fn omega_exponent(omegas: &[f64], coefficients: &[f64]) -> Result<OmegaExponent> {
    if omegas.len() != coefficients.len() || omegas.len() < 3 || omegas[0] != 0.0 {
        return Err(Error::InvalidParameter(
            "need matching lists with at least three speeds, the first being 0".into(),
        ));
    }
    let c0 = coefficients[0];
    let om = &omegas[1..];
    let d: Vec<f64> = coefficients[1..].iter().map(|c| (c - c0).abs()).collect();
    let normalized = om.iter().zip(&coefficients[1..]).map(|(o, c)| (c - c0) / (o * o)).collect();
    Ok(OmegaExponent {
        omegas: omegas.to_vec(),
        coefficients: coefficients.to_vec(),
        normalized,
        order: observed_order(om, &d),
    })
}
