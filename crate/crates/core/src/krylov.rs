//! Preconditioned MINRES for symmetric (possibly indefinite) systems.

use crate::quadrature::dot;

#[derive(Debug, Clone)]
pub struct MinresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// True residual `||b - A x|| / ||b||` after the final sweep.
    pub relative_residual: f64,
    pub converged: bool,
}

/// Solves `A x = b` with symmetric `A` and symmetric positive (semi)definite
/// preconditioner `m` (applied as an approximate inverse). Restarts from the
/// true residual until it drops below `tol` or `max_iter` iterations are spent.
pub fn minres(
    a: &dyn Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    m: &dyn Fn(&[f64]) -> Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> MinresOutcome {
    let n = b.len();
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return MinresOutcome { x, iterations: 0, relative_residual: 0.0, converged: true };
    }
    let mut used = 0;
    let mut rel = 1.0;
    let mut stalls = 0;
    let mut r = b.to_vec();
    while used < max_iter && stalls < 3 {
        // The sweep monitors a preconditioned norm, so aim below the target.
        let (dx, its) = minres_sweep(a, &r, m, 0.1 * tol * bnorm, max_iter - used);
        used += its;
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi += d;
        }
        let ax = a(&x);
        r = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let new_rel = dot(&r, &r).sqrt() / bnorm;
        if new_rel > 0.5 * rel {
            stalls += 1;
        }
        rel = new_rel;
        if rel <= tol {
            break;
        }
    }
    MinresOutcome { x, iterations: used, relative_residual: rel, converged: rel <= tol }
}

fn minres_sweep(
    a: &dyn Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    m: &dyn Fn(&[f64]) -> Vec<f64>,
    abs_tol: f64,
    max_iter: usize,
) -> (Vec<f64>, usize) {
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r1 = b.to_vec();
    let mut y = m(&r1);
    let beta1 = dot(&r1, &y);
    if beta1 <= 0.0 || !beta1.is_finite() {
        return (x, 0);
    }
    let beta1 = beta1.sqrt();
    let mut r2 = r1.clone();
    let (mut oldb, mut beta, mut dbar, mut epsln) = (0.0, beta1, 0.0, 0.0);
    let mut phibar = beta1;
    let (mut cs, mut sn) = (-1.0f64, 0.0f64);
    let mut w = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let mut v = vec![0.0; n];
    // Ratio between the preconditioned and plain residual norms at the start,
    // used to translate the stopping test.
    let scale = beta1 / dot(b, b).sqrt();
    let mut itn = 0;
    while itn < max_iter {
        itn += 1;
        let s = 1.0 / beta;
        for i in 0..n {
            v[i] = s * y[i];
        }
        y = a(&v);
        if itn >= 2 {
            let c = beta / oldb;
            for i in 0..n {
                y[i] -= c * r1[i];
            }
        }
        let alfa = dot(&v, &y);
        let c = alfa / beta;
        for i in 0..n {
            y[i] -= c * r2[i];
        }
        std::mem::swap(&mut r1, &mut r2);
        r2.copy_from_slice(&y);
        y = m(&r2);
        oldb = beta;
        let bb = dot(&r2, &y);
        beta = if bb > 0.0 { bb.sqrt() } else { 0.0 };

        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = gbar.hypot(beta).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;

        let denom = 1.0 / gamma;
        for i in 0..n {
            let w1 = w2[i];
            w2[i] = w[i];
            w[i] = (v[i] - oldeps * w1 - delta * w2[i]) * denom;
            x[i] += phi * w[i];
        }
        if phibar <= abs_tol * scale || beta == 0.0 {
            break;
        }
    }
    (x, itn)
}
