//! Deterministic reductions.
//!
//! Every integral over the grid goes through [`pairwise_sum`], a fixed
//! binary tree over the sample order, so results do not depend on how the
//! caller chunks or schedules work.

use crate::error::{Error, Result};
use crate::field::{ComplexField, RealField};

const LEAF: usize = 32;

/// Pairwise (cascade) summation with a fixed split at the midpoint.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        let mut s = 0.0;
        for v in values {
            s += v;
        }
        return s;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise sum of `f(i)` for `i in 0..n`, without materializing the terms.
pub fn pairwise_sum_by(n: usize, f: &impl Fn(usize) -> f64) -> f64 {
    fn rec(lo: usize, hi: usize, f: &impl Fn(usize) -> f64) -> f64 {
        if hi - lo <= LEAF {
            let mut s = 0.0;
            for i in lo..hi {
                s += f(i);
            }
            return s;
        }
        let mid = lo + (hi - lo) / 2;
        rec(lo, mid, f) + rec(mid, hi, f)
    }
    rec(0, n, f)
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index, value: values[index] }),
        None => Ok(()),
    }
}

/// `hx*hy*sum(f)`: the periodic trapezoid rule, spectrally accurate for
/// smooth periodic (or rapidly decaying) integrands.
pub fn integrate(f: &RealField) -> Result<f64> {
    check_finite(&f.values)?;
    Ok(f.grid.cell_area() * pairwise_sum(&f.values))
}

/// `int |u|^2`.
pub fn integrate_norm_sqr(u: &ComplexField) -> Result<f64> {
    if let Some(index) = u.values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
        let z = u.values[index];
        let value = if z.re.is_finite() { z.im } else { z.re };
        return Err(Error::NonFinite { index, value });
    }
    Ok(u.grid.cell_area() * pairwise_sum_by(u.values.len(), &|i| u.values[i].norm_sqr()))
}

/// `int f g` without allocating the product; both fields assumed finite.
pub fn inner(f: &RealField, g: &RealField) -> f64 {
    debug_assert_eq!(f.grid, g.grid);
    f.grid.cell_area() * pairwise_sum_by(f.values.len(), &|i| f.values[i] * g.values[i])
}

/// `int f g h`.
pub fn inner3(f: &RealField, g: &RealField, h: &RealField) -> f64 {
    f.grid.cell_area() * pairwise_sum_by(f.values.len(), &|i| f.values[i] * g.values[i] * h.values[i])
}

/// Plain `sum f_i g_i` (no cell weight), used by the Krylov solvers.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    pairwise_sum_by(a.len(), &|i| a[i] * b[i])
}
