//! Vortex detection by plaquette phase winding.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::field::ComplexField;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vortex {
    /// Plaquette center.
    pub x: [f64; 2],
    pub winding: i32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VortexScan {
    pub vortices: Vec<Vortex>,
    /// Plaquettes skipped because a corner modulus fell below the threshold.
    pub skipped: usize,
    /// Radius of the largest origin-centered disk free of vortices and of
    /// skipped plaquettes, capped at the inscribed grid radius.
    pub vortex_free_radius: f64,
}

fn wrap(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

fn phase_step(a: Complex64, b: Complex64) -> f64 {
    wrap(b.arg() - a.arg())
}

/// Accumulated wrapped phase differences around a closed path of samples,
/// divided by `2 pi`.
pub fn path_winding(values: &[Complex64]) -> f64 {
    let n = values.len();
    (0..n).map(|k| phase_step(values[k], values[(k + 1) % n])).sum::<f64>() / (2.0 * PI)
}

/// Winding around the boundary of the index rectangle `[i0, i1] x [j0, j1]`,
/// traversed counterclockwise.
pub fn loop_winding(u: &ComplexField, i0: usize, j0: usize, i1: usize, j1: usize) -> f64 {
    let mut path = Vec::new();
    for i in i0..i1 {
        path.push(u.at(i, j0));
    }
    for j in j0..j1 {
        path.push(u.at(i1, j));
    }
    for i in (i0 + 1..=i1).rev() {
        path.push(u.at(i, j1));
    }
    for j in (j0 + 1..=j1).rev() {
        path.push(u.at(i0, j));
    }
    path_winding(&path)
}

/// Scans every interior plaquette. Plaquettes with a corner modulus below
/// `threshold * max|u|` are skipped.
pub fn vortex_scan(u: &ComplexField, threshold: f64) -> VortexScan {
    let g = u.grid;
    let umax = u.sup_norm();
    let floor = threshold * umax;
    let mut vortices = Vec::new();
    let mut skipped = 0;
    let mut radius = g.inscribed_radius();
    for j in 0..g.ny - 1 {
        for i in 0..g.nx - 1 {
            let c = [u.at(i, j), u.at(i + 1, j), u.at(i + 1, j + 1), u.at(i, j + 1)];
            let corner_dist = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
                .iter()
                .map(|&(a, b)| g.x1(a).hypot(g.x2(b)))
                .fold(f64::INFINITY, f64::min);
            if c.iter().any(|z| z.norm() <= floor) || umax == 0.0 {
                skipped += 1;
                radius = radius.min(corner_dist);
                continue;
            }
            let winding = path_winding(&c).round() as i32;
            if winding != 0 {
                let x = [g.x1(i) + 0.5 * g.hx(), g.x2(j) + 0.5 * g.hy()];
                vortices.push(Vortex { x, winding });
                radius = radius.min(corner_dist);
            }
        }
    }
    // A zero sitting exactly on a node makes its four plaquettes skip; the
    // ring of its eight neighbors still carries the winding.
    for j in 1..g.ny - 1 {
        for i in 1..g.nx - 1 {
            if u.at(i, j).norm() > floor || umax == 0.0 {
                continue;
            }
            let ring = [
                (i - 1, j - 1),
                (i, j - 1),
                (i + 1, j - 1),
                (i + 1, j),
                (i + 1, j + 1),
                (i, j + 1),
                (i - 1, j + 1),
                (i - 1, j),
            ];
            let values: Vec<Complex64> = ring.iter().map(|&(a, b)| u.at(a, b)).collect();
            if values.iter().any(|z| z.norm() <= floor) {
                continue;
            }
            let winding = path_winding(&values).round() as i32;
            if winding != 0 {
                vortices.push(Vortex { x: [g.x1(i), g.x2(j)], winding });
            }
        }
    }
    VortexScan { vortices, skipped, vortex_free_radius: radius }
}
