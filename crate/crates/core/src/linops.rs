//! Linearized operators `L = -Delta + 1 - w^2` and `L~ = -Delta + 1 - 3 w^2`,
//! their deflated inverses, and the corrector fields built from them.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::RealField;
use crate::krylov::minres;
use crate::kwong::KwongProfile;
use crate::quadrature::{dot, inner, integrate};
use crate::spectral::{self, Spectral};
use crate::trap::Trap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Operator {
    /// `-Delta + 1 - w^2`, kernel spanned by `w`.
    L,
    /// `-Delta + 1 - 3 w^2`, kernel spanned by `d1 w, d2 w`.
    #[serde(rename = "Ltilde")]
    LTilde,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gauge {
    /// Add kernel components so that `grad psi(0) = 0`.
    GradZeroAtOrigin,
    /// Remove the component along `w`.
    L2OrthogonalToW,
    /// Minimum-norm solution orthogonal to the numerical kernel.
    None,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub which: Operator,
    pub gauge: Gauge,
    pub solvability_defect: f64,
    pub iterations: usize,
    /// `||Op(psi) - P rhs|| / ||rhs||`.
    pub residual: f64,
    pub gauge_coefficients: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct DeflatedSolve {
    pub solution: RealField,
    pub diagnostics: SolveDiagnostics,
}

/// Operators linearized around a fixed profile `w`, with numerically
/// computed kernel bases.
pub struct Linearization {
    pub w: RealField,
    w_sq: Vec<f64>,
    pub grad_w: (RealField, RealField),
    kernel_l: Vec<Vec<f64>>,
    kernel_lt: Vec<Vec<f64>>,
    hessian0: [[f64; 2]; 2],
    spectral: Arc<Spectral>,
    pub tol: f64,
    pub max_iter: usize,
}

fn orthonormalize(vectors: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for mut v in vectors {
        for q in &basis {
            let c = dot(q, &v);
            v.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
        }
        let n = dot(&v, &v).sqrt();
        if n > 0.0 {
            v.iter_mut().for_each(|a| *a /= n);
            basis.push(v);
        }
    }
    basis
}

fn project_out(basis: &[Vec<f64>], v: &mut [f64]) {
    for q in basis {
        let c = dot(q, v);
        v.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
    }
}

impl Linearization {
    pub fn new(w: &RealField) -> Self {
        let grad_w = spectral::gradient(w);
        let kernel_l = orthonormalize(vec![w.values.clone()]);
        let kernel_lt = orthonormalize(vec![grad_w.0.values.clone(), grad_w.1.values.clone()]);
        Linearization {
            w_sq: w.values.iter().map(|v| v * v).collect(),
            hessian0: spectral::hessian_at_origin(w),
            spectral: Spectral::for_grid(&w.grid),
            w: w.clone(),
            grad_w,
            kernel_l,
            kernel_lt,
            tol: 1e-11,
            max_iter: 5000,
        }
    }

    fn coefficient(which: Operator) -> f64 {
        match which {
            Operator::L => 1.0,
            Operator::LTilde => 3.0,
        }
    }

    fn apply_raw(&self, which: Operator, f: &[f64]) -> Vec<f64> {
        let c = Self::coefficient(which);
        let z: Vec<_> = f.iter().map(|&v| num_complex::Complex64::new(v, 0.0)).collect();
        let lap = self.spectral.laplacian_c(&z);
        f.iter().zip(&lap).zip(&self.w_sq).map(|((&v, l), w2)| -l.re + v - c * w2 * v).collect()
    }

    pub fn apply(&self, which: Operator, f: &RealField) -> Result<RealField> {
        crate::field::ensure_same_grid(&self.w.grid, &f.grid)?;
        Ok(RealField { grid: f.grid, values: self.apply_raw(which, &f.values) })
    }

    fn kernel(&self, which: Operator) -> &[Vec<f64>] {
        match which {
            Operator::L => &self.kernel_l,
            Operator::LTilde => &self.kernel_lt,
        }
    }

    /// Solves `Op psi = rhs` on the orthogonal complement of the kernel and
    /// then fixes the kernel component according to `gauge`.
    pub fn solve_deflated(&self, which: Operator, rhs: &RealField, gauge: Gauge) -> Result<DeflatedSolve> {
        crate::field::ensure_same_grid(&self.w.grid, &rhs.grid)?;
        integrate(rhs)?;
        let grid = rhs.grid;
        let basis = self.kernel(which);
        let cell = grid.cell_area().sqrt();
        let rhs_norm = dot(&rhs.values, &rhs.values).sqrt() * cell;
        let defect = basis.iter().map(|q| dot(q, &rhs.values).powi(2)).sum::<f64>().sqrt() * cell;
        let limit = 1e-6 * rhs_norm;
        if defect > limit {
            return Err(Error::CokernelViolation { defect, limit });
        }
        let mut b = rhs.values.clone();
        project_out(basis, &mut b);
        let (mut x, iterations) = if rhs_norm == 0.0 {
            (vec![0.0; grid.len()], 0)
        } else {
            let op = |v: &[f64]| {
                let mut p = v.to_vec();
                project_out(basis, &mut p);
                let mut out = self.apply_raw(which, &p);
                project_out(basis, &mut out);
                out
            };
            let pre = |v: &[f64]| {
                let mut p = v.to_vec();
                project_out(basis, &mut p);
                let z: Vec<_> = p.iter().map(|&v| num_complex::Complex64::new(v, 0.0)).collect();
                let mut out: Vec<f64> = self.spectral.helmholtz_inverse_c(&z, 1.0).iter().map(|c| c.re).collect();
                project_out(basis, &mut out);
                out
            };
            let out = minres(&op, &b, &pre, self.tol, self.max_iter);
            if !out.converged {
                return Err(Error::NotConverged { iterations: out.iterations, residual: out.relative_residual });
            }
            (out.x, out.iterations)
        };
        project_out(basis, &mut x);
        let mut solution = RealField { grid, values: x };
        let gauge_coefficients = match (which, gauge) {
            (Operator::LTilde, Gauge::GradZeroAtOrigin) => {
                let (g1, g2) = spectral::gradient(&solution);
                let o = grid.origin_index();
                let (r1, r2) = (g1.values[o], g2.values[o]);
                let h = self.hessian0;
                let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
                let c1 = -(h[1][1] * r1 - h[0][1] * r2) / det;
                let c2 = -(-h[1][0] * r1 + h[0][0] * r2) / det;
                solution.axpy(c1, &self.grad_w.0)?;
                solution.axpy(c2, &self.grad_w.1)?;
                vec![c1, c2]
            }
            (Operator::L, Gauge::L2OrthogonalToW) => {
                let c = inner(&solution, &self.w) / inner(&self.w, &self.w);
                solution.axpy(-c, &self.w)?;
                vec![-c]
            }
            _ => Vec::new(),
        };
        let applied = self.apply_raw(which, &solution.values);
        let res: Vec<f64> = applied.iter().zip(&b).map(|(a, c)| a - c).collect();
        let residual = if rhs_norm == 0.0 { 0.0 } else { dot(&res, &res).sqrt() * cell / rhs_norm };
        Ok(DeflatedSolve {
            solution,
            diagnostics: SolveDiagnostics {
                which,
                gauge,
                solvability_defect: defect,
                iterations,
                residual,
                gauge_coefficients,
            },
        })
    }
}

/// Corrector fields of the near-critical expansion at anisotropy `lambda`.
///
/// `psi3_static` and `psi3_rot` split the third corrector so that the value
/// at rotation speed `Omega` is `psi3_static + Omega^2 psi3_rot`.
#[derive(Debug, Clone)]
pub struct PsiSet {
    pub lambda: f64,
    pub lambda0: f64,
    pub a_star: f64,
    pub w: RealField,
    pub psi1: RealField,
    pub psi2: RealField,
    pub psi_aniso: RealField,
    pub psi_i: RealField,
    pub psi3_static: RealField,
    pub psi3_rot: RealField,
    pub psi4: RealField,
    pub psi5: RealField,
    pub diagnostics: BTreeMap<String, SolveDiagnostics>,
}

impl PsiSet {
    /// Third corrector at rotation speed `omega`.
    pub fn psi3(&self, omega: f64) -> RealField {
        self.psi3_with_exponent(omega, 2)
    }

    /// Recombination with an arbitrary power of `omega`, used to test the
    /// rotation scaling.
    pub fn psi3_with_exponent(&self, omega: f64, power: i32) -> RealField {
        let mut f = self.psi3_static.clone();
        f.axpy(omega.powi(power), &self.psi3_rot).expect("same grid");
        f
    }

    pub fn named_fields(&self) -> Vec<(&'static str, &RealField)> {
        vec![
            ("psi1", &self.psi1),
            ("psi2", &self.psi2),
            ("psi_aniso", &self.psi_aniso),
            ("psiI", &self.psi_i),
            ("psi3_static", &self.psi3_static),
            ("psi3_rot", &self.psi3_rot),
            ("psi4", &self.psi4),
            ("psi5", &self.psi5),
        ]
    }
}

/// `-(w + x . grad w) / 2`, the solution of `L~ psi = w` with `grad psi(0) = 0`.
pub fn psi2_closed_form(w: &RealField) -> RealField {
    let xw = spectral::radial_derivative(w);
    w.zip_map(&xw, |a, b| -0.5 * (a + b)).expect("same grid")
}

/// `(int V w^2)^(1/4)`.
pub fn lambda0(trap: &Trap, w: &RealField) -> f64 {
    let v = trap.field(w.grid);
    crate::quadrature::inner3(&v, w, w).powf(0.25)
}

pub fn build_psi_set(lambda: f64, kp: &KwongProfile) -> Result<PsiSet> {
    let trap = Trap::new(lambda)?;
    let w = kp.w();
    let grid = w.grid;
    let lin = Linearization::new(w);
    let v = trap.field(grid);
    let a_star = kp.a_star_2d;
    let l0 = lambda0(&trap, w);
    let k = l0.powi(4) / a_star;
    let mut diagnostics = BTreeMap::new();
    let mut solve = |name: &str, which, rhs: RealField, gauge| -> Result<RealField> {
        let s = lin.solve_deflated(which, &rhs, gauge)?;
        diagnostics.insert(name.to_string(), s.diagnostics);
        Ok(s.solution)
    };
    let gz = Gauge::GradZeroAtOrigin;

    let rhs1 = RealField::from_index_fn(grid, |i, j| {
        let n = grid.index(i, j);
        let wv = w.values[n];
        -k * wv.powi(3) - v.values[n] * wv
    });
    let psi1 = solve("psi1", Operator::LTilde, rhs1, gz)?;
    let s = 1.0 - lambda * lambda;
    let rhs_aniso = RealField::from_fn(grid, |x1, _| -s * x1 * x1).mul(w)?;
    let psi_aniso = solve("psi_aniso", Operator::LTilde, rhs_aniso, gz)?;
    let psi2 = psi2_closed_form(w);
    let rhs_i = spectral::angular_derivative(&psi_aniso).scale(-1.0);
    let psi_i = solve("psiI", Operator::L, rhs_i, Gauge::L2OrthogonalToW)?;

    // Shared potential term 3 (lambda0^4 / a*) w^2 + V.
    let q = RealField::from_index_fn(grid, |i, j| {
        let n = grid.index(i, j);
        3.0 * k * w.values[n].powi(2) + v.values[n]
    });
    let rhs3 = RealField::from_index_fn(grid, |i, j| {
        let n = grid.index(i, j);
        let p = psi1.values[n];
        3.0 * w.values[n] * p * p - q.values[n] * p
    });
    let psi3_static = solve("psi3_static", Operator::LTilde, rhs3, gz)?;
    let rhs3_rot = spectral::angular_derivative(&psi_i);
    let psi3_rot = solve("psi3_rot", Operator::LTilde, rhs3_rot, gz)?;
    let rhs4 = RealField::from_index_fn(grid, |i, j| {
        let n = grid.index(i, j);
        let p = psi2.values[n];
        p + 3.0 * w.values[n] * p * p
    });
    let psi4 = solve("psi4", Operator::LTilde, rhs4, gz)?;
    let rhs5 = RealField::from_index_fn(grid, |i, j| {
        let n = grid.index(i, j);
        let (p1, p2) = (psi1.values[n], psi2.values[n]);
        6.0 * w.values[n] * p1 * p2 + p1 - q.values[n] * p2
    });
    let psi5 = solve("psi5", Operator::LTilde, rhs5, gz)?;

    Ok(PsiSet {
        lambda,
        lambda0: l0,
        a_star,
        w: w.clone(),
        psi1,
        psi2,
        psi_aniso,
        psi_i,
        psi3_static,
        psi3_rot,
        psi4,
        psi5,
        diagnostics,
    })
}
