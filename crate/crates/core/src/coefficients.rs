//! Scalar constants and integral identities of the corrector fields.
//!
//! "Zero" identities are reported as normalized defects: the raw value
//! divided by the magnitude of its largest constituent integral.

use serde::{Deserialize, Serialize};

use crate::field::RealField;
use crate::kwong::KwongProfile;
use crate::linops::PsiSet;
use crate::quadrature::{inner, inner3};
use crate::spectral;
use crate::trap::Trap;

fn norm(f: &RealField) -> f64 {
    inner(f, f).sqrt()
}

fn ratio(value: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        value.abs()
    } else {
        value.abs() / scale
    }
}

/// `(int V w^2)^(1/4)` for the trap with anisotropy `lambda`.
pub fn lambda0(lambda: f64, kp: &KwongProfile) -> f64 {
    crate::linops::lambda0(&Trap { lambda, shift: [0.0, 0.0] }, kp.w())
}

/// `int x1^2 w^2`.
pub fn second_moment_x1(kp: &KwongProfile) -> f64 {
    let w = kp.w();
    let x1sq = RealField::from_fn(w.grid, |x1, _| x1 * x1);
    inner3(&x1sq, w, w)
}

/// `(1 / (2 lambda0^4)) [int (3w^2 - 1) psi1^2 - 4 int V w psi1]`.
pub fn c_star(psis: &PsiSet) -> f64 {
    let (w, p1) = (&psis.w, &psis.psi1);
    let v = Trap { lambda: psis.lambda, shift: [0.0, 0.0] }.field(w.grid);
    let q = w.map(|x| 3.0 * x * x - 1.0);
    let num = inner3(&q, p1, p1) - 4.0 * inner3(&v, w, p1);
    num / (2.0 * psis.lambda0.powi(4))
}

/// `(2 int w psi3 + int psi1^2) / (2 lambda0^4)`: the limit of `beta / eps^4`
/// forced by the mass constraint. Differs from [`c_star`] by
/// `int |grad psi1|^2 / (2 lambda0^4)`.
pub fn c_star_mass_consistent(psis: &PsiSet) -> f64 {
    let lhs = 2.0 * inner(&psis.w, &psis.psi3_static) + inner(&psis.psi1, &psis.psi1);
    lhs / (2.0 * psis.lambda0.powi(4))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MassIdentities {
    pub int_w_psi1: f64,
    pub int_w_psi2: f64,
    /// `2 int w psi4 + int psi2^2`.
    pub t1: f64,
    /// `2 int w psi5 + 2 int psi1 psi2`.
    pub t2: f64,
    pub int_w_psi1_normalized: f64,
    pub int_w_psi2_normalized: f64,
    pub t1_normalized: f64,
    /// `t2 / (-2 lambda0^4)`, expected to be one.
    pub t2_ratio: f64,
}

pub fn mass_identities(psis: &PsiSet) -> MassIdentities {
    let w = &psis.w;
    let nw = norm(w);
    let int_w_psi1 = inner(w, &psis.psi1);
    let int_w_psi2 = inner(w, &psis.psi2);
    let a4 = 2.0 * inner(w, &psis.psi4);
    let b4 = inner(&psis.psi2, &psis.psi2);
    let t2 = 2.0 * inner(w, &psis.psi5) + 2.0 * inner(&psis.psi1, &psis.psi2);
    MassIdentities {
        int_w_psi1,
        int_w_psi2,
        t1: a4 + b4,
        t2,
        int_w_psi1_normalized: ratio(int_w_psi1, nw * norm(&psis.psi1)),
        int_w_psi2_normalized: ratio(int_w_psi2, nw * norm(&psis.psi2)),
        t1_normalized: ratio(a4 + b4, a4.abs().max(b4.abs())),
        t2_ratio: t2 / (-2.0 * psis.lambda0.powi(4)),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BetaIdentities {
    /// `int d1 w (x_perp . grad psiI)`.
    pub ii1: f64,
    /// `int d2 w (x_perp . grad psiI)`.
    pub ii2: f64,
    /// `|ii_k| / (||grad w|| ||grad psiI||)`.
    pub ii1_normalized: f64,
    pub ii2_normalized: f64,
    /// `2 int w psi3 + int psi1^2` with the unit-rotation third corrector.
    pub lhs_beta: f64,
    /// `int (3w^2 - 1) psi1^2 - 4 int V w psi1`.
    pub rhs_beta: f64,
    /// `int w psi3_rot`, the rotation-dependent part of `lhs_beta`.
    pub rotation_part: f64,
    /// `int |grad psi1|^2`.
    pub grad_psi1_sq: f64,
    /// `rhs_beta - int |grad psi1|^2`, which integration by parts equates
    /// with `lhs_beta`.
    pub rhs_beta_with_gradient: f64,
}

impl BetaIdentities {
    pub fn beta_ratio(&self) -> f64 {
        self.lhs_beta / self.rhs_beta
    }
}

pub fn beta_identities(psis: &PsiSet) -> BetaIdentities {
    let w = &psis.w;
    let (g1, g2) = spectral::gradient(w);
    let rot = spectral::angular_derivative(&psis.psi_i);
    let ii1 = inner(&g1, &rot);
    let ii2 = inner(&g2, &rot);
    let (p1, p2) = spectral::gradient(&psis.psi_i);
    let scale = (inner(&g1, &g1) + inner(&g2, &g2)).sqrt() * (inner(&p1, &p1) + inner(&p2, &p2)).sqrt();
    let psi3 = psis.psi3(1.0);
    let v = Trap { lambda: psis.lambda, shift: [0.0, 0.0] }.field(w.grid);
    let q = w.map(|x| 3.0 * x * x - 1.0);
    let (q1, q2) = spectral::gradient(&psis.psi1);
    let grad_psi1_sq = inner(&q1, &q1) + inner(&q2, &q2);
    let rhs_beta = inner3(&q, &psis.psi1, &psis.psi1) - 4.0 * inner3(&v, w, &psis.psi1);
    BetaIdentities {
        ii1,
        ii2,
        ii1_normalized: ratio(ii1, scale),
        ii2_normalized: ratio(ii2, scale),
        lhs_beta: 2.0 * inner(w, &psi3) + inner(&psis.psi1, &psis.psi1),
        rhs_beta,
        rotation_part: inner(w, &psis.psi3_rot),
        grad_psi1_sq,
        rhs_beta_with_gradient: rhs_beta - grad_psi1_sq,
    }
}

/// `|int w^2 (x . grad V) - 2 int V w^2| / int V w^2` for `V + offset`;
/// vanishes for the degree-two homogeneous trap (`offset = 0`).
pub fn pohozaev_defect(trap: &Trap, offset: f64, w: &RealField) -> f64 {
    let l = trap.lambda * trap.lambda;
    let (s1, s2) = (trap.shift[0], trap.shift[1]);
    let x_grad_v = RealField::from_fn(w.grid, |x1, x2| 2.0 * x1 * (x1 - s1) + 2.0 * l * x2 * (x2 - s2));
    let v = trap.field(w.grid).map(|x| x + offset);
    let l04 = inner3(&v, w, w);
    (inner3(&x_grad_v, w, w) - 2.0 * l04).abs() / l04.abs()
}

pub fn pohozaev_check(lambda: f64, kp: &KwongProfile) -> f64 {
    pohozaev_defect(&Trap { lambda, shift: [0.0, 0.0] }, 0.0, kp.w())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientReport {
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    pub lambda0: f64,
    pub c_star: f64,
    pub c_star_mass_consistent: f64,
    pub mass_identities: MassIdentities,
    pub beta_identities: BetaIdentities,
    pub pohozaev_defect: f64,
}

pub fn coefficient_report(psis: &PsiSet, kp: &KwongProfile) -> CoefficientReport {
    CoefficientReport {
        lambda: psis.lambda,
        lambda0: psis.lambda0,
        c_star: c_star(psis),
        c_star_mass_consistent: c_star_mass_consistent(psis),
        mass_identities: mass_identities(psis),
        beta_identities: beta_identities(psis),
        pohozaev_defect: pohozaev_check(psis.lambda, kp),
    }
}
