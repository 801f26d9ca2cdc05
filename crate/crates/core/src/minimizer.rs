//! Mass-constrained minimization of the rotating energy
//!
//! `F(u) = int |grad u|^2 + V |u|^2 - (a/2) int |u|^4 - Omega int x_perp . Im(conj(u) grad u)`
//!
//! in the physical frame (mass 1) or the rescaled frame `v(y) = eps sqrt(a*) u(eps y)`
//! (mass `a*`). A semi-implicit normalized gradient flow brings the state
//! into the basin of the minimizer; a Newton iteration on the bordered
//! Euler-Lagrange system then converges the residual.

use std::path::PathBuf;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ComplexField, RealField};
use crate::fieldio;
use crate::grid::GridSpec;
use crate::krylov::minres;
use crate::kwong::KwongProfile;
use crate::linops::lambda0;
use crate::quadrature::pairwise_sum_by;
use crate::spectral::Spectral;
use crate::trap::{omega_star, Trap};

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GPParams {
    pub a: f64,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
    /// Trap center, zero for the symmetric problem.
    #[serde(default)]
    pub trap_shift: [f64; 2],
}

impl GPParams {
    pub fn new(a: f64, lambda: f64, omega: f64) -> Self {
        GPParams { a, lambda, omega, trap_shift: [0.0, 0.0] }
    }

    pub fn trap(&self) -> Trap {
        Trap { lambda: self.lambda, shift: self.trap_shift }
    }

    pub fn omega_star(&self) -> f64 {
        omega_star(self.lambda)
    }

    /// Checks `Lambda` in (0, 1], `0 <= Omega < Omega*` and `a >= 0`.
    pub fn validate_shape(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(Error::InvalidParameter(format!("Lambda must lie in (0, 1], got {}", self.lambda)));
        }
        if !(self.omega >= 0.0 && self.omega < self.omega_star()) {
            return Err(Error::InvalidParameter(format!(
                "Omega = {} must satisfy 0 <= Omega < Omega* = 2 min(1, Lambda) = {}",
                self.omega,
                self.omega_star()
            )));
        }
        if !(self.a >= 0.0 && self.a.is_finite()) {
            return Err(Error::InvalidParameter(format!("a must be finite and non-negative, got {}", self.a)));
        }
        Ok(())
    }

    /// Full validation for minimization, which additionally needs `a < a*`.
    pub fn validate(&self, a_star: f64) -> Result<()> {
        self.validate_shape()?;
        if self.a >= a_star {
            return Err(Error::InvalidParameter(format!(
                "a = {} >= a* = {a_star:.10}: no minimizer exists at or above the critical mass (nonexistence regime)",
                self.a
            )));
        }
        Ok(())
    }

    /// `eps = (a* - a)^(1/4) / lambda0`.
    pub fn eps(&self, a_star: f64, lambda0: f64) -> f64 {
        (a_star - self.a).powf(0.25) / lambda0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Physical,
    Rescaled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Init {
    Gaussian,
    KwongSeeded,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowConfig {
    pub dt: f64,
    pub tol_energy: f64,
    pub tol_residual: f64,
    pub max_steps: usize,
    pub frame: Frame,
    pub init: Init,
    /// Residual below which the flow hands over to Newton; zero disables
    /// the Newton stage.
    pub newton_switch: f64,
    pub max_newton: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            dt: 1e-3,
            tol_energy: 1e-12,
            tol_residual: 1e-9,
            max_steps: 2_000_000,
            frame: Frame::Rescaled,
            init: Init::KwongSeeded,
            newton_switch: 1e-2,
            max_newton: 40,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        // Written so that NaN is rejected too.
        let positive = |x: f64| x > 0.0;
        if !positive(self.dt) || !positive(self.tol_energy) || !positive(self.tol_residual) {
            return Err(Error::InvalidParameter("dt and tolerances must be positive".into()));
        }
        if self.newton_switch < 0.0 {
            return Err(Error::InvalidParameter("newton_switch must be non-negative".into()));
        }
        Ok(())
    }
}

/// Energy and Euler-Lagrange operator of one frame. Coefficients:
/// potential field, rotation factor `c_rot`, interaction `c_g`, mass.
pub struct Functional {
    pub grid: GridSpec,
    pub frame: Frame,
    pub params: GPParams,
    pub potential: RealField,
    pub c_rot: f64,
    pub c_g: f64,
    pub mass: f64,
    pub a_star: f64,
    pub lambda0: f64,
    /// Length scale of the rescaled frame (`None` in the physical frame).
    pub eps: Option<f64>,
    spectral: Arc<Spectral>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnergyParts {
    pub kinetic: f64,
    pub potential: f64,
    /// `int |u|^4`.
    pub quartic: f64,
    /// `int x_perp . Im(conj(u) grad u)`.
    pub angular_momentum: f64,
    pub total: f64,
}

impl Functional {
    pub fn new(p: &GPParams, grid: GridSpec, frame: Frame, kp: &KwongProfile) -> Result<Self> {
        grid.validate()?;
        p.validate_shape()?;
        let a_star = kp.critical_mass();
        let l0 = lambda0(&Trap::new(p.lambda)?, kp.w());
        let trap = p.trap();
        let spectral = Spectral::for_grid(&grid);
        Ok(match frame {
            Frame::Physical => Functional {
                grid,
                frame,
                params: *p,
                potential: trap.field(grid),
                c_rot: p.omega,
                c_g: p.a,
                mass: 1.0,
                a_star,
                lambda0: l0,
                eps: None,
                spectral,
            },
            Frame::Rescaled => {
                if p.a >= a_star {
                    return Err(Error::InvalidParameter("the rescaled frame needs a < a*".into()));
                }
                let eps = p.eps(a_star, l0);
                Functional {
                    grid,
                    frame,
                    params: *p,
                    potential: trap.rescaled_field(grid, eps),
                    c_rot: eps * eps * p.omega,
                    c_g: p.a / a_star,
                    mass: a_star,
                    a_star,
                    lambda0: l0,
                    eps: Some(eps),
                    spectral,
                }
            }
        })
    }

    fn weight(&self) -> f64 {
        self.grid.cell_area()
    }

    pub fn norm_sqr(&self, u: &[C]) -> f64 {
        self.weight() * pairwise_sum_by(u.len(), &|k| u[k].norm_sqr())
    }

    fn re_inner(&self, a: &[C], b: &[C]) -> f64 {
        self.weight() * pairwise_sum_by(a.len(), &|k| (a[k].conj() * b[k]).re)
    }

    pub fn energy_parts(&self, u: &[C]) -> EnergyParts {
        let (g1, g2) = self.spectral.gradient_c(u);
        let h = self.weight();
        let n = u.len();
        let kinetic = h * pairwise_sum_by(n, &|k| g1[k].norm_sqr() + g2[k].norm_sqr());
        let potential = h * pairwise_sum_by(n, &|k| self.potential.values[k] * u[k].norm_sqr());
        let quartic = h * pairwise_sum_by(n, &|k| u[k].norm_sqr().powi(2));
        let ang = self.spectral.combine_angular(&g1, &g2);
        let angular_momentum = h * pairwise_sum_by(n, &|k| (u[k].conj() * ang[k]).im);
        let total = kinetic + potential - 0.5 * self.c_g * quartic - self.c_rot * angular_momentum;
        EnergyParts { kinetic, potential, quartic, angular_momentum, total }
    }

    pub fn energy(&self, u: &[C]) -> f64 {
        self.energy_parts(u).total
    }

    /// Non-Laplacian part `V u + i c_rot x_perp.grad u - c_g |u|^2 u`.
    fn nonlinear_part(&self, u: &[C]) -> Vec<C> {
        let (g1, g2) = self.spectral.gradient_c(u);
        let ang = self.spectral.combine_angular(&g1, &g2);
        let ic = C::new(0.0, self.c_rot);
        (0..u.len())
            .map(|k| self.potential.values[k] * u[k] + ic * ang[k] - self.c_g * u[k].norm_sqr() * u[k])
            .collect()
    }

    /// Half the Frechet derivative of the energy.
    pub fn gradient(&self, u: &[C]) -> Vec<C> {
        let lap = self.spectral.laplacian_c(u);
        let mut g = self.nonlinear_part(u);
        for (gk, l) in g.iter_mut().zip(&lap) {
            *gk -= l;
        }
        g
    }

    /// Lagrange multiplier and relative residual `||E'(u) - lambda u|| / ||u||`.
    pub fn residual(&self, u: &[C]) -> (f64, f64, Vec<C>) {
        let g = self.gradient(u);
        let m = self.norm_sqr(u);
        let lambda = self.re_inner(u, &g) / m;
        let r: Vec<C> = g.iter().zip(u).map(|(gk, uk)| gk - lambda * uk).collect();
        let rel = (self.norm_sqr(&r) / m).sqrt();
        (lambda, rel, r)
    }

    pub fn normalize(&self, u: &mut [C]) {
        let s = (self.mass / self.norm_sqr(u)).sqrt();
        u.iter_mut().for_each(|z| *z *= s);
    }

    /// Physical-frame energy `e_F` from a frame energy.
    pub fn physical_energy(&self, frame_energy: f64) -> f64 {
        match self.eps {
            None => frame_energy,
            Some(e) => frame_energy / (e * e * self.a_star),
        }
    }

    /// Physical chemical potential from a frame multiplier.
    pub fn physical_mu(&self, frame_lambda: f64) -> f64 {
        match self.eps {
            None => frame_lambda,
            Some(e) => frame_lambda / (e * e),
        }
    }

    /// Right-hand side of the diamagnetic bound:
    /// `int |grad |u||^2 + (V - Omega^2 |x|^2 / 4) |u|^2 - (c_g/2) int |u|^4`.
    pub fn diamagnetic_bound(&self, u: &[C]) -> f64 {
        let g = self.grid;
        let modulus = RealField { grid: g, values: u.iter().map(|z| z.norm()).collect() };
        let (d1, d2) = crate::spectral::gradient(&modulus);
        let h = self.weight();
        let c = self.c_rot * self.c_rot / 4.0;
        let n = u.len();
        let terms = |k: usize| {
            let (i, j) = (k % g.nx, k / g.nx);
            let r2 = g.x1(i).powi(2) + g.x2(j).powi(2);
            let m2 = modulus.values[k].powi(2);
            d1.values[k].powi(2) + d2.values[k].powi(2) + (self.potential.values[k] - c * r2) * m2
                - 0.5 * self.c_g * m2 * m2
        };
        h * pairwise_sum_by(n, &terms)
    }

    /// Stabilization shift keeping the explicit terms dominated by the
    /// implicit operator.
    fn sigma(&self, u: &[C]) -> f64 {
        let vmax = self.potential.values.iter().cloned().fold(0.0, f64::max);
        let umax = u.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
        let reach = self.grid.lx.hypot(self.grid.ly);
        0.5 * vmax + (self.c_rot * reach).powi(2) / 4.0 + self.c_g * umax
    }

    /// One normalized semi-implicit step:
    /// `(1/dt + sigma - Delta) u* = (1/dt + sigma + lambda) u - N(u)`.
    /// The multiplier term makes Euler-Lagrange solutions exact fixed points;
    /// without it the renormalization leaves an `O(lambda dt)` bias.
    pub fn flow_step(&self, u: &[C], dt: f64) -> Vec<C> {
        let s = 1.0 / dt + self.sigma(u);
        let nl = self.nonlinear_part(u);
        let lap = self.spectral.laplacian_c(u);
        let lambda =
            pairwise_sum_by(u.len(), &|k| (u[k].conj() * (nl[k] - lap[k])).re) * self.weight() / self.norm_sqr(u);
        let rhs: Vec<C> = u.iter().zip(&nl).map(|(uk, nk)| (s + lambda) * uk - nk).collect();
        let mut next = self.spectral.helmholtz_inverse_c(&rhs, s);
        self.normalize(&mut next);
        next
    }

    /// Root-mean-square radius about the center of mass.
    pub fn width(&self, u: &[C]) -> f64 {
        let g = self.grid;
        let m = self.norm_sqr(u);
        let h = self.weight();
        let mom = |f: &dyn Fn(usize) -> f64| h * pairwise_sum_by(u.len(), &|k| f(k) * u[k].norm_sqr()) / m;
        let c1 = mom(&|k| g.x1(k % g.nx));
        let c2 = mom(&|k| g.x2(k / g.nx));
        mom(&|k| (g.x1(k % g.nx) - c1).powi(2) + (g.x2(k / g.nx) - c2).powi(2)).sqrt()
    }

    /// Newton iterations on `E'(u) = lambda u` with mass and phase borders.
    /// Returns the number of Newton steps and linear iterations.
    pub fn newton(&self, u: &mut Vec<C>, tol: f64, max_newton: usize) -> Result<(usize, usize, f64)> {
        let n = u.len();
        let mut lin_total = 0;
        let (_, mut res, _) = self.residual(u);
        let mut steps = 0;
        while res > tol {
            if steps >= max_newton {
                return Err(Error::NotConverged { iterations: steps, residual: res });
            }
            steps += 1;
            let (lambda, _, r) = self.residual(u);
            let base = u.clone();
            let sq: Vec<C> = base.iter().map(|z| z * z).collect();
            let abs2: Vec<f64> = base.iter().map(|z| z.norm_sqr()).collect();
            let shift = (-lambda).max(1.0);
            let ic = C::new(0.0, self.c_rot);
            let sp = &self.spectral;
            let pot = &self.potential.values;
            let unpack = |x: &[f64]| -> Vec<C> { (0..n).map(|k| C::new(x[k], x[n + k])).collect() };
            let pack = |z: &[C], a: f64, b: f64| -> Vec<f64> {
                let mut out = Vec::with_capacity(2 * n + 2);
                out.extend(z.iter().map(|c| c.re));
                out.extend(z.iter().map(|c| c.im));
                out.push(a);
                out.push(b);
                out
            };
            let iu: Vec<C> = base.iter().map(|z| C::new(0.0, 1.0) * z).collect();
            let op = |x: &[f64]| -> Vec<f64> {
                let d = unpack(x);
                let (dl, dt) = (x[2 * n], x[2 * n + 1]);
                let lap = sp.laplacian_c(&d);
                let (g1, g2) = sp.gradient_c(&d);
                let ang = sp.combine_angular(&g1, &g2);
                let out: Vec<C> = (0..n)
                    .map(|k| {
                        -lap[k] + (pot[k] - lambda) * d[k] + ic * ang[k]
                            - self.c_g * (2.0 * abs2[k] * d[k] + sq[k] * d[k].conj())
                            - dl * base[k]
                            + dt * iu[k]
                    })
                    .collect();
                let rl = -pairwise_sum_by(n, &|k| (base[k].conj() * d[k]).re);
                let rt = pairwise_sum_by(n, &|k| (iu[k].conj() * d[k]).re);
                pack(&out, rl, rt)
            };
            let pre_u = |z: &[C]| sp.helmholtz_inverse_c(z, shift);
            let pu = pre_u(&base);
            let s_l = pairwise_sum_by(n, &|k| (base[k].conj() * pu[k]).re);
            let piu = pre_u(&iu);
            let s_t = pairwise_sum_by(n, &|k| (iu[k].conj() * piu[k]).re);
            let pre = |x: &[f64]| -> Vec<f64> {
                let d = pre_u(&unpack(x));
                pack(&d, x[2 * n] / s_l, x[2 * n + 1] / s_t)
            };
            let minus_r: Vec<C> = r.iter().map(|z| -z).collect();
            let b = pack(&minus_r, 0.0, 0.0);
            let lin_tol = (0.1 * res).clamp(1e-11, 1e-4);
            let out = minres(&op, &b, &pre, lin_tol, 3000);
            lin_total += out.iterations;
            let step = unpack(&out.x);
            let mut t = 1.0;
            loop {
                let mut trial: Vec<C> = base.iter().zip(&step).map(|(a, d)| a + t * d).collect();
                self.normalize(&mut trial);
                let (_, new_res, _) = self.residual(&trial);
                if new_res < res || t < 1e-3 {
                    *u = trial;
                    res = new_res;
                    break;
                }
                t *= 0.5;
            }
        }
        Ok((steps, lin_total, res))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinimizerReport {
    pub params: GPParams,
    pub frame: Frame,
    pub grid: GridSpec,
    pub a_star: f64,
    pub lambda0: f64,
    pub eps: Option<f64>,
    /// Physical-frame minimal energy `e_F(a)`.
    pub energy: f64,
    /// Physical chemical potential `mu = e_F - (a/2) int |u|^4`.
    pub mu: f64,
    pub frame_energy: f64,
    pub frame_multiplier: f64,
    pub flow_steps: usize,
    pub newton_steps: usize,
    pub linear_iterations: usize,
    pub final_residual: f64,
    pub mass_defect: f64,
    pub diamagnetic_bound: f64,
}

#[derive(Debug, Clone)]
pub struct MinimizerResult {
    /// Minimizer in the requested frame (`u` physical, `v` rescaled).
    pub field: ComplexField,
    pub report: MinimizerReport,
}

/// Initial state for `cfg.init` in the frame of `f`.
pub fn initial_state(f: &Functional, init: &Init, kp: &KwongProfile) -> Result<Vec<C>> {
    let g = f.grid;
    let p = &f.params;
    let s = p.trap_shift;
    let mut u: Vec<C> = match (init, f.frame) {
        (Init::Gaussian, Frame::Physical) => {
            let l = p.lambda;
            g.points()
                .map(|(_, x1, x2)| C::new((-((x1 - s[0]).powi(2) + l * (x2 - s[1]).powi(2)) / 2.0).exp(), 0.0))
                .collect()
        }
        (Init::Gaussian, Frame::Rescaled) => {
            let e = f.eps.unwrap();
            g.points()
                .map(|(_, y1, y2)| C::new((-((y1 - s[0] / e).powi(2) + (y2 - s[1] / e).powi(2)) / 2.0).exp(), 0.0))
                .collect()
        }
        (Init::KwongSeeded, frame) => {
            let e = match frame {
                Frame::Rescaled => 1.0,
                Frame::Physical => {
                    if p.a >= f.a_star {
                        return Err(Error::InvalidParameter("Kwong seeding needs a < a*".into()));
                    }
                    p.eps(f.a_star, f.lambda0)
                }
            };
            let scale = f.eps.unwrap_or(1.0);
            g.points()
                .map(|(_, x1, x2)| {
                    let r = ((x1 - s[0] / scale) / e).hypot((x2 - s[1] / scale) / e);
                    C::new(kp.radial.eval(r).0, 0.0)
                })
                .collect()
        }
        (Init::File(path), _) => {
            let u0 = fieldio::read_complex(path)?;
            crate::field::ensure_same_grid(&g, &u0.grid)?;
            u0.values
        }
    };
    f.normalize(&mut u);
    Ok(u)
}

pub struct FlowOutcome {
    pub steps: usize,
    pub residual: f64,
    pub energy: f64,
}

/// Runs the normalized flow until the energy change per unit time drops
/// below `tol_energy` and the residual below `target`, or `max_steps`.
pub fn run_flow(f: &Functional, u: &mut Vec<C>, cfg: &FlowConfig, target: f64) -> Result<FlowOutcome> {
    let mut e = f.energy(u);
    let (_, mut res, _) = f.residual(u);
    let mut steps = 0;
    while steps < cfg.max_steps {
        if res < target {
            break;
        }
        let next = f.flow_step(u, cfg.dt);
        let e_next = f.energy(&next);
        steps += 1;
        if steps > 10 && e_next > e + 1e-10 * e.abs().max(1.0) {
            return Err(Error::EnergyIncrease { step: steps, increase: e_next - e, dt: cfg.dt });
        }
        let de = (e_next - e).abs();
        *u = next;
        e = e_next;
        if steps % 10 == 0 || de < cfg.tol_energy * cfg.dt {
            res = f.residual(u).1;
            if de < cfg.tol_energy * cfg.dt && res < cfg.tol_residual {
                break;
            }
        }
    }
    Ok(FlowOutcome { steps, residual: res, energy: e })
}

/// Minimizes from an explicit initial state.
pub fn minimize_from(f: &Functional, u0: Vec<C>, cfg: &FlowConfig) -> Result<MinimizerResult> {
    cfg.validate()?;
    f.params.validate(f.a_star)?;
    let mut u = u0;
    f.normalize(&mut u);
    let use_newton = cfg.newton_switch > 0.0;
    let target = if use_newton { cfg.newton_switch.max(cfg.tol_residual) } else { cfg.tol_residual };
    let flow = run_flow(f, &mut u, cfg, target)?;
    let (mut newton_steps, mut linear_iterations, mut residual) = (0, 0, flow.residual);
    if use_newton && residual > cfg.tol_residual {
        if residual > target {
            return Err(Error::NotConverged { iterations: flow.steps, residual });
        }
        let (s, l, r) = f.newton(&mut u, cfg.tol_residual, cfg.max_newton)?;
        newton_steps = s;
        linear_iterations = l;
        residual = r;
    }
    if residual > cfg.tol_residual {
        return Err(Error::NotConverged { iterations: flow.steps + newton_steps, residual });
    }
    let parts = f.energy_parts(&u);
    let (lambda, residual, _) = f.residual(&u);
    let report = MinimizerReport {
        params: f.params,
        frame: f.frame,
        grid: f.grid,
        a_star: f.a_star,
        lambda0: f.lambda0,
        eps: f.eps,
        energy: f.physical_energy(parts.total),
        mu: f.physical_mu(lambda),
        frame_energy: parts.total,
        frame_multiplier: lambda,
        flow_steps: flow.steps,
        newton_steps,
        linear_iterations,
        final_residual: residual,
        mass_defect: (f.norm_sqr(&u) - f.mass).abs() / f.mass,
        diamagnetic_bound: f.physical_energy(f.diamagnetic_bound(&u)),
    };
    Ok(MinimizerResult { field: ComplexField { grid: f.grid, values: u }, report })
}

pub fn minimize(p: &GPParams, grid: GridSpec, cfg: &FlowConfig, kp: &KwongProfile) -> Result<MinimizerResult> {
    cfg.validate()?;
    p.validate(kp.critical_mass())?;
    let f = Functional::new(p, grid, cfg.frame, kp)?;
    let u0 = initial_state(&f, &cfg.init, kp)?;
    minimize_from(&f, u0, cfg)
}

/// Physical-frame energy of a mass-one state.
pub fn energy(u: &ComplexField, p: &GPParams, kp: &KwongProfile) -> Result<f64> {
    let f = Functional::new(p, u.grid, Frame::Physical, kp)?;
    let m = f.norm_sqr(&u.values);
    if (m - 1.0).abs() > 1e-8 {
        return Err(Error::MassViolation { expected: 1.0, defect: m - 1.0 });
    }
    Ok(f.energy(&u.values))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CollapseReport {
    pub a: f64,
    pub a_star: f64,
    pub steps: usize,
    pub initial_width: f64,
    pub final_width: f64,
    pub width_ratio: f64,
    pub initial_energy: f64,
    pub final_energy: f64,
    /// Energy non-increasing over the final `min(1000, steps)` steps.
    pub energy_decreasing_tail: bool,
    pub residual_converged: bool,
    pub final_residual: f64,
    /// Width fell below four grid cells.
    pub collapsed: bool,
    /// Descending energy, no residual convergence and a width ratio below 1/2.
    pub nonexistence_signature: bool,
}

/// Runs the physical-frame flow from the trap Gaussian for at most
/// `cfg.max_steps` steps, recording the collapse signature. Below `a*` the
/// full minimizer is run instead and convergence is reported.
pub fn collapse_probe(p: &GPParams, grid: GridSpec, cfg: &FlowConfig, kp: &KwongProfile) -> Result<CollapseReport> {
    cfg.validate()?;
    p.validate_shape()?;
    let f = Functional::new(p, grid, Frame::Physical, kp)?;
    let mut u = initial_state(&f, &Init::Gaussian, kp)?;
    let initial_width = f.width(&u);
    let initial_energy = f.energy(&u);
    if p.a < kp.critical_mass() {
        let cfg = FlowConfig { frame: Frame::Physical, init: Init::Gaussian, ..cfg.clone() };
        let out = minimize_from(&f, u, &cfg);
        let (final_energy, final_residual, steps, field) = match &out {
            Ok(r) => (
                r.report.frame_energy,
                r.report.final_residual,
                r.report.flow_steps + r.report.newton_steps,
                Some(&r.field.values),
            ),
            Err(Error::NotConverged { iterations, residual }) => (f64::NAN, *residual, *iterations, None),
            Err(_) => return out.map(|_| unreachable!()),
        };
        let final_width = field.map(|v| f.width(v)).unwrap_or(f64::NAN);
        return Ok(CollapseReport {
            a: p.a,
            a_star: kp.critical_mass(),
            steps,
            initial_width,
            final_width,
            width_ratio: final_width / initial_width,
            initial_energy,
            final_energy,
            energy_decreasing_tail: true,
            residual_converged: out.is_ok(),
            final_residual,
            collapsed: false,
            nonexistence_signature: false,
        });
    }
    let floor = 4.0 * grid.hx().max(grid.hy());
    let mut energies = Vec::with_capacity(cfg.max_steps.min(1 << 20));
    let mut e = initial_energy;
    let mut steps = 0;
    let mut res = f.residual(&u).1;
    let mut converged = false;
    while steps < cfg.max_steps {
        u = f.flow_step(&u, cfg.dt);
        e = f.energy(&u);
        energies.push(e);
        steps += 1;
        if steps % 50 == 0 {
            let width = f.width(&u);
            res = f.residual(&u).1;
            if res < cfg.tol_residual {
                converged = true;
                break;
            }
            if width < floor {
                break;
            }
        }
    }
    let width = f.width(&u);
    let tail = &energies[energies.len().saturating_sub(1000)..];
    let decreasing = tail.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0));
    let ratio = width / initial_width;
    Ok(CollapseReport {
        a: p.a,
        a_star: kp.critical_mass(),
        steps,
        initial_width,
        final_width: width,
        width_ratio: ratio,
        initial_energy,
        final_energy: e,
        energy_decreasing_tail: decreasing,
        residual_converged: converged,
        final_residual: res,
        collapsed: width < floor,
        nonexistence_signature: decreasing && !converged && ratio < 0.5,
    })
}
