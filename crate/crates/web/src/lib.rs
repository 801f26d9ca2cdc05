//! Browser bindings. Each operation returns a JSON string; the plain
//! `*_json` functions carry the logic so they can be tested natively.

use std::sync::OnceLock;

use gpvortex::grid::GridSpec;
use gpvortex::kwong::{self, KwongIdentities, KwongProfile};
use gpvortex::minimizer::{self, CollapseReport, FlowConfig, Frame, GPParams, Init, MinimizerReport};
use gpvortex::vortex::{vortex_scan, Vortex};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest grid the page may request.
pub const MAX_N: usize = 256;
/// Modulus floor, relative to the maximum, below which plaquettes are not scanned.
pub const VORTEX_THRESHOLD: f64 = 1e-6;
const RADIAL_SAMPLES: usize = 200;

/// Townes profile on the default rescaled grid, shared by every call.
fn reference_profile() -> Result<&'static KwongProfile, String> {
    static CELL: OnceLock<KwongProfile> = OnceLock::new();
    if let Some(kp) = CELL.get() {
        return Ok(kp);
    }
    let kp = profile(128, 12.0)?;
    Ok(CELL.get_or_init(|| kp))
}

fn profile(n: usize, half_width: f64) -> Result<KwongProfile, String> {
    let grid = grid(n, half_width)?;
    let radial = kwong::solve_kwong_radial(1e-12).map_err(|e| e.to_string())?;
    kwong::kwong_on_grid(&radial, grid).map_err(|e| e.to_string())
}

fn grid(n: usize, half_width: f64) -> Result<GridSpec, String> {
    if n > MAX_N {
        return Err(format!("grid size {n} exceeds {MAX_N}"));
    }
    GridSpec::square(n, half_width).map_err(|e| e.to_string())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
pub struct Townes {
    pub w0: f64,
    pub a_star: f64,
    pub a_star_grid: f64,
    pub grid_residual: f64,
    pub identities: KwongIdentities,
    pub r: Vec<f64>,
    pub w: Vec<f64>,
}

pub fn townes_json(n: usize, half_width: f64) -> Result<String, String> {
    let kp = profile(n, half_width)?;
    let rad = &kp.radial;
    let r_end = half_width.min(rad.r_max());
    let r: Vec<f64> = (0..=RADIAL_SAMPLES).map(|k| r_end * k as f64 / RADIAL_SAMPLES as f64).collect();
    let w = r.iter().map(|&x| rad.eval(x).0).collect();
    to_json(&Townes {
        w0: rad.w0,
        a_star: rad.a_star,
        a_star_grid: kp.a_star_2d,
        grid_residual: kp.residual,
        identities: kwong::verify_identities(&kp),
        r,
        w,
    })
}

#[derive(Serialize)]
pub struct GroundState {
    pub report: MinimizerReport,
    pub n: usize,
    pub half_width: f64,
    /// Row-major `|u|`, first index along `x1`.
    pub modulus: Vec<f64>,
    pub phase: Vec<f64>,
    pub vortices: Vec<Vortex>,
    pub vortex_free_radius: f64,
}

/// Physical-frame minimizer seeded by the Townes profile.
pub fn ground_state_json(a: f64, lambda: f64, omega: f64, n: usize, half_width: f64) -> Result<String, String> {
    let kp = reference_profile()?;
    let p = GPParams::new(a, lambda, omega);
    let cfg = FlowConfig { frame: Frame::Physical, init: Init::KwongSeeded, ..FlowConfig::default() };
    let res = minimizer::minimize(&p, grid(n, half_width)?, &cfg, kp).map_err(|e| e.to_string())?;
    let scan = vortex_scan(&res.field, VORTEX_THRESHOLD);
    to_json(&GroundState {
        report: res.report,
        n,
        half_width,
        modulus: res.field.values.iter().map(|z| z.norm()).collect(),
        phase: res.field.values.iter().map(|z| z.arg()).collect(),
        vortices: scan.vortices,
        vortex_free_radius: scan.vortex_free_radius,
    })
}

/// Flow from the trap Gaussian, recording whether the width collapses.
pub fn collapse_json(
    a: f64,
    lambda: f64,
    omega: f64,
    n: usize,
    half_width: f64,
    max_steps: usize,
) -> Result<String, String> {
    let kp = reference_profile()?;
    let p = GPParams::new(a, lambda, omega);
    let cfg = FlowConfig {
        frame: Frame::Physical,
        init: Init::Gaussian,
        max_steps,
        newton_switch: 0.0,
        ..FlowConfig::default()
    };
    let rep: CollapseReport =
        minimizer::collapse_probe(&p, grid(n, half_width)?, &cfg, kp).map_err(|e| e.to_string())?;
    to_json(&rep)
}

#[wasm_bindgen]
pub fn townes(n: usize, half_width: f64) -> Result<String, JsError> {
    townes_json(n, half_width).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn ground_state(a: f64, lambda: f64, omega: f64, n: usize, half_width: f64) -> Result<String, JsError> {
    ground_state_json(a, lambda, omega, n, half_width).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn collapse(
    a: f64,
    lambda: f64,
    omega: f64,
    n: usize,
    half_width: f64,
    max_steps: usize,
) -> Result<String, JsError> {
    collapse_json(a, lambda, omega, n, half_width, max_steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn critical_mass() -> Result<f64, JsError> {
    reference_profile().map(|kp| kp.critical_mass()).map_err(|e| JsError::new(&e))
}
