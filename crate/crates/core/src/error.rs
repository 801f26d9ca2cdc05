use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("non-finite sample at index {index} (value {value})")]
    NonFinite { index: usize, value: f64 },

    #[error("field format error in {path:?}: {reason}")]
    Format { path: Option<PathBuf>, reason: String },

    #[error("field kind mismatch: file holds {found} samples, expected {expected}")]
    KindMismatch { expected: &'static str, found: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("bisection on w(0) failed: {0}")]
    Bracket(String),

    #[error("right-hand side violates solvability: cokernel defect {defect:.3e} exceeds {limit:.3e}")]
    CokernelViolation { defect: f64, limit: f64 },

    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("energy increased by {increase:.3e} at step {step}; halve dt (currently {dt})")]
    EnergyIncrease { step: usize, increase: f64, dt: f64 },

    #[error("collapse signature at step {step}: width {width:.3e} below four grid cells; use the rescaled frame")]
    Collapse { step: usize, width: f64 },

    #[error("mass constraint violated: |mass - {expected}| = {defect:.3e}")]
    MassViolation { expected: f64, defect: f64 },

    #[error("degenerate maximum of |u|: candidates at ({0:.6}, {1:.6}) and ({2:.6}, {3:.6})")]
    DegenerateMaximum(f64, f64, f64, f64),
}
