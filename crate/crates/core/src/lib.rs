//! Rotating two-dimensional Gross-Pitaevskii ground states in the anisotropic
//! harmonic trap `V(x) = x1^2 + Lambda^2 x2^2`.
//!
//! The crate builds the Townes profile `w`, the correctors of the linearized
//! operators `L = -Delta + 1 - w^2` and `L~ = -Delta + 1 - 3 w^2`, minimizes the
//! rotating energy under the mass constraint and checks near-critical
//! minimizers against their asymptotic expansion, including a plaquette scan
//! for vortices.

pub mod coefficients;
pub mod error;
pub mod field;
pub mod fieldio;
pub mod grid;
pub mod krylov;
pub mod kwong;
pub mod linops;
pub mod minimizer;
pub mod ode;
pub mod quadrature;
pub mod spectral;
pub mod trap;
pub mod verify;
pub mod vortex;

pub use error::{Error, Result};
pub use field::{ComplexField, RealField};
pub use grid::GridSpec;
