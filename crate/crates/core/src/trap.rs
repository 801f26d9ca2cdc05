//! Anisotropic harmonic trap `V(x) = (x1 - s1)^2 + Lambda^2 (x2 - s2)^2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::RealField;
use crate::grid::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trap {
    pub lambda: f64,
    /// Trap center; zero for the symmetric problem.
    #[serde(default)]
    pub shift: [f64; 2],
}

impl Trap {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::InvalidParameter(format!("Lambda must lie in (0, 1], got {lambda}")));
        }
        Ok(Trap { lambda, shift: [0.0, 0.0] })
    }

    pub fn shifted(self, shift: [f64; 2]) -> Self {
        Trap { shift, ..self }
    }

    pub fn value(&self, x1: f64, x2: f64) -> f64 {
        let (y1, y2) = (x1 - self.shift[0], x2 - self.shift[1]);
        y1 * y1 + self.lambda * self.lambda * y2 * y2
    }

    pub fn field(&self, grid: GridSpec) -> RealField {
        RealField::from_fn(grid, |x1, x2| self.value(x1, x2))
    }

    /// `eps^2 V(eps y)` sampled in the rescaled coordinate `y`, the potential
    /// seen by the rescaled profile.
    pub fn rescaled_field(&self, grid: GridSpec, eps: f64) -> RealField {
        RealField::from_fn(grid, |y1, y2| eps * eps * self.value(eps * y1, eps * y2))
    }
}

/// Critical rotation speed `2 min(1, Lambda)`.
pub fn omega_star(lambda: f64) -> f64 {
    2.0 * lambda.min(1.0)
}
