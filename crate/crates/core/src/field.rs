use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Real samples on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

/// Complex samples on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

pub fn ensure_same_grid(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch { left: a.describe(), right: b.describe() })
    }
}

impl RealField {
    pub fn zeros(grid: GridSpec) -> Self {
        RealField { grid, values: vec![0.0; grid.len()] }
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!("{} samples for a grid of {} points", values.len(), grid.len())));
        }
        Ok(RealField { grid, values })
    }

    /// Samples `f(x1, x2)` at the true node coordinates.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = vec![0.0; grid.len()];
        for (k, x1, x2) in grid.points() {
            values[k] = f(x1, x2);
        }
        RealField { grid, values }
    }

    /// Samples `f(i, j)` by node index.
    pub fn from_index_fn(grid: GridSpec, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                values.push(f(i, j));
            }
        }
        RealField { grid, values }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn at_origin(&self) -> f64 {
        self.values[self.grid.origin_index()]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        RealField { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        ensure_same_grid(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(RealField { grid: self.grid, values })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &Self) -> Result<()> {
        ensure_same_grid(&self.grid, &other.grid)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += s * b;
        }
        Ok(())
    }

    /// Multiplies pointwise by `c(i, j)` built from node indices.
    pub fn mul_index_fn(&self, c: impl Fn(usize, usize) -> f64) -> Self {
        let g = self.grid;
        let mut out = self.clone();
        for j in 0..g.ny {
            for i in 0..g.nx {
                out.values[g.index(i, j)] *= c(i, j);
            }
        }
        out
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField { grid: self.grid, values: self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect() }
    }

    /// `max |f(x) - s1*s2*f(mirror)|` over the grid, for parities `s1, s2 = +-1`.
    pub fn parity_defect(&self, s1: f64, s2: f64) -> f64 {
        let g = self.grid;
        let mut worst = 0.0f64;
        for j in 0..g.ny {
            for i in 0..g.nx {
                let a = self.at(i, j);
                let b1 = self.at(g.mirror_i(i), j);
                let b2 = self.at(i, g.mirror_j(j));
                worst = worst.max((a - s1 * b1).abs()).max((a - s2 * b2).abs());
            }
        }
        worst
    }
}

impl ComplexField {
    pub fn zeros(grid: GridSpec) -> Self {
        ComplexField { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_values(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!("{} samples for a grid of {} points", values.len(), grid.len())));
        }
        Ok(ComplexField { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
        for (k, x1, x2) in grid.points() {
            values[k] = f(x1, x2);
        }
        ComplexField { grid, values }
    }

    pub fn from_parts(re: &RealField, im: &RealField) -> Result<Self> {
        ensure_same_grid(&re.grid, &im.grid)?;
        let values = re.values.iter().zip(&im.values).map(|(&a, &b)| Complex64::new(a, b)).collect();
        Ok(ComplexField { grid: re.grid, values })
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn re(&self) -> RealField {
        RealField { grid: self.grid, values: self.values.iter().map(|z| z.re).collect() }
    }

    pub fn im(&self) -> RealField {
        RealField { grid: self.grid, values: self.values.iter().map(|z| z.im).collect() }
    }

    pub fn abs(&self) -> RealField {
        RealField { grid: self.grid, values: self.values.iter().map(|z| z.norm()).collect() }
    }

    pub fn norm_sqr(&self) -> RealField {
        RealField { grid: self.grid, values: self.values.iter().map(|z| z.norm_sqr()).collect() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexField { grid: self.grid, values: self.values.iter().map(|&z| z * s).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        ensure_same_grid(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| a - b).collect();
        Ok(ComplexField { grid: self.grid, values })
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}
