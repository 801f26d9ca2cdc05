use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic tensor grid on `[-lx, lx) x [-ly, ly)`.
///
/// Index `(i, j)` maps to `x1 = -lx + i*hx`, `x2 = -ly + j*hy`; the origin is
/// the node `(nx/2, ny/2)`. Samples are stored row-major with `x1` fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    #[serde(rename = "Lx")]
    pub lx: f64,
    #[serde(rename = "Ly")]
    pub ly: f64,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        let g = GridSpec { nx, ny, lx, ly };
        g.validate()?;
        Ok(g)
    }

    pub fn square(n: usize, l: f64) -> Result<Self> {
        Self::new(n, n, l, l)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("nx", self.nx), ("ny", self.ny)] {
            if n < 16 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!("{name} = {n}: point counts must be even and at least 16")));
            }
        }
        for (name, l) in [("Lx", self.lx), ("Ly", self.ly)] {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!("{name} = {l}: half-widths must be positive")));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn hx(&self) -> f64 {
        2.0 * self.lx / self.nx as f64
    }

    #[inline]
    pub fn hy(&self) -> f64 {
        2.0 * self.ly / self.ny as f64
    }

    /// Quadrature weight of one cell.
    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.hx() * self.hy()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn origin_index(&self) -> usize {
        self.index(self.nx / 2, self.ny / 2)
    }

    #[inline]
    pub fn x1(&self, i: usize) -> f64 {
        -self.lx + i as f64 * self.hx()
    }

    #[inline]
    pub fn x2(&self, j: usize) -> f64 {
        -self.ly + j as f64 * self.hy()
    }

    /// Coordinate used as a multiplier (`x1 * f`, `x . grad f`, ...).
    ///
    /// The node `i = 0` sits on the periodic seam where the sawtooth `x1`
    /// jumps from `+lx` to `-lx`; it takes the midpoint value 0 so that
    /// reflections `i -> nx - i` map the coordinate to its negative exactly.
    #[inline]
    pub fn x1_mul(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.x1(i)
        }
    }

    #[inline]
    pub fn x2_mul(&self, j: usize) -> f64 {
        if j == 0 {
            0.0
        } else {
            self.x2(j)
        }
    }

    /// Index of the mirror node under `x1 -> -x1`.
    #[inline]
    pub fn mirror_i(&self, i: usize) -> usize {
        (self.nx - i) % self.nx
    }

    #[inline]
    pub fn mirror_j(&self, j: usize) -> usize {
        (self.ny - j) % self.ny
    }

    /// Radius of the largest disk about the origin inside the box.
    pub fn inscribed_radius(&self) -> f64 {
        self.lx.min(self.ly)
    }

    pub fn describe(&self) -> String {
        format!("{}x{} on [-{}, {})x[-{}, {})", self.nx, self.ny, self.lx, self.lx, self.ly, self.ly)
    }

    /// Iterator over `(index, x1, x2)` with true (unfolded) coordinates.
    pub fn points(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        (0..self.ny).flat_map(move |j| {
            let x2 = self.x2(j);
            (0..self.nx).map(move |i| (self.index(i, j), self.x1(i), x2))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_or_small() {
        assert!(GridSpec::square(15, 4.0).is_err());
        assert!(GridSpec::square(17, 4.0).is_err());
        assert!(GridSpec::square(8, 4.0).is_err());
        assert!(GridSpec::square(16, 0.0).is_err());
        assert!(GridSpec::new(16, 32, 4.0, -1.0).is_err());
        assert!(GridSpec::new(16, 32, 4.0, 2.0).is_ok());
    }

    #[test]
    fn origin_is_a_node() {
        let g = GridSpec::new(32, 64, 3.0, 5.0).unwrap();
        assert_eq!(g.x1(g.nx / 2), 0.0);
        assert_eq!(g.x2(g.ny / 2), 0.0);
        assert_eq!(g.origin_index(), 32 * 32 + 16);
    }

    #[test]
    fn multiplier_coordinates_are_odd() {
        let g = GridSpec::square(32, 7.0).unwrap();
        for i in 0..g.nx {
            assert_eq!(g.x1_mul(g.mirror_i(i)), -g.x1_mul(i));
        }
    }
}
