//! Fourier-space calculus on the periodic grid.
//!
//! First derivatives multiply by `i k` with the Nyquist mode zeroed; even
//! derivatives use `-k^2` including Nyquist. FFT plans are cached per grid.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::field::{ComplexField, RealField};
use crate::grid::GridSpec;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

pub struct Spectral {
    grid: GridSpec,
    fx: Arc<dyn Fft<f64>>,
    ix: Arc<dyn Fft<f64>>,
    fy: Arc<dyn Fft<f64>>,
    iy: Arc<dyn Fft<f64>>,
    /// Wavenumbers with Nyquist zeroed (first derivatives).
    kx1: Vec<f64>,
    ky1: Vec<f64>,
    /// Squared wavenumbers including Nyquist.
    kx2: Vec<f64>,
    ky2: Vec<f64>,
}

fn wavenumbers(n: usize, l: f64) -> (Vec<f64>, Vec<f64>) {
    let base = PI / l;
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    for m in 0..n {
        let signed = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
        k2[m] = (base * signed).powi(2);
        k1[m] = if m == n / 2 { 0.0 } else { base * signed };
    }
    (k1, k2)
}

type CacheKey = (usize, usize, u64, u64);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<Spectral>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<Spectral>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Spectral {
    /// Shared transform context for `grid`.
    pub fn for_grid(grid: &GridSpec) -> Arc<Spectral> {
        let key = (grid.nx, grid.ny, grid.lx.to_bits(), grid.ly.to_bits());
        let mut map = cache().lock().expect("spectral cache poisoned");
        map.entry(key).or_insert_with(|| Arc::new(Spectral::new(*grid))).clone()
    }

    fn new(grid: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let (kx1, kx2) = wavenumbers(grid.nx, grid.lx);
        let (ky1, ky2) = wavenumbers(grid.ny, grid.ly);
        Spectral {
            grid,
            fx: planner.plan_fft_forward(grid.nx),
            ix: planner.plan_fft_inverse(grid.nx),
            fy: planner.plan_fft_forward(grid.ny),
            iy: planner.plan_fft_inverse(grid.ny),
            kx1,
            ky1,
            kx2,
            ky2,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn transform(&self, data: &mut [Complex64], row: &Arc<dyn Fft<f64>>, col: &Arc<dyn Fft<f64>>) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        row.process(data);
        let mut t = vec![ZERO; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                t[i * ny + j] = data[j * nx + i];
            }
        }
        col.process(&mut t);
        for i in 0..nx {
            for j in 0..ny {
                data[j * nx + i] = t[i * ny + j];
            }
        }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.fx, &self.fy);
    }

    /// Inverse transform including the `1/(nx*ny)` normalization.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.ix, &self.iy);
        let s = 1.0 / (self.grid.len() as f64);
        for z in data.iter_mut() {
            *z *= s;
        }
    }

    /// Applies the Fourier multiplier `m(kx1, ky1, kx2, ky2)` to `data`
    /// (physical in, physical out).
    fn apply_multiplier(&self, data: &mut [Complex64], m: impl Fn(usize, usize) -> Complex64) {
        self.forward(data);
        let nx = self.grid.nx;
        for (k, z) in data.iter_mut().enumerate() {
            *z *= m(k % nx, k / nx);
        }
        self.inverse(data);
    }

    fn multipliers_from_hat(
        &self,
        hat: &[Complex64],
        ms: &[&dyn Fn(usize, usize) -> Complex64],
    ) -> Vec<Vec<Complex64>> {
        let nx = self.grid.nx;
        ms.iter()
            .map(|m| {
                let mut d: Vec<Complex64> = hat.iter().enumerate().map(|(k, &z)| z * m(k % nx, k / nx)).collect();
                self.inverse(&mut d);
                d
            })
            .collect()
    }

    pub fn k_sqr(&self, m1: usize, m2: usize) -> f64 {
        self.kx2[m1] + self.ky2[m2]
    }

    // Complex-valued calculus.

    pub fn laplacian_c(&self, u: &[Complex64]) -> Vec<Complex64> {
        let mut d = u.to_vec();
        self.apply_multiplier(&mut d, |a, b| Complex64::new(-(self.kx2[a] + self.ky2[b]), 0.0));
        d
    }

    pub fn gradient_c(&self, u: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut hat = u.to_vec();
        self.forward(&mut hat);
        let d1 = |a: usize, _b: usize| Complex64::new(0.0, self.kx1[a]);
        let d2 = |_a: usize, b: usize| Complex64::new(0.0, self.ky1[b]);
        let mut out = self.multipliers_from_hat(&hat, &[&d1, &d2]);
        let g2 = out.pop().unwrap();
        let g1 = out.pop().unwrap();
        (g1, g2)
    }

    /// Laplacian and gradient sharing one forward transform.
    pub fn laplacian_gradient_c(&self, u: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
        let mut hat = u.to_vec();
        self.forward(&mut hat);
        let lap = |a: usize, b: usize| Complex64::new(-(self.kx2[a] + self.ky2[b]), 0.0);
        let d1 = |a: usize, _b: usize| Complex64::new(0.0, self.kx1[a]);
        let d2 = |_a: usize, b: usize| Complex64::new(0.0, self.ky1[b]);
        let mut out = self.multipliers_from_hat(&hat, &[&lap, &d1, &d2]);
        let g2 = out.pop().unwrap();
        let g1 = out.pop().unwrap();
        let l = out.pop().unwrap();
        (l, g1, g2)
    }

    /// `(-Laplacian + sigma)^{-1} u`.
    pub fn helmholtz_inverse_c(&self, u: &[Complex64], sigma: f64) -> Vec<Complex64> {
        let mut d = u.to_vec();
        self.apply_multiplier(&mut d, |a, b| Complex64::new(1.0 / (self.kx2[a] + self.ky2[b] + sigma), 0.0));
        d
    }

    /// `x_perp . grad u = -x2 d1 u + x1 d2 u` from precomputed derivatives.
    pub fn combine_angular(&self, g1: &[Complex64], g2: &[Complex64]) -> Vec<Complex64> {
        let g = &self.grid;
        let mut out = vec![ZERO; g.len()];
        for j in 0..g.ny {
            let x2 = g.x2_mul(j);
            for i in 0..g.nx {
                let k = g.index(i, j);
                out[k] = g2[k] * g.x1_mul(i) - g1[k] * x2;
            }
        }
        out
    }

    // Real-valued wrappers.

    fn real_op(&self, f: &RealField, op: impl Fn(&[Complex64]) -> Vec<Complex64>) -> RealField {
        let z: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        RealField { grid: f.grid, values: op(&z).into_iter().map(|c| c.re).collect() }
    }

    pub fn laplacian(&self, f: &RealField) -> RealField {
        self.real_op(f, |z| self.laplacian_c(z))
    }

    pub fn helmholtz_inverse(&self, f: &RealField, sigma: f64) -> RealField {
        self.real_op(f, |z| self.helmholtz_inverse_c(z, sigma))
    }

    pub fn gradient(&self, f: &RealField) -> (RealField, RealField) {
        let z: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let (g1, g2) = self.gradient_c(&z);
        (
            RealField { grid: f.grid, values: g1.into_iter().map(|c| c.re).collect() },
            RealField { grid: f.grid, values: g2.into_iter().map(|c| c.re).collect() },
        )
    }

    /// Second derivatives `(f11, f12, f22)` on the grid.
    pub fn hessian(&self, f: &RealField) -> (RealField, RealField, RealField) {
        let mut hat: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut hat);
        let d11 = |a: usize, _b: usize| Complex64::new(-self.kx2[a], 0.0);
        let d12 = |a: usize, b: usize| Complex64::new(-self.kx1[a] * self.ky1[b], 0.0);
        let d22 = |_a: usize, b: usize| Complex64::new(-self.ky2[b], 0.0);
        let out = self.multipliers_from_hat(&hat, &[&d11, &d12, &d22]);
        let to_real = |v: &Vec<Complex64>| RealField { grid: f.grid, values: v.iter().map(|c| c.re).collect() };
        (to_real(&out[0]), to_real(&out[1]), to_real(&out[2]))
    }

    /// Translates `u` so that the result at `x` equals `u(x + shift)`.
    pub fn translate_c(&self, u: &[Complex64], shift: [f64; 2]) -> Vec<Complex64> {
        let mut d = u.to_vec();
        self.apply_multiplier(&mut d, |a, b| {
            let phase = self.kx1[a] * shift[0] + self.ky1[b] * shift[1];
            Complex64::new(phase.cos(), phase.sin())
        });
        d
    }
}

/// Laplacian of a real field.
pub fn laplacian(f: &RealField) -> RealField {
    Spectral::for_grid(&f.grid).laplacian(f)
}

/// Spectral gradient `(d1 f, d2 f)`.
pub fn gradient(f: &RealField) -> (RealField, RealField) {
    Spectral::for_grid(&f.grid).gradient(f)
}

pub fn laplacian_c(u: &ComplexField) -> ComplexField {
    let s = Spectral::for_grid(&u.grid);
    ComplexField { grid: u.grid, values: s.laplacian_c(&u.values) }
}

pub fn gradient_c(u: &ComplexField) -> (ComplexField, ComplexField) {
    let s = Spectral::for_grid(&u.grid);
    let (a, b) = s.gradient_c(&u.values);
    (ComplexField { grid: u.grid, values: a }, ComplexField { grid: u.grid, values: b })
}

/// `x_perp . grad f = -x2 d1 f + x1 d2 f`.
pub fn angular_derivative(f: &RealField) -> RealField {
    let (g1, g2) = gradient(f);
    let g = f.grid;
    RealField::from_index_fn(g, |i, j| {
        let k = g.index(i, j);
        g.x1_mul(i) * g2.values[k] - g.x2_mul(j) * g1.values[k]
    })
}

pub fn angular_derivative_c(u: &ComplexField) -> ComplexField {
    let s = Spectral::for_grid(&u.grid);
    let (g1, g2) = s.gradient_c(&u.values);
    ComplexField { grid: u.grid, values: s.combine_angular(&g1, &g2) }
}

/// `x . grad f`.
pub fn radial_derivative(f: &RealField) -> RealField {
    let (g1, g2) = gradient(f);
    let g = f.grid;
    RealField::from_index_fn(g, |i, j| {
        let k = g.index(i, j);
        g.x1_mul(i) * g1.values[k] + g.x2_mul(j) * g2.values[k]
    })
}

/// Hessian of `f` at the origin node.
pub fn hessian_at_origin(f: &RealField) -> [[f64; 2]; 2] {
    let (h11, h12, h22) = Spectral::for_grid(&f.grid).hessian(f);
    let o = f.grid.origin_index();
    [[h11.values[o], h12.values[o]], [h12.values[o], h22.values[o]]]
}

fn dft_coefficients(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let mut c = values.to_vec();
    fft.process(&mut c);
    let s = 1.0 / n as f64;
    c.iter_mut().for_each(|z| *z *= s);
    c
}

/// Evaluation matrix `E[t][m] = exp(i k_m (x_t + L))` of a 1D trigonometric
/// interpolant (Nyquist dropped).
fn evaluation_matrix(n: usize, l: f64, targets: &[f64]) -> Vec<Vec<Complex64>> {
    let (k, _) = wavenumbers(n, l);
    targets.iter().map(|&x| k.iter().map(|&km| Complex64::new(0.0, km * (x + l)).exp()).collect()).collect()
}

/// Samples the trigonometric interpolant of `u` at `scale * y + offset` for
/// every node `y` of `target`. Points outside the source box wrap around.
pub fn resample_affine_c(u: &ComplexField, target: GridSpec, scale: f64, offset: [f64; 2]) -> ComplexField {
    let g = u.grid;
    let tx: Vec<f64> = (0..target.nx).map(|a| scale * target.x1(a) + offset[0]).collect();
    let ty: Vec<f64> = (0..target.ny).map(|b| scale * target.x2(b) + offset[1]).collect();
    let ex = evaluation_matrix(g.nx, g.lx, &tx);
    let ey = evaluation_matrix(g.ny, g.ly, &ty);
    let nyq_x = g.nx / 2;
    let nyq_y = g.ny / 2;
    // Stage 1: along x for every source row.
    let mut stage = vec![ZERO; target.nx * g.ny];
    for j in 0..g.ny {
        let c = dft_coefficients(&u.values[j * g.nx..(j + 1) * g.nx]);
        for a in 0..target.nx {
            let mut acc = ZERO;
            for m in 0..g.nx {
                if m != nyq_x {
                    acc += c[m] * ex[a][m];
                }
            }
            stage[j * target.nx + a] = acc;
        }
    }
    // Stage 2: along y for every target column.
    let mut out = vec![ZERO; target.len()];
    let mut column = vec![ZERO; g.ny];
    for a in 0..target.nx {
        for j in 0..g.ny {
            column[j] = stage[j * target.nx + a];
        }
        let c = dft_coefficients(&column);
        for b in 0..target.ny {
            let mut acc = ZERO;
            for m in 0..g.ny {
                if m != nyq_y {
                    acc += c[m] * ey[b][m];
                }
            }
            out[b * target.nx + a] = acc;
        }
    }
    ComplexField { grid: target, values: out }
}

/// Trigonometric interpolant of a real field, evaluable off-grid together
/// with its first and second derivatives. Nyquist modes are dropped.
pub struct SpectralInterpolant {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
    kx: Vec<f64>,
    ky: Vec<f64>,
}

/// Value, gradient and Hessian `(f, [f1, f2], [f11, f12, f22])` at a point.
pub type Jet = (f64, [f64; 2], [f64; 3]);

impl SpectralInterpolant {
    pub fn new(f: &RealField) -> Self {
        let s = Spectral::for_grid(&f.grid);
        let mut coeffs: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        s.forward(&mut coeffs);
        let n = f.grid.len() as f64;
        for c in coeffs.iter_mut() {
            *c /= n;
        }
        SpectralInterpolant { grid: f.grid, coeffs, kx: s.kx1.clone(), ky: s.ky1.clone() }
    }

    pub fn eval(&self, x1: f64, x2: f64) -> Jet {
        let g = &self.grid;
        let (t1, t2) = (x1 + g.lx, x2 + g.ly);
        let ex: Vec<Complex64> = self.kx.iter().map(|&k| Complex64::new(0.0, k * t1).exp()).collect();
        let mut acc = [ZERO; 6];
        for b in 0..g.ny {
            let k2 = self.ky[b];
            if k2 == 0.0 && b == g.ny / 2 {
                continue;
            }
            let mut row = [ZERO; 3];
            for (a, &e) in ex.iter().enumerate() {
                if a == g.nx / 2 {
                    continue;
                }
                let k1 = self.kx[a];
                let c = self.coeffs[b * g.nx + a] * e;
                row[0] += c;
                row[1] += c * Complex64::new(0.0, k1);
                row[2] += c * (-k1 * k1);
            }
            let ey = Complex64::new(0.0, k2 * t2).exp();
            let ik2 = Complex64::new(0.0, k2);
            acc[0] += row[0] * ey;
            acc[1] += row[1] * ey;
            acc[2] += row[0] * ey * ik2;
            acc[3] += row[2] * ey;
            acc[4] += row[1] * ey * ik2;
            acc[5] += row[0] * ey * (-k2 * k2);
        }
        (acc[0].re, [acc[1].re, acc[2].re], [acc[3].re, acc[4].re, acc[5].re])
    }
}
