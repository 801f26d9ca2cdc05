//! Adaptive Dormand-Prince 5(4) integration for small fixed-size systems.

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth minus fourth order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Stateful integrator that advances `y' = f(t, y)` to requested times,
/// carrying its step size between calls.
pub struct Dopri<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]> {
    f: F,
    pub t: f64,
    pub y: [f64; N],
    h: f64,
    rtol: f64,
    atol: f64,
    pub steps: usize,
}

fn lin<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

impl<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]> Dopri<N, F> {
    pub fn new(f: F, t0: f64, y0: [f64; N], h0: f64, rtol: f64, atol: f64) -> Self {
        Dopri { f, t: t0, y: y0, h: h0, rtol, atol, steps: 0 }
    }

    /// Advances to `t_end` (either direction). Returns `false` if the step
    /// size underflowed.
    pub fn advance_to(&mut self, t_end: f64) -> bool {
        let dir = if t_end >= self.t { 1.0 } else { -1.0 };
        self.h = self.h.abs() * dir;
        while (t_end - self.t) * dir > 0.0 {
            let last = (self.t + self.h - t_end) * dir >= 0.0;
            let h = if last { t_end - self.t } else { self.h };
            let (t, y) = (self.t, self.y);
            let f = &self.f;
            let k1 = f(t, &y);
            let k2 = f(t + C2 * h, &lin(&y, h, &[(A21, &k1)]));
            let k3 = f(t + C3 * h, &lin(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(t + C4 * h, &lin(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = f(t + C5 * h, &lin(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
            let k6 = f(t + h, &lin(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
            let y5 = lin(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            let k7 = f(t + h, &y5);
            let mut err = 0.0f64;
            for i in 0..N {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.atol + self.rtol * y[i].abs().max(y5[i].abs());
                err = err.max((e / sc).abs());
            }
            if !err.is_finite() {
                err = 1e10;
            }
            if err <= 1.0 {
                self.t = if last { t_end } else { t + h };
                self.y = y5;
                self.steps += 1;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if !(last && err <= 1.0) {
                self.h = h * factor;
            }
            if self.h.abs() < 1e-14 * self.t.abs().max(1.0) {
                return false;
            }
        }
        true
    }
}
