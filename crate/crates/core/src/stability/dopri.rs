//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size real systems.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solution<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub dy: [f64; N],
    pub steps: usize,
    /// True when the observer asked to stop before `t_end`.
    pub stopped: bool,
}


const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, max_steps: 5_000_000 }
    }

    /// Integrate `y' = f(y)` from `t = 0` to `t_end`. `observe(t, y, y')` runs
    /// after every accepted step and returns true to stop early.
    pub fn solve<const N: usize>(
        &self,
        f: impl Fn(&[f64; N]) -> [f64; N],
        y0: [f64; N],
        t_end: f64,
        mut observe: impl FnMut(f64, &[f64; N], &[f64; N]) -> bool,
    ) -> Result<Solution<N>> {
        let mut t = 0.0;
        let mut y = y0;
        let mut k0 = f(&y);
        let mut h = self.initial_step(&y, &k0, t_end);
        let mut steps = 0;
        while t < t_end {
            if steps >= self.max_steps {
                break;
            }
            h = h.min(t_end - t);
            if h <= 1e-14 * t.abs().max(1e-300) {
                return Err(Error::StepUnderflow { t });
            }
            let mut k = [[0.0; N]; 7];
            k[0] = k0;
            for s in 1..7 {
                let mut ys = y;
                for (i, v) in ys.iter_mut().enumerate() {
                    *v += h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
                }
                k[s] = f(&ys);
            }
            let mut y_new = y;
            for (i, v) in y_new.iter_mut().enumerate() {
                *v += h * (0..6).map(|j| A[6][j] * k[j][i]).sum::<f64>();
            }
            let k_new = f(&y_new);
            k[6] = k_new;
            let err = (0..N)
                .map(|i| {
                    let e = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
                    let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                    (e / sc).powi(2)
                })
                .sum::<f64>()
                / N as f64;
            let err = err.sqrt();
            if !err.is_finite() {
                h *= 0.1;
                continue;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                t += h;
                y = y_new;
                k0 = k_new;
                steps += 1;
                if observe(t, &y, &k0) {
                    return Ok(Solution { t, y, dy: k0, steps, stopped: true });
                }
                h *= factor;
            } else {
                h *= factor.min(1.0);
            }
        }
        Ok(Solution { t, y, dy: k0, steps, stopped: false })
    }

    fn initial_step<const N: usize>(&self, y: &[f64; N], dy: &[f64; N], t_end: f64) -> f64 {
        let scale = |i: usize| self.atol + self.rtol * y[i].abs();
        let d0 = (0..N).map(|i| (y[i] / scale(i)).powi(2)).sum::<f64>().sqrt();
        let d1 = (0..N).map(|i| (dy[i] / scale(i)).powi(2)).sum::<f64>().sqrt();
        let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h.min(t_end)
    }
}
