//! Deterministic minimization over the weight sphere `(θ, φ)`.
//!
//! A coarse grid picks the basin, then coordinate golden-section searches
//! polish it. The objectives used here are Hermitian forms in `(z₊, z₋)`, so
//! at fixed φ the θ-profile is a half period of a sinusoid (unimodal on
//! `[0, π/2]`) and the φ-minimum does not depend on θ.

use std::f64::consts::{FRAC_PI_2, PI};

use super::CombinationWeights;

pub const GRID: usize = 128;
const MAX_SWEEPS: usize = 60;
const GOLDEN_ITERS: usize = 90;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub weights: CombinationWeights,
    pub value: f64,
}

fn improves(candidate: f64, best: f64) -> bool {
    candidate < best - 4.0 * f64::EPSILON * best.abs()
}

/// Best point of an `n × n` grid over `θ ∈ [0, π/2]`, `φ ∈ [−π, π]`, with the
/// balanced combination `(π/4, 0)` as the incumbent so that flat objectives
/// keep it.
pub fn grid_search(n: usize, f: &impl Fn(CombinationWeights) -> f64) -> Minimum {
    let start = CombinationWeights::BALANCED;
    let mut best = Minimum { weights: start, value: f(start) };
    let last = (n - 1) as f64;
    for i in 0..n {
        let theta = FRAC_PI_2 * i as f64 / last;
        for j in 0..n {
            let w = CombinationWeights::new(theta, -PI + 2.0 * PI * j as f64 / last);
            let v = f(w);
            if improves(v, best.value) {
                best = Minimum { weights: w, value: v };
            }
        }
    }
    best
}

/// Golden-section search on `[a, b]`; returns the best abscissa seen.
fn golden(mut a: f64, mut b: f64, g: impl Fn(f64) -> f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (g(x1), g(x2));
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for _ in 0..GOLDEN_ITERS {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = g(x2);
        }
        for (x, v) in [(x1, f1), (x2, f2)] {
            if v < best.1 {
                best = (x, v);
            }
        }
        if b - a <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    best
}

/// Coordinate descent from `start` until a sweep gains less than `tol`.
pub fn refine(start: Minimum, tol: f64, f: &impl Fn(CombinationWeights) -> f64) -> Minimum {
    let mut cur = start;
    for _ in 0..MAX_SWEEPS {
        let before = cur.value;
        let phi0 = cur.weights.phi;
        let (phi, v) = golden(phi0 - FRAC_PI_2, phi0 + FRAC_PI_2, |x| f(CombinationWeights::new(cur.weights.theta, x)));
        if improves(v, cur.value) {
            cur = Minimum { weights: CombinationWeights::new(cur.weights.theta, phi), value: v };
        }
        let (theta, v) = golden(0.0, FRAC_PI_2, |x| f(CombinationWeights::new(x, cur.weights.phi)));
        if improves(v, cur.value) {
            cur = Minimum { weights: CombinationWeights::new(theta, cur.weights.phi), value: v };
        }
        if before - cur.value <= tol {
            break;
        }
    }
    cur
}

/// Grid search followed by refinement to `1e-10` in the objective.
pub fn minimize(f: impl Fn(CombinationWeights) -> f64) -> Minimum {
    refine(grid_search(GRID, &f), 1e-10, &f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_objective_keeps_tie_break() {
        let m = minimize(|_| 1.0);
        assert_eq!(m.weights, CombinationWeights::BALANCED);
        assert_eq!(m.value, 1.0);
    }

    #[test]
    fn finds_interior_minimum() {
        let target = CombinationWeights::new(0.3, 2.0);
        let m = minimize(|w| (w.theta - target.theta).powi(2) + (1.0 - (w.phi - target.phi).cos()));
        assert!((m.weights.theta - 0.3).abs() < 1e-6);
        assert!((m.weights.phi - 2.0).abs() < 1e-6);
    }
}
