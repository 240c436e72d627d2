//! EPR-type sideband combinations, their spectra, and the Duan–Simon test.
//!
//! The measured combination is `β₊ₐ = z₊ b₊ₐ + z₋ b₋ₐ` with
//! `z₊ = e^{−iφ} sin θ`, `z₋ = cos θ`. Its conjugate partner is
//! `β_φ₋ = z₋ b₊φ − z₊ b₋φ`. Spectra are quadratic forms in the weights and
//! are evaluated in the sum/difference basis `w_s = (z₊ + z₋)/√2`,
//! `w_d = (z₊ − z₋)/√2`, where the strongly amplified difference channel does
//! not swamp the squeezed sum channel.

pub mod optimize;

use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::FrequencyGrid;
use crate::linear_response::{channel_weights, row_of, sd_row, solve_fluctuations, QuadratureScattering};
use crate::params::ResponseParams;

pub use optimize::Minimum;

/// Normalized weight pair, parametrized by `(θ, φ)`; the global phase is dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CombinationWeights {
    pub theta: f64,
    pub phi: f64,
}

fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

impl CombinationWeights {
    /// `z₊ = z₋ = 1/√2`.
    pub const BALANCED: Self = Self { theta: FRAC_PI_4, phi: 0.0 };

    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    /// From explicit complex weights, which must satisfy `|z₊|² + |z₋|² = 1`.
    pub fn from_z(z_plus: C64, z_minus: C64) -> Result<Self> {
        let norm_sq = z_plus.norm_sqr() + z_minus.norm_sqr();
        if norm_sq.is_nan() || (norm_sq - 1.0).abs() > 1e-12 {
            return Err(Error::Unnormalized { norm_sq });
        }
        let phi = if z_plus.norm() == 0.0 || z_minus.norm() == 0.0 { 0.0 } else { z_minus.arg() - z_plus.arg() };
        Ok(Self { theta: z_plus.norm().atan2(z_minus.norm()), phi: wrap_phase(phi) })
    }

    pub fn z_plus(&self) -> C64 {
        C64::from_polar(self.theta.sin(), -self.phi)
    }

    pub fn z_minus(&self) -> C64 {
        C64::from(self.theta.cos())
    }

    /// Weights on the sum and difference channels.
    ///
    /// Written so that `w_d` keeps full relative accuracy near the balanced
    /// point, where it is a small difference of O(1) numbers.
    pub fn sum_diff(&self) -> [C64; 2] {
        let s = self.theta.sin();
        let half = 0.5 * self.phi;
        // e^{−iφ} − 1, without cancellation for small φ.
        let shift = C64::new(-2.0 * half.sin().powi(2), -self.phi.sin());
        let w_s = (self.theta + FRAC_PI_4).sin() + FRAC_1_SQRT_2 * s * shift;
        let w_d = (self.theta - FRAC_PI_4).sin() + FRAC_1_SQRT_2 * s * shift;
        [w_s, w_d]
    }

    pub fn normalized(&self) -> Self {
        Self { theta: self.theta, phi: wrap_phase(self.phi) }
    }
}

/// Hermitian form `S(w) = Σ wᵢ Hᵢⱼ w̄ⱼ`, split by input channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightForm {
    pub quantum: [[C64; 2]; 2],
    pub thermal: [[C64; 2]; 2],
}

impl WeightForm {
    fn from_rows(rows: [[C64; 6]; 2], weights: &[f64; 6]) -> Self {
        let block = |range: std::ops::Range<usize>| {
            let mut h = [[C64::new(0.0, 0.0); 2]; 2];
            for (i, hi) in h.iter_mut().enumerate() {
                for (j, hij) in hi.iter_mut().enumerate() {
                    *hij = range.clone().map(|k| rows[i][k] * rows[j][k].conj() * weights[k]).sum();
                }
            }
            h
        };
        Self { quantum: block(0..4), thermal: block(4..6) }
    }

    fn eval_block(h: &[[C64; 2]; 2], w: &[C64; 2]) -> f64 {
        let mut acc = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                acc += (w[i] * h[i][j] * w[j].conj()).re;
            }
        }
        acc.max(0.0)
    }

    /// `(quantum, thermal)` parts at sum/difference weights `w`.
    pub fn eval(&self, w: &[C64; 2]) -> (f64, f64) {
        (Self::eval_block(&self.quantum, w), Self::eval_block(&self.thermal, w))
    }

    pub fn total(&self, w: &[C64; 2]) -> f64 {
        let (q, t) = self.eval(w);
        q + t
    }

    /// Form of `w ↦ S(P w)` with `P w = (−w_d, w_s)`.
    fn swapped(&self) -> Self {
        let sw = |h: [[C64; 2]; 2]| [[h[1][1], -h[1][0]], [-h[0][1], h[0][0]]];
        Self { quantum: sw(self.quantum), thermal: sw(self.thermal) }
    }

    fn plus(&self, o: &Self) -> Self {
        let add = |a: [[C64; 2]; 2], b: [[C64; 2]; 2]| {
            [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
        };
        Self { quantum: add(self.quantum, o.quantum), thermal: add(self.thermal, o.thermal) }
    }

    /// Smallest eigenvalue of the total form (the exact minimum over weights).
    pub fn min_eigenvalue(&self) -> f64 {
        let h = |i: usize, j: usize| self.quantum[i][j] + self.thermal[i][j];
        let (a, d, b) = (h(0, 0).re, h(1, 1).re, h(0, 1));
        let mean = 0.5 * (a + d);
        let rad = (0.25 * (a - d).powi(2) + b.norm_sqr()).sqrt();
        // Product form for the small root avoids cancellation.
        let det = a * d - b.norm_sqr();
        if mean > 0.0 {
            det / (mean + rad)
        } else {
            mean - rad
        }
    }
}

/// Weight forms of the amplitude combination and of its phase partner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EprForms {
    pub omega: f64,
    pub amplitude: WeightForm,
    /// Expressed in the same `(w_s, w_d)` as `amplitude`, i.e. already
    /// including the partner's weight swap.
    pub phase: WeightForm,
}

impl EprForms {
    pub fn from_scattering(s: &QuadratureScattering, p: &ResponseParams) -> Self {
        let w = channel_weights(p);
        let rows = |a, b| [row_of(&s.sum_diff, a), row_of(&s.sum_diff, b)];
        let amplitude = WeightForm::from_rows(rows(sd_row::SUM_A, sd_row::DIFF_A), &w);
        let phase = WeightForm::from_rows(rows(sd_row::SUM_PHI, sd_row::DIFF_PHI), &w).swapped();
        Self { omega: s.omega, amplitude, phase }
    }

    pub fn at(p: &ResponseParams, omega: f64) -> Result<Self> {
        Ok(Self::from_scattering(&solve_fluctuations(p, omega)?, p))
    }

    pub fn duan_simon(&self) -> WeightForm {
        self.amplitude.plus(&self.phase)
    }
}

/// Spectral density of one combination, split into quantum and thermal parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EprSpectrum {
    pub omega: f64,
    pub s_q: f64,
    pub s_t: f64,
    pub s_total: f64,
    pub weights: CombinationWeights,
}

impl EprSpectrum {
    fn from_form(omega: f64, form: &WeightForm, weights: CombinationWeights) -> Self {
        let (s_q, s_t) = form.eval(&weights.sum_diff());
        Self { omega, s_q, s_t, s_total: s_q + s_t, weights }
    }
}

/// Spectrum of `β₊ₐ = z₊ b₊ₐ + z₋ b₋ₐ`.
pub fn epr_psd(p: &ResponseParams, omega: f64, w: CombinationWeights) -> Result<EprSpectrum> {
    let f = EprForms::at(p, omega)?;
    Ok(EprSpectrum::from_form(omega, &f.amplitude, w))
}

/// Spectrum of the partner `β_φ₋ = z₋ b₊φ − z₊ b₋φ`.
///
/// Equal to [`epr_psd`] at [`CombinationWeights::BALANCED`]; other weights
/// split the pair whenever `G₊ ≠ G₋`.
pub fn phase_partner_psd(p: &ResponseParams, omega: f64, w: CombinationWeights) -> Result<EprSpectrum> {
    let f = EprForms::at(p, omega)?;
    Ok(EprSpectrum::from_form(omega, &f.phase, w))
}

/// Optimal weights for the amplitude combination at one frequency.
pub fn optimize_forms(forms: &EprForms) -> EprSpectrum {
    let m = optimize::minimize(|w| forms.amplitude.total(&w.sum_diff()));
    EprSpectrum::from_form(forms.omega, &forms.amplitude, m.weights.normalized())
}

pub fn optimize_weights(p: &ResponseParams, omega: f64) -> Result<(CombinationWeights, f64)> {
    let s = optimize_forms(&EprForms::at(p, omega)?);
    Ok((s.weights, s.s_total))
}

pub fn optimized_spectrum(p: &ResponseParams, omega: f64) -> Result<EprSpectrum> {
    Ok(optimize_forms(&EprForms::at(p, omega)?))
}

pub fn optimized_series(p: &ResponseParams, omegas: &[f64], exec: Execution) -> Result<Vec<EprSpectrum>> {
    exec.try_map(omegas, |&w| optimized_spectrum(p, w))
}

/// Verdict of the spectral Duan–Simon test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DuanSimon {
    pub omega: f64,
    pub weights: CombinationWeights,
    pub s_amplitude: f64,
    pub s_phase: f64,
    pub sum: f64,
    /// `2 − sum`; positive when entangled.
    pub margin: f64,
    pub entangled: bool,
}

impl DuanSimon {
    fn from_forms(forms: &EprForms, w: CombinationWeights) -> Self {
        let sd = w.sum_diff();
        let (s_amplitude, s_phase) = (forms.amplitude.total(&sd), forms.phase.total(&sd));
        let sum = s_amplitude + s_phase;
        Self { omega: forms.omega, weights: w, s_amplitude, s_phase, sum, margin: 2.0 - sum, entangled: sum < 2.0 }
    }
}

pub fn duan_simon_check(p: &ResponseParams, omega: f64, w: CombinationWeights) -> Result<DuanSimon> {
    Ok(DuanSimon::from_forms(&EprForms::at(p, omega)?, w))
}

/// Weights minimizing the Duan–Simon sum itself.
pub fn optimize_duan_simon_forms(forms: &EprForms) -> DuanSimon {
    let ds = forms.duan_simon();
    let m = optimize::minimize(|w| ds.total(&w.sum_diff()));
    DuanSimon::from_forms(forms, m.weights.normalized())
}

pub fn optimize_duan_simon(p: &ResponseParams, omega: f64) -> Result<DuanSimon> {
    Ok(optimize_duan_simon_forms(&EprForms::at(p, omega)?))
}

fn sqrt_gap(p: &ResponseParams) -> f64 {
    let (gp, gm) = (p.g_plus().sqrt(), p.g_minus().sqrt());
    if gp + gm > 0.0 {
        p.g_diff / (gp + gm)
    } else {
        0.0
    }
}

/// Zero-frequency estimate of the optimized spectrum,
/// `[γ_m² + (√G₊ − √G₋)⁴]/Γ² + (√G₊ − √G₋)² · 2γ_m(n_T + ½)/Γ²` with
/// `Γ = γ_m + G₊ − G₋`.
pub fn zero_frequency_minimum(p: &ResponseParams) -> Result<f64> {
    let gamma = p.gamma_m0();
    if gamma == 0.0 {
        return Err(Error::SingularResponse { omega: 0.0 });
    }
    let gap_sq = sqrt_gap(p).powi(2);
    let thermal = 2.0 * p.gamma_mech * (p.n_thermal + 0.5);
    Ok((p.gamma_mech.powi(2) + gap_sq * gap_sq) / gamma.powi(2) + gap_sq * thermal / gamma.powi(2))
}

/// Thermal floor `2γ_m(n_T + ½)/(√G₊ + √G₋)²`.
pub fn thermal_floor(p: &ResponseParams) -> f64 {
    2.0 * p.gamma_mech * (p.n_thermal + 0.5) / (p.g_plus().sqrt() + p.g_minus().sqrt()).powi(2)
}

/// Mechanical occupation after optical damping, `γ_m n_T / |Γ_m0|`.
pub fn cooled_occupation(p: &ResponseParams) -> Result<f64> {
    let gamma = p.gamma_m0();
    if gamma == 0.0 {
        return Err(Error::SingularResponse { omega: 0.0 });
    }
    Ok(p.gamma_mech * p.n_thermal / gamma.abs())
}

/// First upward crossing of `level` by `f` on `grid`, bisected in log Ω to
/// relative width `1e-9`.
pub(crate) fn first_crossing(
    grid: &[f64],
    level: f64,
    exec: Execution,
    f: impl Fn(f64) -> Result<f64> + Sync + Send,
) -> Result<Option<f64>> {
    let vals = exec.try_map(grid, |&w| f(w))?;
    let Some(k) = vals.iter().position(|&v| v >= level) else {
        return Ok(None);
    };
    if k == 0 {
        return Ok(Some(grid[0]));
    }
    let (mut lo, mut hi) = (grid[k - 1], grid[k]);
    while hi - lo > 1e-9 * hi {
        let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if f(mid)? >= level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Smallest Ω with `s_min(Ω) = 2 s_min(0)`, searched on the default grid.
pub fn entanglement_bandwidth(p: &ResponseParams) -> Result<f64> {
    entanglement_bandwidth_on(p, &FrequencyGrid::default_for(p).values(), Execution::default())
}

pub fn entanglement_bandwidth_on(p: &ResponseParams, grid: &[f64], exec: Execution) -> Result<f64> {
    let s0 = optimized_spectrum(p, 0.0)?.s_total;
    if s0 >= 0.5 {
        return Err(Error::BandwidthUndefined(format!("s_min(0) = {s0} is not below 1/2")));
    }
    first_crossing(grid, 2.0 * s0, exec, |w| Ok(optimized_spectrum(p, w)?.s_total))?
        .ok_or_else(|| Error::BandwidthUndefined(format!("s_min never reaches {} on the grid", 2.0 * s0)))
}
