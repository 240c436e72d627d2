//! Non-degenerate χ⁽²⁾ parametric amplifier used as a reference for the
//! depth/bandwidth trade-off.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OpaParams {
    pub gamma_1: f64,
    pub gamma_2: f64,
    pub g_par: f64,
}

impl OpaParams {
    pub fn new(gamma_1: f64, gamma_2: f64, g_par: f64) -> Result<Self> {
        let p = Self { gamma_1, gamma_2, g_par };
        p.validate()?;
        Ok(p)
    }

    /// Gain giving a zero-frequency minimum of `s_min`.
    pub fn matched_depth(gamma_1: f64, gamma_2: f64, s_min: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s_min) || s_min == 0.0 {
            return Err(Error::InvalidParameter { field: "s_min", reason: format!("need 0 < s_min <= 1, got {s_min}") });
        }
        let r = (gamma_1 * gamma_2).sqrt();
        let root = s_min.sqrt();
        Self::new(gamma_1, gamma_2, r * (1.0 - root) / (1.0 + root))
    }

    pub fn threshold(&self) -> f64 {
        (self.gamma_1 * self.gamma_2).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [("gamma_1", self.gamma_1), ("gamma_2", self.gamma_2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter { field, reason: format!("must be finite and > 0, got {v}") });
            }
        }
        if !(self.g_par.is_finite() && self.g_par >= 0.0) {
            return Err(Error::InvalidParameter { field: "g_par", reason: format!("must be >= 0, got {}", self.g_par) });
        }
        if self.g_par >= self.threshold() {
            return Err(Error::AboveThreshold { g_par: self.g_par, threshold: self.threshold() });
        }
        Ok(())
    }
}

/// Spectrum of the symmetric output combination (identical for g₊ and g₋).
pub fn opa_psd(p: &OpaParams, omega: f64) -> Result<f64> {
    p.validate()?;
    let (g1, g2, g) = (p.gamma_1, p.gamma_2, p.g_par);
    let r = p.threshold();
    let w2 = omega * omega;
    let num = ((r - g).powi(2) + w2).powi(2) + w2 * (g1 - g2).powi(2);
    // γ₁γ₂ − G² written as (r − G)(r + G) so that Ω = 0 reproduces the
    // closed-form minimum to rounding.
    let den = ((r - g) * (r + g) - w2).powi(2) + w2 * (g1 + g2).powi(2);
    Ok(num / den)
}

/// `((√(γ₁γ₂) − G)/(√(γ₁γ₂) + G))²`.
pub fn opa_minimum(p: &OpaParams) -> Result<f64> {
    p.validate()?;
    let r = p.threshold();
    Ok(((r - p.g_par) / (r + p.g_par)).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OpaBandwidth {
    pub s_min: f64,
    pub analytic: f64,
    /// First Ω with `s_g = 2 s_min`; NaN when not applicable.
    pub numeric: f64,
    /// False when `2 s_min ≥ 1`, where the doubling criterion has no meaning.
    pub applicable: bool,
}

pub fn opa_bandwidth(p: &OpaParams) -> Result<OpaBandwidth> {
    let s_min = opa_minimum(p)?;
    let (g1, g2) = (p.gamma_1, p.gamma_2);
    let x = 4.0 * g1 * g2 * s_min.sqrt() / (g1 + g2);
    let analytic = x * (1.0 - x / (g1 + g2));
    let level = 2.0 * s_min;
    if level >= 1.0 {
        return Ok(OpaBandwidth { s_min, analytic, numeric: f64::NAN, applicable: false });
    }
    let r = p.threshold();
    let n = 4000;
    let grid: Vec<f64> = (0..n).map(|k| r * 1e-8 * 1e16f64.powf(k as f64 / (n - 1) as f64)).collect();
    let mut prev = 0.0;
    for &w in &grid {
        if opa_psd(p, w)? >= level {
            let (mut lo, mut hi) = (prev, w);
            while hi - lo > 1e-13 * hi {
                let mid = 0.5 * (lo + hi);
                if opa_psd(p, mid)? >= level {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(OpaBandwidth { s_min, analytic, numeric: 0.5 * (lo + hi), applicable: true });
        }
        prev = w;
    }
    Ok(OpaBandwidth { s_min, analytic, numeric: f64::NAN, applicable: false })
}

/// Bandwidths over gains given as fractions of threshold.
pub fn gain_sweep(gamma_1: f64, gamma_2: f64, fractions: &[f64]) -> Result<Vec<(OpaParams, OpaBandwidth)>> {
    let r = (gamma_1 * gamma_2).sqrt();
    fractions
        .iter()
        .map(|&f| {
            let p = OpaParams::new(gamma_1, gamma_2, f * r)?;
            Ok((p, opa_bandwidth(&p)?))
        })
        .collect()
}
