//! Back-action-evading force measurement in the symmetric coupling case.
//!
//! Channels are ordered `(ε₊, ε₋, √(2γ_m) qₐ, f)`: the two optical input
//! combinations `ε± = (a₊ₐ ± a₋ₐ)/√2`, the thermal drive and the signal
//! force, which enters with the same prefactor as the thermal drive.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::OptomechSystem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensorParams {
    pub eta: f64,
    pub gamma: f64,
    pub gamma_mech: f64,
    pub c0_sq: f64,
    pub n_thermal: f64,
    /// Spectral density of the ε₊ input (1 for vacuum).
    pub input_psd: f64,
}

impl SensorParams {
    /// Symmetric sensor with the mean pump rate of `sys`: `η² C₀²/γ₀ = G`.
    pub fn from_system(sys: &OptomechSystem, input_psd: f64) -> Result<Self> {
        let gamma = sys.phys.gamma_0;
        let d = &sys.derived;
        let p = Self {
            eta: (d.g_mean.max(0.0) * gamma / d.c0_sq).sqrt(),
            gamma,
            gamma_mech: d.gamma_mech,
            c0_sq: d.c0_sq,
            n_thermal: d.n_thermal,
            input_psd,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [("gamma", self.gamma), ("gamma_mech", self.gamma_mech), ("c0_sq", self.c0_sq)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter { field, reason: format!("must be finite and > 0, got {v}") });
            }
        }
        for (field, v) in [("eta", self.eta), ("n_thermal", self.n_thermal), ("input_psd", self.input_psd)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter { field, reason: format!("must be finite and >= 0, got {v}") });
            }
        }
        Ok(())
    }

    pub fn with_input_psd(&self, input_psd: f64) -> Self {
        Self { input_psd, ..*self }
    }
}

/// Coefficients on `(ε₊, ε₋, √(2γ_m) qₐ, f)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorCoeffs {
    pub eps_plus: C64,
    pub eps_minus: C64,
    pub thermal: C64,
    pub force: C64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorTransfer {
    pub omega: f64,
    pub xi: C64,
    /// Measurement strength `𝒦 = 4γη²C₀²/(γ² + Ω²)`.
    pub k: f64,
    /// Sum combination `δ₋ = ξ ε₋`.
    pub delta_minus: SensorCoeffs,
    /// Difference combination carrying back action, thermal drive and signal.
    pub delta_plus: SensorCoeffs,
}

pub fn sensor_transfer(p: &SensorParams, omega: f64) -> SensorTransfer {
    let zero = C64::new(0.0, 0.0);
    let xi = C64::new(p.gamma, omega) / C64::new(p.gamma, -omega);
    let k = 4.0 * p.gamma * p.eta * p.eta * p.c0_sq / (p.gamma * p.gamma + omega * omega);
    let mech = C64::new(p.gamma_mech, -omega);
    let drive = -(xi * k).sqrt() / mech;
    SensorTransfer {
        omega,
        xi,
        k,
        delta_minus: SensorCoeffs { eps_plus: zero, eps_minus: xi, thermal: zero, force: zero },
        delta_plus: SensorCoeffs { eps_plus: xi, eps_minus: -xi * k / mech, thermal: drive, force: drive },
    }
}

/// `δ_meas = δ₊ + 𝒦 δ₋/(γ_m − iΩ)`: the ε₋ back-action term cancels.
pub fn back_action_evading(p: &SensorParams, omega: f64) -> SensorCoeffs {
    let t = sensor_transfer(p, omega);
    let scale = t.k / C64::new(p.gamma_mech, -omega);
    SensorCoeffs {
        eps_plus: t.delta_plus.eps_plus + scale * t.delta_minus.eps_plus,
        eps_minus: t.delta_plus.eps_minus + scale * t.delta_minus.eps_minus,
        thermal: t.delta_plus.thermal + scale * t.delta_minus.thermal,
        force: t.delta_plus.force + scale * t.delta_minus.force,
    }
}

/// Force-referred noise in units of the thermal drive `√(2γ_m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForceNoise {
    pub omega: f64,
    /// `input_psd · |γ_m − iΩ|²/(2γ_m 𝒦)`.
    pub shot: f64,
    /// `n_T + ½`.
    pub thermal: f64,
    pub total: f64,
}

pub fn force_noise_psd(p: &SensorParams, omega: f64) -> Result<ForceNoise> {
    p.validate()?;
    let c = back_action_evading(p, omega);
    let gain = c.force.norm_sqr();
    if gain == 0.0 {
        return Err(Error::NoSignal);
    }
    let shot = p.input_psd * c.eps_plus.norm_sqr() / gain / (2.0 * p.gamma_mech);
    let thermal = c.thermal.norm_sqr() / gain * (p.n_thermal + 0.5);
    Ok(ForceNoise { omega, shot, thermal, total: shot + thermal })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensorPoint {
    pub omega: f64,
    pub input_psd: f64,
    pub s_force_vacuum: f64,
    pub s_force_entangled: f64,
    pub improvement_ratio: f64,
}

/// Force noise with vacuum input against input spectral density `feed(Ω)`.
pub fn sensor_point(p: &SensorParams, omega: f64, feed: f64) -> Result<SensorPoint> {
    let vacuum = force_noise_psd(&p.with_input_psd(1.0), omega)?;
    let entangled = force_noise_psd(&p.with_input_psd(feed), omega)?;
    Ok(SensorPoint {
        omega,
        input_psd: feed,
        s_force_vacuum: vacuum.total,
        s_force_entangled: entangled.total,
        improvement_ratio: entangled.total / vacuum.total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> SensorParams {
        SensorParams { eta: 1.1, gamma: 3e5, gamma_mech: 1.05, c0_sq: 5.2e11, n_thermal: 1e5, input_psd: 1.0 }
    }

    #[test]
    fn strength_and_phase() {
        let p = base();
        let t = sensor_transfer(&p, 0.0);
        assert!((t.k - 4.0 * p.eta * p.eta * p.c0_sq / p.gamma).abs() < 1e-9 * t.k);
        for &w in &[0.0, 1.0, 3e5, 1e8] {
            assert!((sensor_transfer(&p, w).xi.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn back_action_cancels() {
        let p = base();
        for &w in &[0.0, 0.5, 1e3, 3e5, 1e7] {
            let c = back_action_evading(&p, w);
            let scale = sensor_transfer(&p, w).k / C64::new(p.gamma_mech, -w).norm();
            assert!(c.eps_minus.norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn uncoupled_has_no_signal() {
        let p = SensorParams { eta: 0.0, ..base() };
        let c = back_action_evading(&p, 10.0);
        assert_eq!(c.eps_plus, sensor_transfer(&p, 10.0).xi);
        assert_eq!(c.force.norm(), 0.0);
        assert_eq!(force_noise_psd(&p, 10.0), Err(Error::NoSignal));
    }

    #[test]
    fn shot_term_is_linear_in_input() {
        let p = base();
        let a = force_noise_psd(&p, 100.0).unwrap();
        let b = force_noise_psd(&p.with_input_psd(0.025), 100.0).unwrap();
        assert!((b.shot / a.shot - 0.025).abs() < 1e-14);
        assert_eq!(a.thermal, b.thermal);
        let w = 100.0;
        let k = sensor_transfer(&p, w).k;
        let closed = (p.gamma_mech * p.gamma_mech + w * w) / (2.0 * p.gamma_mech * k);
        assert!((a.shot - closed).abs() < 1e-12 * closed);
        let stronger = SensorParams { eta: p.eta * 2f64.sqrt(), ..p };
        assert!((force_noise_psd(&stronger, w).unwrap().shot / a.shot - 0.5).abs() < 1e-12);
    }
}
