//! Two-carrier local-oscillator ("synodyne") detection with constant weights.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::entanglement::{
    epr_psd, first_crossing, optimized_spectrum, zero_frequency_minimum, CombinationWeights,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::FrequencyGrid;
use crate::linear_response::susceptibilities;
use crate::params::ResponseParams;

/// Complex carrier amplitudes at ω₊ and ω₋; only their ratio matters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalOscillator {
    pub amp_p: C64,
    pub amp_m: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QuadratureKind {
    Amplitude,
    Phase,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasuredCombination {
    pub kind: QuadratureKind,
    pub weights: CombinationWeights,
}

/// Which combination the slowly varying photocurrent
/// `A₊* b₊ + A₊ b₊† + A₋* b₋ + A₋ b₋†` measures.
pub fn photocurrent_weights(lo: &LocalOscillator) -> Result<MeasuredCombination> {
    let (a, b) = (lo.amp_p, lo.amp_m);
    if !(a.is_finite() && b.is_finite()) || (a.norm() == 0.0 && b.norm() == 0.0) {
        return Err(Error::InvalidParameter {
            field: "local_oscillator",
            reason: "amplitudes must be finite and not both zero".into(),
        });
    }
    let live = [a, b].into_iter().filter(|z| z.norm() > 0.0);
    let kind = if live.clone().all(|z| z.im == 0.0) {
        QuadratureKind::Amplitude
    } else if live.clone().all(|z| z.re == 0.0) {
        QuadratureKind::Phase
    } else {
        QuadratureKind::Mixed
    };
    let phi = if a.norm() > 0.0 && b.norm() > 0.0 { b.arg() - a.arg() } else { 0.0 };
    let weights = CombinationWeights::new(a.norm().atan2(b.norm()), phi).normalized();
    Ok(MeasuredCombination { kind, weights })
}

/// Closed-form spectrum of the balanced amplitude combination `z± = 1/√2`.
pub fn synodyne_psd(p: &ResponseParams, omega: f64) -> Result<f64> {
    let t = susceptibilities(p, omega)?;
    let i = C64::i();
    let (gp, gm) = (t.gamma_p, t.gamma_m_rate);
    let delta = ((1.0 + t.xi_p.conj()) * (1.0 + t.xi_m)).sqrt() - 2.0;
    let den = t.gamma_mech_eff - i * omega;
    let gamma_mech = C64::from(p.gamma_mech);
    let first = (gamma_mech - (gp.conj().sqrt() - gm.sqrt()).powi(2) - i * omega
        + delta * (gp.conj() * gm).sqrt())
        / den;
    let second = (gamma_mech + (gp.sqrt() - gm.conj().sqrt()).powi(2) - i * omega
        - delta.conj() * (gp * gm.conj()).sqrt())
        / den;
    let thermal = (-(1.0 + t.xi_p).sqrt() * gp.sqrt() + (1.0 + t.xi_m).sqrt() * gm.sqrt()) / den;
    Ok(0.5 * first.norm_sqr()
        + 0.5 * second.norm_sqr()
        + p.gamma_mech * (p.n_thermal + 0.5) * thermal.norm_sqr())
}

/// The same combination evaluated from the direct solve.
pub fn synodyne_direct(p: &ResponseParams, omega: f64) -> Result<f64> {
    Ok(epr_psd(p, omega, CombinationWeights::BALANCED)?.s_total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SynodynePoint {
    pub omega: f64,
    pub s_syno: f64,
    pub s_opt_reference: f64,
}

pub fn synodyne_series(p: &ResponseParams, omegas: &[f64], exec: Execution) -> Result<Vec<SynodynePoint>> {
    exec.try_map(omegas, |&omega| {
        Ok(SynodynePoint {
            omega,
            s_syno: synodyne_psd(p, omega)?,
            s_opt_reference: optimized_spectrum(p, omega)?.s_total,
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SynodyneBandwidth {
    /// `(√G₊ − √G₋) √(2γ_m(n_T + ½))`.
    pub analytic: f64,
    /// First Ω with `s_syno(Ω) = 2 s_min0`.
    pub numeric: f64,
}

pub fn synodyne_bandwidth(p: &ResponseParams) -> Result<SynodyneBandwidth> {
    synodyne_bandwidth_on(p, &FrequencyGrid::default_for(p).values(), Execution::default())
}

pub fn synodyne_bandwidth_on(p: &ResponseParams, grid: &[f64], exec: Execution) -> Result<SynodyneBandwidth> {
    let s0 = synodyne_psd(p, 0.0)?;
    if s0 >= 0.5 {
        return Err(Error::BandwidthUndefined(format!("s_syno(0) = {s0} is not below 1/2")));
    }
    let level = 2.0 * zero_frequency_minimum(p)?;
    let numeric = first_crossing(grid, level, exec, |w| synodyne_psd(p, w))?
        .ok_or_else(|| Error::BandwidthUndefined(format!("s_syno never reaches {level} on the grid")))?;
    let gap = p.g_diff / (p.g_plus().sqrt() + p.g_minus().sqrt());
    let analytic = gap * (2.0 * p.gamma_mech * (p.n_thermal + 0.5)).sqrt();
    Ok(SynodyneBandwidth { analytic, numeric })
}
