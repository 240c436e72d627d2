//! Mean-field steady states and detuning stability sweeps.

pub mod dopri;
mod model;

use std::collections::VecDeque;
use std::f64::consts::PI;

use nalgebra::SVector;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::params::OptomechSystem;
use dopri::Dopri5;
pub use model::{MeanFieldModel, MeanFieldState, RealJacobian};

/// Initial mechanical amplitude as a fraction of the pump amplitude scale.
pub const SEED_FRACTION: f64 = 1e-3;
/// Default integration budget [s].
pub const DEFAULT_T_END: f64 = 0.1;
const RTOL: f64 = 1e-9;
const TAIL: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    /// Settled: sidebands decayed and `max|ẏ|` per mechanical period below
    /// `1e-8 max|y|`.
    Converged,
    /// Sideband or mechanical amplitude grew 100-fold over its initial value.
    Departed,
    /// Some amplitude exceeded `1e6` times the pump scale.
    Diverged,
    /// Neither settled nor escaped within the time budget.
    Unsettled,
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::Converged => "converged",
            Outcome::Departed => "departed",
            Outcome::Diverged => "diverged",
            Outcome::Unsettled => "unsettled",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub outcome: Outcome,
    pub t: f64,
    pub steps: usize,
    pub state: MeanFieldState,
    /// Last accepted states `(t, state)`, oldest first.
    pub tail: Vec<(f64, MeanFieldState)>,
}

/// Integrate the mean-field flow of `sys` at detuning `delta` from `state0`.
pub fn integrate_mean_field(
    sys: &OptomechSystem,
    delta: f64,
    t_end: f64,
    state0: MeanFieldState,
) -> Result<Trajectory> {
    integrate_model(&MeanFieldModel::new(sys, delta), 2.0 * PI / sys.phys.omega_m, t_end, state0)
}

/// As [`integrate_mean_field`] for an explicit model; `period` is the
/// mechanical period used by the convergence test.
pub fn integrate_model(
    model: &MeanFieldModel,
    period: f64,
    t_end: f64,
    state0: MeanFieldState,
) -> Result<Trajectory> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidParameter { field: "t_end", reason: format!("must be > 0, got {t_end}") });
    }
    if !state0.is_finite() {
        return Err(Error::InvalidParameter { field: "state0", reason: "non-finite amplitude".into() });
    }
    let p0 = state0.perturbation();
    let reference = [model.scale(), state0.max_abs()].into_iter().fold(0.0, f64::max);
    let reference = if reference > 0.0 { reference } else { 1.0 };
    let solver = Dopri5::new(RTOL, 1e-12 * reference);

    let mut tail = VecDeque::with_capacity(TAIL);
    let mut outcome = Outcome::Unsettled;
    let sol = solver.solve(
        |y| model.rhs_real(y),
        state0.to_real(),
        t_end,
        |t, y, dy| {
            let s = MeanFieldState::from_real(y);
            if tail.len() == TAIL {
                tail.pop_front();
            }
            tail.push_back((t, s));
            let p = s.perturbation();
            let size = s.max_abs();
            if size.is_nan() || size > 1e6 * reference {
                outcome = Outcome::Diverged;
                return true;
            }
            if p0 > 0.0 && p > 1e2 * p0 {
                outcome = Outcome::Departed;
                return true;
            }
            let rate = dy.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let decayed = p0 == 0.0 || p < 1e-3 * p0;
            if decayed && rate * period < 1e-8 * size.max(1e-3 * reference) {
                outcome = Outcome::Converged;
                return true;
            }
            false
        },
    )?;
    Ok(Trajectory {
        outcome,
        t: sol.t,
        steps: sol.steps,
        state: MeanFieldState::from_real(&sol.y),
        tail: tail.into_iter().collect(),
    })
}

/// Newton iterations on the algebraic fixed point, kept only while they
/// reduce the residual.
pub fn polish(model: &MeanFieldModel, state: MeanFieldState) -> MeanFieldState {
    let mut best = state;
    let mut best_res = model.residual(&state);
    for _ in 0..8 {
        let f = SVector::<f64, 8>::from(model.rhs_real(&best.to_real()));
        let Some(step) = model.jacobian(&best).lu().solve(&(-f)) else { break };
        let mut y = best.to_real();
        y.iter_mut().zip(step.iter()).for_each(|(v, s)| *v += s);
        let next = MeanFieldState::from_real(&y);
        let res = model.residual(&next);
        if res.is_nan() || res >= best_res {
            break;
        }
        best = next;
        best_res = res;
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SteadyState {
    Stationary { state: MeanFieldState, t: f64, residual: f64 },
    NonStationary { outcome: Outcome, t: f64, tail: Vec<(f64, MeanFieldState)> },
}

impl SteadyState {
    pub fn state(&self) -> Option<&MeanFieldState> {
        match self {
            SteadyState::Stationary { state, .. } => Some(state),
            SteadyState::NonStationary { .. } => None,
        }
    }
}

/// Seeded initial state: empty cavity with a small mechanical amplitude.
/// The sideband and mechanical equations are homogeneous, so a strictly zero
/// start would never probe the stability of the pumped state.
pub fn seeded_state(model: &MeanFieldModel) -> MeanFieldState {
    MeanFieldState { d: C64::new(SEED_FRACTION * model.scale(), 0.0), ..MeanFieldState::ZERO }
}

pub fn steady_state(sys: &OptomechSystem, delta: f64) -> Result<SteadyState> {
    steady_state_within(sys, delta, DEFAULT_T_END)
}

pub fn steady_state_within(sys: &OptomechSystem, delta: f64, t_end: f64) -> Result<SteadyState> {
    let model = MeanFieldModel::new(sys, delta);
    let traj = integrate_mean_field(sys, delta, t_end, seeded_state(&model))?;
    Ok(match traj.outcome {
        Outcome::Converged => {
            let state = polish(&model, traj.state);
            SteadyState::Stationary { state, t: traj.t, residual: model.residual(&state) }
        }
        outcome => SteadyState::NonStationary { outcome, t: traj.t, tail: traj.tail },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobianSpectrum {
    pub eigenvalues: Vec<C64>,
    pub leading_real: f64,
    pub stable: bool,
}

/// Eigenvalues of the linearized flow at a fixed point, sorted by
/// decreasing real part.
pub fn jacobian_eigenvalues(sys: &OptomechSystem, delta: f64, state: &MeanFieldState) -> Result<JacobianSpectrum> {
    model_spectrum(&MeanFieldModel::new(sys, delta), state)
}

pub fn model_spectrum(model: &MeanFieldModel, state: &MeanFieldState) -> Result<JacobianSpectrum> {
    let residual = model.residual(state);
    if residual.is_nan() || residual > 1e-8 {
        return Err(Error::NotFixedPoint { residual });
    }
    let mut eigenvalues: Vec<C64> = model.jacobian(state).complex_eigenvalues().iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
    let leading_real = eigenvalues[0].re;
    Ok(JacobianSpectrum { eigenvalues, leading_real, stable: leading_real < 0.0 })
}

/// Leading real part at the pumped state with empty sidebands.
pub fn leading_real(sys: &OptomechSystem, delta: f64) -> Result<f64> {
    let model = MeanFieldModel::new(sys, delta);
    Ok(model_spectrum(&model, &model.trivial_state())?.leading_real)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityPoint {
    pub detuning: f64,
    pub detuning_over_gamma0: f64,
    /// Steady-state pump rates; NaN without a stationary state.
    pub g_mean: f64,
    pub g_diff: f64,
    /// `n_coherent + n_thermal`.
    pub n_d: f64,
    /// `|d_ss|²`.
    pub n_coherent: f64,
    /// `γ_m n_T / |Γ_m0|` at the steady-state pump rates.
    pub n_thermal: f64,
    /// Jacobian verdict, `leading_real < 0`.
    pub stable: bool,
    pub leading_real: f64,
    pub outcome: Outcome,
}

impl StabilityPoint {
    /// Time-domain verdict: the seeded trajectory settled.
    pub fn time_domain_stable(&self) -> bool {
        self.outcome == Outcome::Converged
    }

    pub fn verdicts_agree(&self) -> bool {
        self.stable == self.time_domain_stable()
    }
}

pub fn stability_point(sys: &OptomechSystem, delta: f64) -> Result<StabilityPoint> {
    let lead = leading_real(sys, delta)?;
    let ss = steady_state(sys, delta)?;
    let model = MeanFieldModel::new(sys, delta);
    let (outcome, g_mean, g_diff, n_coherent, n_thermal) = match &ss {
        SteadyState::Stationary { state, .. } => {
            let (gp, gm) = model.pump_rates(state);
            let gamma_m0 = sys.derived.gamma_mech + gp - gm;
            let thermal = sys.derived.gamma_mech * sys.derived.n_thermal / gamma_m0.abs();
            (Outcome::Converged, 0.5 * (gp + gm), gp - gm, state.d.norm_sqr(), thermal)
        }
        SteadyState::NonStationary { outcome, .. } => (*outcome, f64::NAN, f64::NAN, f64::NAN, f64::NAN),
    };
    Ok(StabilityPoint {
        detuning: delta,
        detuning_over_gamma0: delta / sys.phys.gamma_0,
        g_mean,
        g_diff,
        n_d: n_coherent + n_thermal,
        n_coherent,
        n_thermal,
        stable: lead < 0.0,
        leading_real: lead,
        outcome,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilitySweep {
    pub points: Vec<StabilityPoint>,
    /// First sign change of `leading_real` along the sweep, bisected.
    pub threshold: Option<f64>,
}

pub fn detuning_sweep(sys: &OptomechSystem, detunings: &[f64], exec: Execution) -> Result<StabilitySweep> {
    if detunings.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidParameter { field: "detuning", reason: "non-finite detuning".into() });
    }
    let points = exec.try_map(detunings, |&d| stability_point(sys, d))?;
    let threshold = match points.windows(2).find(|w| w[0].stable != w[1].stable) {
        Some(w) => Some(bisect_threshold(sys, w[0].detuning, w[1].detuning)?),
        None => None,
    };
    Ok(StabilitySweep { points, threshold })
}

/// Sign change of `leading_real` between `a` and `b`, to relative width 1e-4.
pub fn bisect_threshold(sys: &OptomechSystem, a: f64, b: f64) -> Result<f64> {
    let stable_a = leading_real(sys, a)? < 0.0;
    let (mut lo, mut hi) = (a, b);
    while (hi - lo).abs() > 1e-4 * hi.abs().max(lo.abs()) {
        let mid = 0.5 * (lo + hi);
        if (leading_real(sys, mid)? < 0.0) == stable_a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Evenly spaced detunings `Δ₀/γ₀ ∈ [from, to]`.
pub fn detuning_grid(sys: &OptomechSystem, from: f64, to: f64, n: usize) -> Vec<f64> {
    let g0 = sys.phys.gamma_0;
    match n {
        0 => vec![],
        1 => vec![from * g0],
        _ => (0..n).map(|k| g0 * (from + (to - from) * k as f64 / (n - 1) as f64)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{ParamSpec, PhysicalParams};

    fn table1() -> OptomechSystem {
        ParamSpec::table1().build().unwrap()
    }

    #[test]
    fn zero_detuning_is_stable_and_settles() {
        let sys = table1();
        let p = stability_point(&sys, 0.0).unwrap();
        assert!(p.stable && p.verdicts_agree(), "{p:?}");
        assert!(((p.g_mean - sys.derived.g_mean) / sys.derived.g_mean).abs() < 1e-6);
        assert!(((p.g_diff - sys.derived.g_diff) / sys.derived.g_diff).abs() < 1e-6);
    }

    #[test]
    fn large_detuning_is_unstable() {
        let sys = table1();
        let p = stability_point(&sys, 0.1 * sys.phys.gamma_0).unwrap();
        assert!(!p.stable && p.verdicts_agree(), "{p:?}");
        assert!(p.g_mean.is_nan());
    }

    #[test]
    fn uncoupled_cavity_is_linear() {
        let sys = OptomechSystem::new(PhysicalParams { eta_p: 0.0, eta_m: 0.0, ..table1().phys }).unwrap();
        let delta = 0.2 * sys.phys.gamma_0;
        let model = MeanFieldModel::new(&sys, delta);
        let expect = model.drive / C64::new(sys.phys.gamma_0, -delta);
        let traj = integrate_mean_field(&sys, delta, 1.0, MeanFieldState::ZERO).unwrap();
        assert_eq!(traj.outcome, Outcome::Converged);
        let state = polish(&model, traj.state);
        assert!((state.c0 - expect).norm() < 1e-12 * expect.norm());
        assert_eq!(state.perturbation(), 0.0);
        let spec = jacobian_eigenvalues(&sys, delta, &model.trivial_state()).unwrap();
        let mut re: Vec<f64> = spec.eigenvalues.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        let mut want = vec![-3e5; 6];
        want.extend([-sys.derived.gamma_mech; 2]);
        want.sort_by(f64::total_cmp);
        for (a, b) in re.iter().zip(&want) {
            assert!((a - b).abs() < 1e-6 * b.abs(), "{re:?}");
        }
        assert!(spec.eigenvalues.iter().filter(|z| z.re < -10.0).all(|z| (z.im.abs() - delta).abs() < 1e-6 * delta));
    }

    #[test]
    fn undriven_decays() {
        let model = MeanFieldModel { drive: 0.0, ..MeanFieldModel::new(&table1(), 0.0) };
        let start = MeanFieldState {
            c0: C64::new(1.0, 0.0),
            cp: C64::new(0.5, 0.0),
            cm: C64::new(0.0, 0.5),
            ..MeanFieldState::ZERO
        };
        let traj = integrate_model(&model, 5e-7, 1.0, start).unwrap();
        assert_eq!(traj.outcome, Outcome::Converged);
        assert!(traj.state.max_abs() < 1e-5, "{:?}", traj.state);
    }

    #[test]
    fn non_fixed_point_rejected() {
        let sys = table1();
        let bad = MeanFieldState { c0: C64::new(1.0, 0.0), ..MeanFieldState::ZERO };
        assert_eq!(jacobian_eigenvalues(&sys, 0.0, &bad).unwrap_err().kind(), "not-fixed-point");
    }
}
