//! Quick invariant suites run by the `selftest` command.

use serde::Serialize;

use crate::entanglement::{epr_psd, optimize_duan_simon, optimized_spectrum, CombinationWeights};
use crate::error::Result;
use crate::exec::Execution;
use crate::grid::{FrequencyGrid, Spacing};
use crate::linear_response::{check_commutators, map_discrepancy, scattering_from_formulas, solve_fluctuations, susceptibilities};
use crate::parametric_ref::{opa_minimum, opa_psd, OpaParams};
use crate::params::{ParamSpec, ResponseParams};
use crate::stability::stability_point;
use crate::synodyne::{synodyne_direct, synodyne_psd};
use crate::variational_sensor::{back_action_evading, sensor_transfer, SensorParams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn suite(name: &'static str, run: impl FnOnce() -> Result<(bool, String)>) -> SuiteResult {
    match run() {
        Ok((passed, detail)) => SuiteResult { name, passed, detail },
        Err(e) => SuiteResult { name, passed: false, detail: format!("error: {e}") },
    }
}

fn fig1() -> Result<ResponseParams> {
    Ok(ParamSpec::fig1().build()?.response())
}

fn grid(p: &ResponseParams, points: usize) -> Result<Vec<f64>> {
    let g = FrequencyGrid::default_for(p);
    Ok(FrequencyGrid::new(g.omega_min, g.omega_max, points, Spacing::Log)?.values())
}

fn max_over(xs: &[f64], f: impl Fn(f64) -> Result<f64> + Sync + Send) -> Result<f64> {
    let vals = Execution::default().try_map(xs, |&w| f(w))?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

pub fn run_all() -> Vec<SuiteResult> {
    vec![
        suite("vacuum-identity", || {
            let p = fig1()?.decoupled();
            let err = max_over(&grid(&p, 40)?, |w| {
                let a = epr_psd(&p, w, CombinationWeights::new(0.3, 1.1))?.s_total;
                let b = synodyne_psd(&p, w)?;
                Ok((a - 1.0).abs().max((b - 1.0).abs()))
            })?;
            Ok((err <= 1e-12, format!("max |S - 1| = {err:.3e}")))
        }),
        suite("formula-vs-direct", || {
            let p = fig1()?;
            let err = max_over(&grid(&p, 40)?, |w| {
                let direct = solve_fluctuations(&p, w)?;
                Ok(map_discrepancy(&scattering_from_formulas(&susceptibilities(&p, w)?).map, &direct.map))
            })?;
            Ok((err <= 1e-9, format!("max relative discrepancy = {err:.3e}")))
        }),
        suite("commutators", || {
            let p = fig1()?;
            let err = max_over(&grid(&p, 40)?, |w| Ok(check_commutators(&solve_fluctuations(&p, w)?, p.gamma_mech).max_scaled))?;
            Ok((err <= 1e-10, format!("max scaled residual = {err:.3e}")))
        }),
        suite("synodyne-closed-form", || {
            let p = fig1()?;
            let err = max_over(&grid(&p, 40)?, |w| {
                let (a, b) = (synodyne_psd(&p, w)?, synodyne_direct(&p, w)?);
                Ok(((a - b) / b).abs())
            })?;
            Ok((err <= 1e-6, format!("max relative difference = {err:.3e}")))
        }),
        suite("optimum-below-fixed-weights", || {
            let p = fig1()?;
            let worst = Execution::default()
                .try_map(&grid(&p, 20)?, |&w| Ok(optimized_spectrum(&p, w)?.s_total - synodyne_psd(&p, w)?))?
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max);
            Ok((worst <= 1e-9, format!("max s_opt - s_syno = {worst:.3e}")))
        }),
        suite("no-entanglement-balanced-pump", || {
            let p = fig1()?.with_pump(fig1()?.g_mean, 0.0);
            let low = Execution::default()
                .try_map(&grid(&p, 20)?, |&w| Ok(optimize_duan_simon(&p, w)?.sum))?
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            Ok((low >= 2.0 - 1e-9, format!("min Duan-Simon sum = {low:.15}")))
        }),
        suite("parametric-reference", || {
            let p = OpaParams::new(1.0, 1.0, 0.5)?;
            let (a, b) = (opa_minimum(&p)?, opa_psd(&p, 0.0)?);
            Ok(((a - 1.0 / 9.0).abs() < 1e-15 && a == b, format!("s_min = {a}")))
        }),
        suite("back-action-evasion", || {
            let sys = ParamSpec::fig1().build()?;
            let p = SensorParams::from_system(&sys, 1.0)?;
            let err = max_over(&grid(&sys.response(), 40)?, |w| {
                let scale = sensor_transfer(&p, w).k / (p.gamma_mech.powi(2) + w * w).sqrt();
                Ok(back_action_evading(&p, w).eps_minus.norm() / scale)
            })?;
            Ok((err <= 1e-12, format!("max relative back action = {err:.3e}")))
        }),
        suite("zero-detuning-stability", || {
            let sys = ParamSpec::table1().build()?;
            let pt = stability_point(&sys, 0.0)?;
            let ok = pt.stable && pt.verdicts_agree();
            Ok((ok, format!("leading real part = {:.6e} s^-1, outcome {:?}", pt.leading_real, pt.outcome)))
        }),
    ]
}
