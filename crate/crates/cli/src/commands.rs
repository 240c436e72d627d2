//! Table builders, one per subcommand.

use optoent::entanglement::{entanglement_bandwidth, optimized_series, optimized_spectrum, thermal_floor};
use optoent::exec::Execution;
use optoent::grid::FrequencyGrid;
use optoent::output::Table;
use optoent::parametric_ref::{opa_bandwidth, OpaParams};
use optoent::selftest::run_all;
use optoent::stability::{detuning_grid, detuning_sweep};
use optoent::synodyne::{synodyne_bandwidth, synodyne_series};
use optoent::variational_sensor::{force_noise_psd, sensor_point, SensorParams};

use crate::{CliResult, Resolved};

/// Pump imbalances for the optimal-angle table, in units of γ_m.
const ANGLE_IMBALANCES: [f64; 3] = [1e3, 1e4, 1e5];
/// Input power multiples for the parametric comparison.
const POWER_SPAN: f64 = 5.0;

pub fn spectrum(r: &Resolved, grid: &FrequencyGrid) -> CliResult<Table> {
    let p = r.sys.response();
    let series = optimized_series(&p, &grid.values(), Execution::default())?;
    let mut t = Table::new(&["omega_rad_s", "s_opt", "s_quantum", "s_thermal", "theta", "phi", "sql"]);
    t.meta("g_mean_s", p.g_mean).meta("g_diff_s", p.g_diff).meta("thermal_floor", thermal_floor(&p));
    for s in series {
        t.push(vec![
            s.omega.into(),
            s.s_total.into(),
            s.s_q.into(),
            s.s_t.into(),
            s.weights.theta.into(),
            s.weights.phi.into(),
            1.0.into(),
        ]);
    }
    Ok(t)
}

pub fn optimal_angles(r: &Resolved, grid: &FrequencyGrid) -> CliResult<Table> {
    let gm = r.sys.derived.gamma_mech;
    let g_mean = r.sys.derived.g_mean;
    let omegas = grid.values();
    let mut t = Table::new(&["g_diff_over_gamma_m", "omega_rad_s", "theta", "phi", "s_opt"]);
    t.meta("g_mean_s", g_mean);
    for k in ANGLE_IMBALANCES {
        let sys = r.sys.with_pump_targets(g_mean, k * gm)?;
        for s in optimized_series(&sys.response(), &omegas, Execution::default())? {
            t.push(vec![k.into(), s.omega.into(), s.weights.theta.into(), s.weights.phi.into(), s.s_total.into()]);
        }
    }
    Ok(t)
}

/// Optimal and synodyne spectra at the resolved pump, plus synodyne with
/// the imbalance raised to γ₀.
pub fn synodyne(r: &Resolved, grid: &FrequencyGrid) -> CliResult<Table> {
    let p = r.sys.response();
    let wide = r.sys.with_pump_targets(r.sys.derived.g_mean, r.sys.phys.gamma_0)?.response();
    let omegas = grid.values();
    let base = synodyne_series(&p, &omegas, Execution::default())?;
    let broad = synodyne_series(&wide, &omegas, Execution::default())?;
    let bw = synodyne_bandwidth(&p)?;
    let mut t = Table::new(&["omega_rad_s", "s_opt", "s_syno", "s_syno_wide", "sql"]);
    t.meta("g_mean_s", p.g_mean)
        .meta("g_diff_s", p.g_diff)
        .meta("g_diff_wide_s", wide.g_diff)
        .meta("syno_bandwidth_analytic_rad_s", bw.analytic)
        .meta("syno_bandwidth_numeric_rad_s", bw.numeric);
    for (a, b) in base.iter().zip(&broad) {
        t.push(vec![a.omega.into(), a.s_opt_reference.into(), a.s_syno.into(), b.s_syno.into(), 1.0.into()]);
    }
    Ok(t)
}

/// Input power stepped over `[P, 5P]`; each row pairs the optomechanical
/// spectrum with a degenerate amplifier of the same depth and cavity rate.
pub fn compare_opa(r: &Resolved, points: usize) -> CliResult<Table> {
    let p0 = r.sys.phys.p_in;
    let g0 = r.sys.phys.gamma_0;
    let powers: Vec<f64> = (0..points.max(2))
        .map(|k| p0 * (1.0 + (POWER_SPAN - 1.0) * k as f64 / (points.max(2) - 1) as f64))
        .collect();
    let rows = Execution::default().try_map(&powers, |&pw| -> CliResult<_> {
        let p = r.sys.with_power(pw)?.response();
        let s_min = optimized_spectrum(&p, 0.0)?.s_total;
        let width = entanglement_bandwidth(&p)?;
        let opa = OpaParams::matched_depth(g0, g0, s_min)?;
        let ob = opa_bandwidth(&opa)?;
        Ok(vec![
            pw.into(),
            p.g_mean.into(),
            s_min.into(),
            width.into(),
            opa.g_par.into(),
            ob.analytic.into(),
            ob.numeric.into(),
        ])
    })?;
    let mut t = Table::new(&[
        "p_in_w",
        "g_mean_s",
        "s_min",
        "bandwidth_optomech_rad_s",
        "opa_gain_s",
        "opa_bandwidth_analytic_rad_s",
        "opa_bandwidth_numeric_rad_s",
    ]);
    t.meta("opa_gamma_s", g0);
    for row in rows {
        t.push(row);
    }
    Ok(t)
}

pub fn sensor(r: &Resolved, grid: &FrequencyGrid, optimal_weights: bool) -> CliResult<Table> {
    let p = r.sys.response();
    let omegas = grid.values();
    let feed: Vec<f64> = if optimal_weights {
        optimized_series(&p, &omegas, Execution::default())?.into_iter().map(|s| s.s_total).collect()
    } else {
        synodyne_series(&p, &omegas, Execution::default())?.into_iter().map(|s| s.s_syno).collect()
    };
    let sp = SensorParams::from_system(&r.sys, 1.0)?;
    let mut t = Table::new(&[
        "omega_rad_s",
        "input_psd",
        "s_force_vacuum",
        "s_force_entangled",
        "improvement_ratio",
        "shot_vacuum",
        "shot_entangled",
        "thermal",
    ]);
    t.meta("feed", if optimal_weights { "optimal weights" } else { "synodyne" }).meta("sensor_eta", sp.eta);
    for (&w, &f) in omegas.iter().zip(&feed) {
        let s = sensor_point(&sp, w, f)?;
        let vac = force_noise_psd(&sp, w)?;
        let ent = force_noise_psd(&sp.with_input_psd(f), w)?;
        t.push(vec![
            s.omega.into(),
            s.input_psd.into(),
            s.s_force_vacuum.into(),
            s.s_force_entangled.into(),
            s.improvement_ratio.into(),
            vac.shot.into(),
            ent.shot.into(),
            ent.thermal.into(),
        ]);
    }
    Ok(t)
}

pub fn stability_sweep(r: &Resolved, from: f64, to: f64, points: usize) -> CliResult<Table> {
    let detunings = detuning_grid(&r.sys, from, to, points.max(2));
    let sweep = detuning_sweep(&r.sys, &detunings, Execution::default())?;
    let mut t = Table::new(&[
        "detuning_rad_s",
        "detuning_over_gamma0",
        "g_mean_s",
        "g_diff_s",
        "n_d",
        "n_coherent",
        "n_thermal",
        "stable",
        "leading_real_s",
        "outcome",
        "verdicts_agree",
    ]);
    let threshold = sweep.threshold.map_or(f64::NAN, |d| d / r.sys.phys.gamma_0);
    t.meta("threshold_over_gamma0", threshold)
        .meta("n_d_model", "|d_ss|^2 + gamma_m n_T / |Gamma_m0|, linearized cooled occupation")
        .meta("non_stationary_rows", "G and n_d reported as NaN");
    for s in sweep.points {
        t.push(vec![
            s.detuning.into(),
            s.detuning_over_gamma0.into(),
            s.g_mean.into(),
            s.g_diff.into(),
            s.n_d.into(),
            s.n_coherent.into(),
            s.n_thermal.into(),
            s.stable.into(),
            s.leading_real.into(),
            s.outcome.label().into(),
            s.verdicts_agree().into(),
        ]);
    }
    Ok(t)
}

pub fn selftest() -> (Table, bool) {
    let results = run_all();
    let mut t = Table::new(&["suite", "passed", "detail"]);
    t.meta("command", "selftest");
    let passed = results.iter().all(|r| r.passed);
    for r in results {
        t.push(vec![r.name.into(), r.passed.into(), r.detail.replace(',', ";").as_str().into()]);
    }
    (t, passed)
}
