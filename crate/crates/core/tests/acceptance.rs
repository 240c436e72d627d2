//! Release criteria. Prints one line per criterion and exits non-zero if any
//! criterion fails other than those in `EXPECTED_FAILURES`.

mod common;

use std::time::Instant;

use num_complex::Complex64 as C64;
use optoent::entanglement::{
    cooled_occupation, entanglement_bandwidth, epr_psd, optimize_duan_simon, optimized_spectrum,
    phase_partner_psd, thermal_floor, CombinationWeights, EprForms,
};
use optoent::exec::Execution;
use optoent::grid::FrequencyGrid;
use optoent::linear_response::{
    check_commutators, map_discrepancy, scattering_from_formulas, single_mode_psd, solve_fluctuations,
    susceptibilities,
};
use optoent::parametric_ref::{gain_sweep, opa_minimum, opa_psd, OpaParams};
use optoent::params::{ParamSpec, ResponseParams};
use optoent::stability::{detuning_grid, detuning_sweep};
use optoent::synodyne::{synodyne_bandwidth, synodyne_psd};
use optoent::variational_sensor::{back_action_evading, sensor_transfer, SensorParams};
use rand::Rng;

/// Criteria that cannot be met by the model at their pinned tolerance. They
/// are still evaluated and reported as FAIL.
const EXPECTED_FAILURES: &[usize] = &[3];

struct Verdict {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Verdict);

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn grid(p: &ResponseParams) -> Vec<f64> {
    FrequencyGrid::default_for(p).values()
}

fn c01_thermal_floor() -> Verdict {
    let p = common::fig1();
    let start = Instant::now();
    let s = optimized_spectrum(&p, 0.0).unwrap().s_total;
    let secs = start.elapsed().as_secs_f64();
    let floor = thermal_floor(&p);
    let rel = (s - floor).abs() / floor;
    verdict(rel < 0.10 && secs < 1.0, format!("s_opt(0) = {s:.6}, floor = {floor:.6}, rel diff {rel:.3e} (< 0.10), {secs:.3} s (< 1 s)"))
}

fn c02_duan_simon() -> Verdict {
    let p = common::fig1();
    let omegas = grid(&p);
    let start = Instant::now();
    let sums = Execution::default().try_map(&omegas, |&w| Ok::<_, optoent::Error>(optimize_duan_simon(&p, w)?.sum)).unwrap();
    let edge = entanglement_bandwidth(&p).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let below: Vec<bool> = sums.iter().map(|&s| s < 2.0).collect();

    let contiguous = below[0] && below.iter().skip_while(|&&b| b).all(|&b| !b);
    let last = below.iter().rposition(|&b| b).map_or(f64::NAN, |k| omegas[k]);
    let g0 = 3e5;
    let within = edge >= 0.5 * g0 && edge <= 2.0 * g0;
    verdict(
        contiguous && within && secs < 10.0,
        format!(
            "minimized sum < 2 on one contiguous band from {:.3e} to {last:.3e} rad/s; optimal-weight band edge {edge:.4e} (gamma0 x [0.5, 2]); {secs:.2} s (< 10 s)",
            omegas[0]
        ),
    )
}

fn c03_zero_frequency_coincidence() -> Verdict {
    let p = common::fig1();
    let w = 1e-3 * p.gamma_mech;
    let opt = optimized_spectrum(&p, w).unwrap().s_total;
    let syno = synodyne_psd(&p, w).unwrap();
    let rel = (syno - opt).abs() / opt;
    verdict(rel < 1e-3, format!("s_syno = {syno:.6}, s_opt = {opt:.6}, rel diff {rel:.3e} (< 1e-3)"))
}

fn c04_synodyne_bandwidth() -> Verdict {
    let p = common::fig1();
    let bw = synodyne_bandwidth(&p).unwrap();
    let opt = entanglement_bandwidth(&p).unwrap();
    let ratio = bw.numeric / bw.analytic;
    verdict(
        (0.5..=2.0).contains(&ratio) && bw.numeric < opt,
        format!("numeric {:.4e}, analytic {:.4e} (ratio {ratio:.3}, in [0.5, 2]); optimal {opt:.4e} > numeric", bw.numeric, bw.analytic),
    )
}

fn c05_no_entanglement() -> Verdict {
    let base = common::fig1();
    let p = base.with_pump(base.g_mean, 0.0);
    let omegas = grid(&p);
    let sums = Execution::default().try_map(&omegas, |&w| Ok::<_, optoent::Error>(optimize_duan_simon(&p, w)?.sum)).unwrap();
    let low = sums.iter().copied().fold(f64::INFINITY, f64::min);
    verdict(low >= 2.0 - 1e-9, format!("min Duan-Simon sum = {low:.17} (>= 2 - 1e-9)"))
}

fn c06_vacuum() -> Verdict {
    let p = common::fig1().decoupled();
    let weights = [CombinationWeights::BALANCED, CombinationWeights::new(0.2, 2.5), CombinationWeights::new(1.3, -0.7)];
    let mut worst = 0.0f64;
    for &w in &grid(&p) {
        let s = solve_fluctuations(&p, w).unwrap();
        let m = single_mode_psd(&s, &p);
        for v in [m.bp_a, m.bp_phi, m.bm_a, m.bm_phi, synodyne_psd(&p, w).unwrap()] {
            worst = worst.max((v - 1.0).abs());
        }
        for &z in &weights {
            worst = worst.max((epr_psd(&p, w, z).unwrap().s_total - 1.0).abs());
            worst = worst.max((phase_partner_psd(&p, w, z).unwrap().s_total - 1.0).abs());
        }
        worst = worst.max((optimized_spectrum(&p, w).unwrap().s_total - 1.0).abs());
    }
    verdict(worst <= 1e-12, format!("max |S - 1| = {worst:.3e} (<= 1e-12)"))
}

fn c07_commutators() -> Verdict {
    let mut rng = common::rng(7);
    let (mut scaled, mut abs) = (0.0f64, 0.0f64);
    for _ in 0..10 {
        let p = common::random_response(&mut rng);
        for &w in &grid(&p) {
            let r = check_commutators(&solve_fluctuations(&p, w).unwrap(), p.gamma_mech);
            scaled = scaled.max(r.max_scaled);
            abs = abs.max(r.max_abs);
        }
    }
    verdict(
        scaled <= 1e-10,
        format!("max residual relative to cancelling terms {scaled:.3e} (<= 1e-10); absolute {abs:.3e}"),
    )
}

fn c08_optimizer_oracle() -> Verdict {
    let mut rng = common::rng(8);
    let n = 1024;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let p = common::random_response(&mut rng);
        let w = common::log_uniform(&mut rng, 1e-3 * p.gamma_mech, 10.0 * p.gamma_plus.max(p.gamma_minus));
        let forms = EprForms::at(&p, w).unwrap();
        let brute = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| {
                let theta = std::f64::consts::FRAC_PI_2 * i as f64 / (n - 1) as f64;
                let phi = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * j as f64 / (n - 1) as f64;
                let z = CombinationWeights::new(theta, phi);
                forms.amplitude.total(&z.sum_diff())
            })
            .fold(f64::INFINITY, f64::min);
        let opt = optimized_spectrum(&p, w).unwrap().s_total;
        worst = worst.max(opt - brute);
    }
    verdict(worst <= 1e-6, format!("max (refined - brute force) = {worst:.3e} (<= 1e-6)"))
}

fn c09_formulas() -> Verdict {
    let mut rng = common::rng(9);
    let mut sets = vec![common::fig1(), ParamSpec::table1().build().unwrap().response()];
    sets.extend((0..8).map(|_| common::random_response(&mut rng)));
    let mut worst = 0.0f64;
    for p in &sets {
        for &w in &grid(p) {
            let direct = solve_fluctuations(p, w).unwrap();
            let formula = scattering_from_formulas(&susceptibilities(p, w).unwrap());
            worst = worst.max(map_discrepancy(&formula.map, &direct.map));
        }
    }
    verdict(worst <= 1e-9, format!("max entrywise relative discrepancy {worst:.3e} (<= 1e-9), no sign flip"))
}

fn c10_opa() -> Verdict {
    let p = OpaParams::new(3e5, 1.7e5, 1.1e5).unwrap();
    let r = p.threshold();
    let closed = ((r - p.g_par) / (r + p.g_par)).powi(2);
    let (m, z) = (opa_minimum(&p).unwrap(), opa_psd(&p, 0.0).unwrap());
    let exact = (m - closed).abs() <= 4.0 * f64::EPSILON * closed && (z - closed).abs() <= 4.0 * f64::EPSILON * closed;

    let fractions: Vec<f64> = (0..20).map(|k| 0.4 + 0.55 * k as f64 / 19.0).collect();
    let sweep = gain_sweep(3e5, 3e5, &fractions).unwrap();
    let monotone = sweep.windows(2).all(|w| w[1].1.s_min < w[0].1.s_min && w[1].1.analytic < w[0].1.analytic);

    let base = ParamSpec::fig1().build().unwrap();
    let powers: Vec<f64> = (0..5).map(|k| base.phys.p_in * (1.0 + k as f64)).collect();
    let rows: Vec<(f64, f64)> = powers
        .iter()
        .map(|&pw| {
            let p = base.with_power(pw).unwrap().response();
            (optimized_spectrum(&p, 0.0).unwrap().s_total, entanglement_bandwidth(&p).unwrap())
        })
        .collect();
    let (smin, smax) = rows.iter().fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(r.0), b.max(r.0)));
    let (bmin, bmax) = rows.iter().fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(r.1), b.max(r.1)));
    let depth_ratio = smax / smin;
    let width_var = (bmax - bmin) / bmin;
    verdict(
        exact && monotone && depth_ratio > 4.0 && width_var < 0.5,
        format!(
            "closed-form minimum exact: {exact}; 20-point gain sweep monotone: {monotone}; P_in x[1,5]: s_min varies x{depth_ratio:.2} (> 4), bandwidth varies {:.1}% (< 50%)",
            100.0 * width_var
        ),
    )
}

fn c11_back_action() -> Verdict {
    let mut rng = common::rng(11);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let p = SensorParams {
            eta: common::log_uniform(&mut rng, 1e-2, 1e2),
            gamma: common::log_uniform(&mut rng, 1e4, 1e6),
            gamma_mech: common::log_uniform(&mut rng, 0.1, 10.0),
            c0_sq: common::log_uniform(&mut rng, 1e8, 1e13),
            n_thermal: rng.gen_range(0.0..1e5),
            input_psd: 1.0,
        };
        let r = ResponseParams::symmetric(p.gamma, p.gamma_mech, 1.0, 0.0, 0.0).unwrap();
        for &w in &grid(&r) {
            let scale = sensor_transfer(&p, w).k / C64::new(p.gamma_mech, -w).norm();
            worst = worst.max(back_action_evading(&p, w).eps_minus.norm() / scale);
        }
    }
    verdict(worst <= 1e-12, format!("max |eps- coefficient| / (K/|gm - i W|) = {worst:.3e} (<= 1e-12)"))
}

fn c12_stability() -> Verdict {
    let sys = ParamSpec::table1().build().unwrap();
    let start = Instant::now();
    let sweep = detuning_sweep(&sys, &detuning_grid(&sys, 0.0, 0.078, 40), Execution::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let disagree = sweep.points.iter().filter(|p| !p.verdicts_agree()).count();
    let thr = sweep.threshold.map_or(f64::NAN, |t| t / sys.phys.gamma_0);
    let within = (1e-2..=4e-2).contains(&thr);
    verdict(
        within && disagree == 0 && secs < 300.0,
        format!("threshold |D0|/gamma0 = {thr:.4e} (in [1e-2, 4e-2]); verdict disagreements {disagree}/40; {secs:.1} s (< 300 s)"),
    )
}

fn c13_cooling() -> Verdict {
    let p = common::fig1();
    let n = cooled_occupation(&p).unwrap();
    let same = cooled_occupation(&p.with_pump(p.g_mean, 0.0)).unwrap();
    let ok = (n - 10.4).abs() / 10.4 < 0.02 && (same - p.n_thermal).abs() <= 1e-12 * p.n_thermal;
    verdict(ok, format!("n_T' = {n:.4} (10.4 within 2%); at G_diff = 0: {same:.6e} vs n_T = {:.6e}", p.n_thermal))
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("thermal floor", c01_thermal_floor),
        ("Duan-Simon band", c02_duan_simon),
        ("zero-frequency coincidence", c03_zero_frequency_coincidence),
        ("synodyne bandwidth", c04_synodyne_bandwidth),
        ("no entanglement at G+ = G-", c05_no_entanglement),
        ("vacuum identity", c06_vacuum),
        ("commutator preservation", c07_commutators),
        ("optimizer vs brute force", c08_optimizer_oracle),
        ("formula cross-validation", c09_formulas),
        ("parametric reference", c10_opa),
        ("back-action evasion", c11_back_action),
        ("stability threshold", c12_stability),
        ("cooled occupation", c13_cooling),
    ];
    let (mut failed, mut unexpected) = (0, 0);
    for (k, (name, run)) in criteria.iter().enumerate() {
        let id = k + 1;
        let v = run();
        let expected = EXPECTED_FAILURES.contains(&id);
        let status = match (v.pass, expected) {
            (true, false) => "PASS",
            (true, true) => "PASS (listed as expected failure)",
            (false, true) => "FAIL (expected)",
            (false, false) => "FAIL",
        };
        failed += usize::from(!v.pass);
        unexpected += usize::from(!v.pass && !expected);
        println!("criterion {id:2} {status} {name}: {}", v.detail);
    }
    println!(
        "acceptance: {} of {} criteria pass, {} expected failure(s), {} unexpected",
        criteria.len() - failed,
        criteria.len(),
        failed - unexpected,
        unexpected
    );
    if unexpected > 0 {
        std::process::exit(1);
    }
}
