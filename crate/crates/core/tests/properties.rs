//! Invariants over randomized inputs.

use optoent::entanglement::{
    cooled_occupation, epr_psd, optimize_duan_simon, optimized_spectrum, phase_partner_psd, thermal_floor,
    CombinationWeights,
};
use optoent::linear_response::{
    check_commutators, map_discrepancy, scattering_from_formulas, solve_fluctuations, susceptibilities,
};
use optoent::output::format_number;
use optoent::parametric_ref::{opa_minimum, opa_psd, OpaParams};
use optoent::params::{couplings_for_target, ParamSpec, PhysicalParams, ResponseParams};
use optoent::synodyne::synodyne_psd;
use optoent::variational_sensor::{back_action_evading, force_noise_psd, sensor_transfer, SensorParams};
use proptest::prelude::*;

fn log_range(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

prop_compose! {
    fn response()(
        gamma_plus in log_range(1e4, 1e6),
        gamma_minus in log_range(1e4, 1e6),
        gamma_mech in log_range(0.1, 10.0),
        g_mean in log_range(1e2, 1e7),
        frac in 0.0..0.2f64,
        n_thermal in log_range(1e-2, 1e5),
    ) -> ResponseParams {
        ResponseParams::new(gamma_plus, gamma_minus, gamma_mech, g_mean, frac * g_mean, n_thermal).unwrap()
    }
}

fn weights() -> impl Strategy<Value = CombinationWeights> {
    (0.0..std::f64::consts::FRAC_PI_2, -std::f64::consts::PI..std::f64::consts::PI)
        .prop_map(|(t, f)| CombinationWeights::new(t, f))
}

fn omega() -> impl Strategy<Value = f64> {
    log_range(1e-3, 1e8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn vacuum_outputs_are_unity(p in response(), w in omega(), z in weights()) {
        let v = p.decoupled();
        prop_assert!((epr_psd(&v, w, z).unwrap().s_total - 1.0).abs() < 1e-12);
        prop_assert!((phase_partner_psd(&v, w, z).unwrap().s_total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partner_spectrum_equals_amplitude_spectrum_for_equal_weights(p in response(), w in omega()) {
        let z = CombinationWeights::BALANCED;
        let a = epr_psd(&p, w, z).unwrap().s_total;
        let b = phase_partner_psd(&p, w, z).unwrap().s_total;
        prop_assert!((a - b).abs() <= 1e-9 * a.max(b), "{} vs {}", a, b);
    }

    #[test]
    fn optimum_bounds_fixed_weights(p in response(), w in omega(), z in weights()) {
        let opt = optimized_spectrum(&p, w).unwrap().s_total;
        prop_assert!(opt <= epr_psd(&p, w, z).unwrap().s_total + 1e-9);
        prop_assert!(opt <= synodyne_psd(&p, w).unwrap() * (1.0 + 1e-9) + 1e-9);
    }

    #[test]
    fn duan_simon_sum_is_twice_the_amplitude_spectrum(p in response(), w in omega()) {
        let z = CombinationWeights::BALANCED;
        let ds = optoent::entanglement::duan_simon_check(&p, w, z).unwrap();
        let a = epr_psd(&p, w, z).unwrap().s_total;
        prop_assert!((ds.sum - 2.0 * a).abs() <= 1e-9 * ds.sum);
        prop_assert_eq!(ds.entangled, ds.sum < 2.0);
    }

    #[test]
    fn balanced_pumping_never_certifies(p in response(), w in omega()) {
        // Equal optical rates: with γ₊ ≠ γ₋ the dynamic rates Γ±(Ω) differ
        // at Ω ≠ 0 even when G₊ = G₋.
        let b = ResponseParams { gamma_minus: p.gamma_plus, ..p.with_pump(p.g_mean, 0.0) };
        prop_assert!(optimize_duan_simon(&b, w).unwrap().sum >= 2.0 - 1e-9);
    }

    #[test]
    fn commutators_preserved(p in response(), w in omega()) {
        let r = check_commutators(&solve_fluctuations(&p, w).unwrap(), p.gamma_mech);
        prop_assert!(r.passes(1e-10), "{:?}", r);
    }

    #[test]
    fn closed_form_matches_direct_solve(p in response(), w in omega()) {
        let direct = solve_fluctuations(&p, w).unwrap();
        let formula = scattering_from_formulas(&susceptibilities(&p, w).unwrap());
        prop_assert!(map_discrepancy(&formula.map, &direct.map) < 1e-9);
    }

    #[test]
    fn cooling_never_heats(p in response()) {
        prop_assert!(cooled_occupation(&p).unwrap() <= p.n_thermal);
    }

    #[test]
    fn more_pump_lowers_thermal_floor(p in response(), k in 1.01..10.0f64) {
        let q = p.with_pump(k * p.g_mean, k * p.g_diff);
        prop_assert!(thermal_floor(&q) < thermal_floor(&p));
    }

    #[test]
    fn opa_minimum_bounds_spectrum(g1 in log_range(1e3, 1e6), g2 in log_range(1e3, 1e6), f in 0.0..0.99f64, w in omega()) {
        let p = OpaParams::new(g1, g2, f * (g1 * g2).sqrt()).unwrap();
        let m = opa_minimum(&p).unwrap();
        prop_assert_eq!(m, opa_minimum(&p).unwrap());
        prop_assert!((opa_psd(&p, 0.0).unwrap() - m).abs() <= 4.0 * f64::EPSILON * m.max(1e-300));
        if (g1 - g2).abs() < 1e-9 * g1 {
            prop_assert!(opa_psd(&p, w).unwrap() >= m * (1.0 - 1e-12));
        }
    }

    #[test]
    fn back_action_cancels(eta in log_range(1e-2, 1e2), gamma in log_range(1e4, 1e6), gm in log_range(0.1, 10.0),
                           c0 in log_range(1e8, 1e13), w in omega()) {
        let p = SensorParams { eta, gamma, gamma_mech: gm, c0_sq: c0, n_thermal: 1e3, input_psd: 1.0 };
        let scale = sensor_transfer(&p, w).k / (gm * gm + w * w).sqrt();
        prop_assert!(back_action_evading(&p, w).eps_minus.norm() <= 1e-12 * scale);
        let a = force_noise_psd(&p, w).unwrap();
        let b = force_noise_psd(&p.with_input_psd(0.025), w).unwrap();
        prop_assert!((b.shot / a.shot - 0.025).abs() < 1e-12);
    }

    #[test]
    fn coupling_targets_round_trip(g in log_range(1e2, 1e7), frac in -1.9..1.9f64) {
        let phys = PhysicalParams { eta_p: 0.0, eta_m: 0.0, ..ParamSpec::table1().build().unwrap().phys };
        let (ep, em) = couplings_for_target(&phys, g, frac * g).unwrap();
        let d = PhysicalParams { eta_p: ep, eta_m: em, ..phys }.derive().unwrap();
        prop_assert!((d.g_mean - g).abs() <= 1e-12 * g);
        prop_assert!((d.g_diff - frac * g).abs() <= 1e-12 * g);
    }

    #[test]
    fn weights_round_trip(z in weights()) {
        let back = CombinationWeights::from_z(z.z_plus(), z.z_minus()).unwrap();
        prop_assert!((back.z_plus() - z.z_plus()).norm() < 1e-12);
        prop_assert!((back.z_minus() - z.z_minus()).norm() < 1e-12);
    }

    #[test]
    fn numbers_round_trip(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(format_number(v).parse::<f64>().unwrap(), v);
    }
}
