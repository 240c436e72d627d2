#![allow(dead_code)]

use optoent::params::{ParamSpec, ResponseParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Stable, feasible response parameters spanning several decades.
pub fn random_response(rng: &mut impl Rng) -> ResponseParams {
    let gamma_plus = log_uniform(rng, 1e4, 1e6);
    let gamma_minus = log_uniform(rng, 1e4, 1e6);
    let gamma_mech = log_uniform(rng, 0.1, 10.0);
    let g_mean = log_uniform(rng, 1e2, 1e7);
    let g_diff = rng.gen_range(0.0..0.2) * g_mean;
    let n_thermal = log_uniform(rng, 1e-2, 1e5);
    ResponseParams::new(gamma_plus, gamma_minus, gamma_mech, g_mean, g_diff, n_thermal).unwrap()
}

pub fn fig1() -> ResponseParams {
    ParamSpec::fig1().build().unwrap().response()
}
