//! Linearized fluctuation response of the two sideband modes and the membrane.
//!
//! The engine is [`solve_fluctuations`], a direct solve of the coupled
//! frequency-domain equations for `(c₊(Ω), c₋†(−Ω), d(Ω))`. The closed-form
//! coefficients in [`susceptibilities`] / [`scattering_from_formulas`] are kept
//! as an independent validation layer.
//!
//! The EPR combinations are solved in sum/difference coordinates
//! `p = (c₊ + c₋†)/√2`, `m = (c₊ − c₋†)/√2`. For balanced pumping the sum
//! channel decouples from the membrane exactly, and computing it without
//! subtracting two O(G/γ_m) numbers is what keeps the EPR spectra accurate
//! near G₊ ≈ G₋. The per-sideband map is solved separately in mode
//! coordinates.

use nalgebra::{Matrix2, Matrix3, SMatrix, Vector2, Vector3};
use num_complex::Complex64 as C64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::params::ResponseParams;

/// Complex 4×6 quadrature map.
pub type QuadMap = SMatrix<C64, 4, 6>;

/// Output rows of [`QuadratureScattering::map`].
pub mod row {
    pub const BP_A: usize = 0;
    pub const BP_PHI: usize = 1;
    pub const BM_A: usize = 2;
    pub const BM_PHI: usize = 3;
}

/// Output rows of [`QuadratureScattering::sum_diff`].
pub mod sd_row {
    pub const SUM_A: usize = 0;
    pub const SUM_PHI: usize = 1;
    pub const DIFF_A: usize = 2;
    pub const DIFF_PHI: usize = 3;
}

/// Frequency-dependent coefficients of the closed-form output relations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferCoefficients {
    pub omega: f64,
    pub xi_p: C64,
    pub xi_m: C64,
    pub gamma_p: C64,
    pub gamma_m_rate: C64,
    pub gamma_mech_eff: C64,
    pub a_p: C64,
    pub a_m: C64,
    pub cal_a_p: C64,
    pub cal_a_m: C64,
    pub b: C64,
    pub f_p: C64,
    pub f_m: C64,
}

/// A cancelled sum is treated as zero when it is within rounding of its terms.
fn near_zero(x: C64, magnitude: f64) -> bool {
    !x.is_finite() || x.norm() <= 8.0 * f64::EPSILON * magnitude
}

/// Closed-form output coefficients at spectral frequency `omega`.
///
/// `B` is evaluated as `2/(Γ_m − iΩ) · √(γ₊Γ₊/(γ₊−iΩ)) · √(γ₋Γ₋/(γ₋−iΩ))`,
/// a product of per-mode principal roots. Taking a single root of the joint
/// product flips the sign of `B` once Ω² > γ₊γ₋.
pub fn susceptibilities(p: &ResponseParams, omega: f64) -> Result<TransferCoefficients> {
    let i = C64::i();
    let kp = C64::new(p.gamma_plus, -omega);
    let km = C64::new(p.gamma_minus, -omega);
    let gamma_p = p.g_plus() * p.gamma_plus / kp;
    let gamma_m_rate = p.g_minus() * p.gamma_minus / km;
    let gamma_mech_eff = p.gamma_mech + gamma_p - gamma_m_rate;
    let den = gamma_mech_eff - i * omega;
    if near_zero(den, p.gamma_mech + gamma_p.norm() + gamma_m_rate.norm() + omega.abs()) {
        return Err(Error::SingularResponse { omega });
    }
    let xi_p = C64::new(p.gamma_plus, omega) / kp;
    let xi_m = C64::new(p.gamma_minus, omega) / km;
    let a_p = 2.0 * p.gamma_plus * gamma_p / (kp * den);
    let a_m = 2.0 * p.gamma_minus * gamma_m_rate / (km * den);
    let root_p = (p.gamma_plus * gamma_p / kp).sqrt();
    let root_m = (p.gamma_minus * gamma_m_rate / km).sqrt();
    Ok(TransferCoefficients {
        omega,
        xi_p,
        xi_m,
        gamma_p,
        gamma_m_rate,
        gamma_mech_eff,
        a_p,
        a_m,
        cal_a_p: xi_p - a_p,
        cal_a_m: xi_m + a_m,
        b: 2.0 * root_p * root_m / den,
        f_p: (2.0 * p.gamma_plus * gamma_p / kp).sqrt() / den,
        f_m: (2.0 * p.gamma_minus * gamma_m_rate / km).sqrt() / den,
    })
}

/// Input-to-output map of quadratures at one spectral frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureScattering {
    pub omega: f64,
    /// Rows `(b₊ₐ, b₊φ, b₋ₐ, b₋φ)`; columns
    /// `(a₊ₐ, a₊φ, a₋ₐ, a₋φ, √(2γ_m)qₐ, √(2γ_m)q_φ)`.
    pub map: QuadMap,
    /// The same map in sum/difference coordinates: rows `(sₐ, s_φ, dₐ, d_φ)`
    /// with `s = (b₊ + b₋)/√2`, `d = (b₊ − b₋)/√2`, columns rotated alike on
    /// the optical inputs.
    pub sum_diff: QuadMap,
}

fn rot4() -> SMatrix<f64, 4, 4> {
    let h = FRAC_1_SQRT_2;
    SMatrix::<f64, 4, 4>::new(
        h, 0.0, h, 0.0, //
        0.0, h, 0.0, h, //
        h, 0.0, -h, 0.0, //
        0.0, h, 0.0, -h,
    )
}

fn rot6() -> SMatrix<f64, 6, 6> {
    let mut r = SMatrix::<f64, 6, 6>::identity();
    r.fixed_view_mut::<4, 4>(0, 0).copy_from(&rot4());
    r
}

/// Both rotations are symmetric involutions, so this maps either way.
fn rotate(m: &QuadMap) -> QuadMap {
    rot4().map(C64::from) * m * rot6().map(C64::from)
}

impl QuadratureScattering {
    pub fn from_map(omega: f64, map: QuadMap) -> Self {
        Self { omega, map, sum_diff: rotate(&map) }
    }
}

/// Spectral weight of each input column: unit vacuum on the optical inputs and
/// `2γ_m (n_T + ½)` on each quadrature of the `√(2γ_m) q` channel.
pub fn channel_weights(p: &ResponseParams) -> [f64; 6] {
    let th = 2.0 * p.gamma_mech * (p.n_thermal + 0.5);
    [1.0, 1.0, 1.0, 1.0, th, th]
}

/// Quantum and thermal parts of the spectral density of one output row.
pub fn row_psd(row: &[C64; 6], weights: &[f64; 6]) -> (f64, f64) {
    let part = |r: std::ops::Range<usize>| r.map(|k| row[k].norm_sqr() * weights[k]).sum::<f64>();
    (part(0..4), part(4..6))
}

pub(crate) fn row_of(m: &QuadMap, r: usize) -> [C64; 6] {
    std::array::from_fn(|k| m[(r, k)])
}

/// Transfer of the first subsystem at `w` in rotated coordinates:
/// rows `(b_p, b_m)`, columns `(α_p, α_m, Q)`.
fn rotated_transfer(p: &ResponseParams, w: f64) -> Result<[[C64; 3]; 2]> {
    let (gp, gm) = (p.gamma_plus, p.gamma_minus);
    let kp = C64::new(gp, -w);
    let km = C64::new(gm, -w);
    let kmech = C64::new(p.gamma_mech, -w);

    let ks = 0.5 * (kp.inv() + km.inv());
    let kd = (gm - gp) / (2.0 * kp * km);
    let kinv = Matrix2::new(ks, kd, kd, ks);

    let (cp, cm) = ((p.g_plus() * gp).sqrt(), (p.g_minus() * gm).sqrt());
    let sg = FRAC_1_SQRT_2 * (cp + cm);
    let dg = if cp + cm > 0.0 {
        let num = p.g_mean * (gp - gm) + 0.5 * p.g_diff * (gp + gm);
        FRAC_1_SQRT_2 * num / (cp + cm)
    } else {
        0.0
    };

    let (rp, rm) = ((2.0 * gp).sqrt(), (2.0 * gm).sqrt());
    let rbar = 0.5 * (rp + rm);
    let dr = (gp - gm) / (rp + rm);
    let bo = Matrix2::new(rbar, dr, dr, rbar).map(C64::from);

    let wmat = kinv * bo;
    let v = kinv * Vector2::new(C64::from(dg), C64::from(sg));
    let f = Vector2::new(C64::from(sg), C64::from(dg));
    let optical = f.dot(&v);
    let schur = kmech + optical;
    if near_zero(schur, kmech.norm() + optical.norm()) {
        return Err(Error::SingularResponse { omega: w });
    }
    let dcol = [
        f.dot(&wmat.column(0)) / schur,
        f.dot(&wmat.column(1)) / schur,
        schur.inv(),
    ];
    let y = SMatrix::<C64, 2, 3>::from_fn(|r, c| {
        let direct = if c < 2 { wmat[(r, c)] } else { C64::new(0.0, 0.0) };
        direct - v[r] * dcol[c]
    });
    let t = bo * y;
    let mut out = [[C64::new(0.0, 0.0); 3]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, x) in row.iter_mut().enumerate() {
            *x = t[(r, c)] - if r == c { 1.0 } else { 0.0 };
        }
    }
    Ok(out)
}

/// Transfer of the first subsystem at `w` in mode coordinates: rows
/// `(b₊, b₋†)`, columns `(a₊, a₋†, Q)`, from a pivoted LU solve of
///
/// ```text
/// (γ₊ − iΩ) c₊  + g₊ d = √(2γ₊) a₊
/// (γ₋ − iΩ) c₋† − g₋ d = √(2γ₋) a₋†
/// −g₊ c₊ − g₋ c₋† + (γ_m − iΩ) d = Q
/// ```
///
/// with `g± = √(G±γ±)`.
fn mode_transfer(p: &ResponseParams, w: f64) -> Result<[[C64; 3]; 2]> {
    let zero = C64::new(0.0, 0.0);
    let (gp, gm) = (C64::from((p.g_plus() * p.gamma_plus).sqrt()), C64::from((p.g_minus() * p.gamma_minus).sqrt()));
    let m = Matrix3::new(
        C64::new(p.gamma_plus, -w), zero, gp, //
        zero, C64::new(p.gamma_minus, -w), -gm, //
        -gp, -gm, C64::new(p.gamma_mech, -w),
    );
    let (rp, rm) = ((2.0 * p.gamma_plus).sqrt(), (2.0 * p.gamma_minus).sqrt());
    let rhs = Matrix3::from_diagonal(&Vector3::new(rp, rm, 1.0).map(C64::from));
    let x = m.lu().solve(&rhs).ok_or(Error::SingularResponse { omega: w })?;
    let mut out = [[zero; 3]; 2];
    for (r, scale) in [rp, rm].into_iter().enumerate() {
        for (c, v) in out[r].iter_mut().enumerate() {
            *v = scale * x[(r, c)] - if r == c { 1.0 } else { 0.0 };
        }
    }
    Ok(out)
}

/// Quadrature map from the transfer of a subsystem at `±Ω`.
///
/// Rows of the annihilation-basis map are `(x¹, x², y¹, y²)` and columns
/// `(α¹, α², β¹, β², Q¹, Q²)`, where superscript 2 marks the partner system
/// with coefficients `conj(T(−Ω))`. Each pair is then converted to
/// (amplitude, phase) as if its first member were an annihilation operator.
fn quadratures(pos: &[[C64; 3]; 2], neg: &[[C64; 3]; 2]) -> QuadMap {
    let mut n = QuadMap::zeros();
    for (r, out) in [0usize, 2].into_iter().enumerate() {
        for (c, inp) in [0usize, 2, 4].into_iter().enumerate() {
            n[(out, inp)] = pos[r][c];
            n[(out + 1, inp + 1)] = neg[r][c].conj();
        }
    }
    let h = C64::from(FRAC_1_SQRT_2);
    let u = Matrix2::new(h, h, -C64::i() * h, C64::i() * h);
    let u_inv = Matrix2::new(h, C64::i() * h, h, -C64::i() * h);
    let mut uo = SMatrix::<C64, 4, 4>::zeros();
    let mut ui = SMatrix::<C64, 6, 6>::zeros();
    for k in 0..2 {
        uo.fixed_view_mut::<2, 2>(2 * k, 2 * k).copy_from(&u);
    }
    for k in 0..3 {
        ui.fixed_view_mut::<2, 2>(2 * k, 2 * k).copy_from(&u_inv);
    }
    uo * n * ui
}

/// Scattering map from a direct solve of the linearized equations at `omega`
/// and `-omega` (the latter supplies the conjugate partner system).
///
/// The sideband map and the sum/difference map are each solved in their own
/// coordinates, so that small entries of either keep full relative accuracy
/// instead of arising as differences of O(1) entries of the other.
pub fn solve_fluctuations(p: &ResponseParams, omega: f64) -> Result<QuadratureScattering> {
    p.validate()?;
    let sd_q = quadratures(&rotated_transfer(p, omega)?, &rotated_transfer(p, -omega)?);
    // sd_q has rows (sₐ, d_φ, dₐ, s_φ) and columns (σₐ, δ_φ, δₐ, σ_φ, Qₐ, Q_φ).
    const ROWS: [usize; 4] = [0, 3, 2, 1];
    const COLS: [usize; 6] = [0, 3, 2, 1, 4, 5];
    let sum_diff = QuadMap::from_fn(|r, c| sd_q[(ROWS[r], COLS[c])]);

    // The second pair is (b₋†, b₋) against (a₋†, a₋): its phase row and
    // column come out negated.
    let pm_q = quadratures(&mode_transfer(p, omega)?, &mode_transfer(p, -omega)?);
    let sign = |k: usize| if k == 3 { -1.0 } else { 1.0 };
    let map = QuadMap::from_fn(|r, c| pm_q[(r, c)] * sign(r) * sign(c));
    Ok(QuadratureScattering { omega, map, sum_diff })
}

/// Scattering map assembled from the closed-form coefficients:
///
/// ```text
/// b₊ₐ = 𝒜₊ a₊ₐ − B a₋ₐ − F₊ √(2γ_m) qₐ     b₊φ = 𝒜₊ a₊φ + B a₋φ − F₊ √(2γ_m) q_φ
/// b₋ₐ = 𝒜₋ a₋ₐ + B a₊ₐ + F₋ √(2γ_m) qₐ     b₋φ = 𝒜₋ a₋φ − B a₊φ − F₋ √(2γ_m) q_φ
/// ```
pub fn scattering_from_formulas(t: &TransferCoefficients) -> QuadratureScattering {
    let mut m = QuadMap::zeros();
    m[(row::BP_A, 0)] = t.cal_a_p;
    m[(row::BP_A, 2)] = -t.b;
    m[(row::BP_A, 4)] = -t.f_p;
    m[(row::BP_PHI, 1)] = t.cal_a_p;
    m[(row::BP_PHI, 3)] = t.b;
    m[(row::BP_PHI, 5)] = -t.f_p;
    m[(row::BM_A, 2)] = t.cal_a_m;
    m[(row::BM_A, 0)] = t.b;
    m[(row::BM_A, 4)] = t.f_m;
    m[(row::BM_PHI, 3)] = t.cal_a_m;
    m[(row::BM_PHI, 1)] = -t.b;
    m[(row::BM_PHI, 5)] = -t.f_m;
    QuadratureScattering::from_map(t.omega, m)
}

/// Largest entrywise discrepancy between two maps.
///
/// Entries where `reference` is nonzero are compared relatively. Where it is
/// exactly zero the other entry is measured against the largest magnitude in
/// its row.
pub fn map_discrepancy(candidate: &QuadMap, reference: &QuadMap) -> f64 {
    let mut worst = 0.0_f64;
    for r in 0..4 {
        let scale = (0..6).map(|c| reference[(r, c)].norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        for c in 0..6 {
            let (x, y) = (candidate[(r, c)], reference[(r, c)]);
            let err = if y.norm() > 0.0 { (x - y).norm() / y.norm() } else { x.norm() / scale };
            worst = worst.max(err);
        }
    }
    worst
}

/// Spectral densities of the four single output quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleModePsd {
    pub bp_a: f64,
    pub bp_phi: f64,
    pub bm_a: f64,
    pub bm_phi: f64,
}

impl SingleModePsd {
    pub fn min(&self) -> f64 {
        self.bp_a.min(self.bp_phi).min(self.bm_a).min(self.bm_phi)
    }
}

pub fn single_mode_psd(s: &QuadratureScattering, p: &ResponseParams) -> SingleModePsd {
    let w = channel_weights(p);
    let total = |r| {
        let (q, t) = row_psd(&row_of(&s.map, r), &w);
        q + t
    };
    SingleModePsd {
        bp_a: total(row::BP_A),
        bp_phi: total(row::BP_PHI),
        bm_a: total(row::BM_A),
        bm_phi: total(row::BM_PHI),
    }
}

/// Outcome of the commutator-preservation check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorReport {
    /// Largest |N K_in N† − K_out| entry, absolute.
    pub max_abs: f64,
    /// Same residual divided by the magnitude of the terms that cancel
    /// (floored at 1), i.e. the error in units of floating-point resolution
    /// of the computed sums.
    pub max_scaled: f64,
}

impl CommutatorReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_scaled <= tol
    }
}

/// Rebuild the annihilation-basis map `(b₊, b₊†, b₋, b₋†)` from the quadrature
/// map and test `N K_in N† = K_out`, with `K_in = diag(1, −1, 1, −1, 2γ_m, −2γ_m)`.
pub fn check_commutators(s: &QuadratureScattering, gamma_mech: f64) -> CommutatorReport {
    let h = C64::from(FRAC_1_SQRT_2);
    let u = Matrix2::new(h, h, -C64::i() * h, C64::i() * h);
    let u_inv = Matrix2::new(h, C64::i() * h, h, -C64::i() * h);
    let mut uo_inv = SMatrix::<C64, 4, 4>::zeros();
    let mut ui = SMatrix::<C64, 6, 6>::zeros();
    for k in 0..2 {
        uo_inv.fixed_view_mut::<2, 2>(2 * k, 2 * k).copy_from(&u_inv);
    }
    for k in 0..3 {
        ui.fixed_view_mut::<2, 2>(2 * k, 2 * k).copy_from(&u);
    }
    let n = uo_inv * s.map * ui;
    let k_in = [1.0, -1.0, 1.0, -1.0, 2.0 * gamma_mech, -2.0 * gamma_mech];
    let k_out = [1.0, -1.0, 1.0, -1.0];
    let mut report = CommutatorReport { max_abs: 0.0, max_scaled: 0.0 };
    for i in 0..4 {
        for j in 0..4 {
            let (mut acc, mut mag) = (C64::new(0.0, 0.0), 0.0);
            for (k, kk) in k_in.iter().enumerate() {
                let term = n[(i, k)] * *kk * n[(j, k)].conj();
                acc += term;
                mag += term.norm();
            }
            let target = if i == j { k_out[i] } else { 0.0 };
            let res = (acc - target).norm();
            report.max_abs = report.max_abs.max(res);
            report.max_scaled = report.max_scaled.max(res / mag.max(1.0));
        }
    }
    report
}
