//! Classical mean-field reduction of the three-mode equations of motion.
//!
//! Noise inputs are dropped, the pump drives mode 0 only and every optical
//! amplitude carries the same detuning term `+iΔ₀` (equidistant modes).

use nalgebra::SMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::params::OptomechSystem;

pub type RealJacobian = SMatrix<f64, 8, 8>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanFieldState {
    pub c0: C64,
    pub cp: C64,
    pub cm: C64,
    pub d: C64,
}

impl MeanFieldState {
    pub const ZERO: Self = Self {
        c0: C64::new(0.0, 0.0),
        cp: C64::new(0.0, 0.0),
        cm: C64::new(0.0, 0.0),
        d: C64::new(0.0, 0.0),
    };

    pub fn to_real(&self) -> [f64; 8] {
        let [a, b, c, d] = [self.c0, self.cp, self.cm, self.d];
        [a.re, a.im, b.re, b.im, c.re, c.im, d.re, d.im]
    }

    pub fn from_real(y: &[f64; 8]) -> Self {
        Self {
            c0: C64::new(y[0], y[1]),
            cp: C64::new(y[2], y[3]),
            cm: C64::new(y[4], y[5]),
            d: C64::new(y[6], y[7]),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_real().iter().all(|v| v.is_finite())
    }

    /// Largest sideband or mechanical amplitude.
    pub fn perturbation(&self) -> f64 {
        self.cp.norm().max(self.cm.norm()).max(self.d.norm())
    }

    pub fn max_abs(&self) -> f64 {
        self.c0.norm().max(self.perturbation())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanFieldModel {
    /// `√(2γ₀) A₀`.
    pub drive: f64,
    pub gamma_0: f64,
    pub gamma_p: f64,
    pub gamma_m: f64,
    pub gamma_mech: f64,
    pub eta_p: f64,
    pub eta_m: f64,
    pub delta: f64,
}

impl MeanFieldModel {
    pub fn new(sys: &OptomechSystem, delta: f64) -> Self {
        Self {
            drive: (2.0 * sys.phys.gamma_0 * sys.derived.a0_sq).sqrt(),
            gamma_0: sys.phys.gamma_0,
            gamma_p: sys.phys.gamma_p,
            gamma_m: sys.phys.gamma_m_opt,
            gamma_mech: sys.derived.gamma_mech,
            eta_p: sys.phys.eta_p,
            eta_m: sys.phys.eta_m,
            delta,
        }
    }

    /// Amplitude scale `drive/γ₀` (the undetuned pump mode amplitude).
    pub fn scale(&self) -> f64 {
        self.drive / self.gamma_0
    }

    fn loss(&self, gamma: f64) -> C64 {
        C64::new(gamma, -self.delta)
    }

    /// Fixed point with empty sidebands: `c₀ = drive/(γ₀ − iΔ₀)`.
    pub fn trivial_state(&self) -> MeanFieldState {
        MeanFieldState { c0: self.drive / self.loss(self.gamma_0), ..MeanFieldState::ZERO }
    }

    pub fn rhs(&self, s: &MeanFieldState) -> MeanFieldState {
        let (ep, em) = (self.eta_p, self.eta_m);
        MeanFieldState {
            c0: -self.loss(self.gamma_0) * s.c0 + ep * s.cp * s.d.conj() - em * s.cm * s.d + self.drive,
            cp: -self.loss(self.gamma_p) * s.cp - ep * s.c0 * s.d,
            cm: -self.loss(self.gamma_m) * s.cm + em * s.c0 * s.d.conj(),
            d: -self.gamma_mech * s.d + em * s.cm.conj() * s.c0 + ep * s.c0.conj() * s.cp,
        }
    }

    pub fn rhs_real(&self, y: &[f64; 8]) -> [f64; 8] {
        self.rhs(&MeanFieldState::from_real(y)).to_real()
    }

    /// Relative residual `max|ẏ| / (γ₀ · scale)`.
    pub fn residual(&self, s: &MeanFieldState) -> f64 {
        self.rhs(s).max_abs() / (self.gamma_0 * self.scale())
    }

    /// Jacobian of the real 8-dimensional flow, assembled from the
    /// holomorphic and antiholomorphic derivatives of each equation.
    pub fn jacobian(&self, s: &MeanFieldState) -> RealJacobian {
        let (ep, em) = (self.eta_p, self.eta_m);
        let zero = C64::new(0.0, 0.0);
        // Rows: equations (c0, cp, cm, d); columns: variables (c0, cp, cm, d).
        let dz: [[C64; 4]; 4] = [
            [-self.loss(self.gamma_0), ep * s.d.conj(), -em * s.d, -em * s.cm],
            [-ep * s.d, -self.loss(self.gamma_p), zero, -ep * s.c0],
            [em * s.d.conj(), zero, -self.loss(self.gamma_m), zero],
            [em * s.cm.conj(), ep * s.c0.conj(), zero, C64::from(-self.gamma_mech)],
        ];
        let dzbar: [[C64; 4]; 4] = [
            [zero, zero, zero, ep * s.cp],
            [zero; 4],
            [zero, zero, zero, em * s.c0],
            [ep * s.cp, zero, em * s.c0, zero],
        ];
        let mut j = RealJacobian::zeros();
        for r in 0..4 {
            for c in 0..4 {
                let (a, b) = (dz[r][c], dzbar[r][c]);
                j[(2 * r, 2 * c)] = (a + b).re;
                j[(2 * r, 2 * c + 1)] = -(a - b).im;
                j[(2 * r + 1, 2 * c)] = (a + b).im;
                j[(2 * r + 1, 2 * c + 1)] = (a - b).re;
            }
        }
        j
    }

    /// Steady-state pump rates `G± = η±²|c₀|²/γ±`.
    pub fn pump_rates(&self, s: &MeanFieldState) -> (f64, f64) {
        let c0_sq = s.c0.norm_sqr();
        (self.eta_p * self.eta_p * c0_sq / self.gamma_p, self.eta_m * self.eta_m * c0_sq / self.gamma_m)
    }
}
