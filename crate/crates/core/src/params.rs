//! Physical inputs, derived steady-state quantities and parameter files.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::constants::{C_LIGHT, HBAR, K_B};
use crate::error::{Error, Result};

/// Raw experiment inputs. All rates are angular [1/s].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalParams {
    /// Effective mass [kg].
    pub mass: f64,
    /// Mechanical angular frequency [rad/s].
    pub omega_m: f64,
    /// Mechanical quality factor, Q = ω_m / 2γ_m.
    pub q_factor: f64,
    /// Bath temperature [K].
    pub temperature: f64,
    /// Cavity length [m].
    pub length: f64,
    pub gamma_0: f64,
    pub gamma_p: f64,
    pub gamma_m_opt: f64,
    /// Pump wavelength [m].
    pub lambda_0: f64,
    /// Input optical power [W].
    pub p_in: f64,
    pub eta_p: f64,
    pub eta_m: f64,
    /// Pump detuning [rad/s]; only the mean-field stability model uses it.
    pub delta_0: f64,
}

/// Steady-state quantities computed from [`PhysicalParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedParams {
    pub gamma_mech: f64,
    pub x0: f64,
    pub n_thermal: f64,
    pub omega_0: f64,
    pub a0_sq: f64,
    pub c0_sq: f64,
    pub g_p: f64,
    pub g_m: f64,
    pub g_mean: f64,
    pub g_diff: f64,
    pub gamma_m0: f64,
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { field, reason: format!("must be finite and > 0, got {v}") })
    }
}

fn finite(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { field, reason: format!("must be finite, got {v}") })
    }
}

/// Bose occupation of a mode at angular frequency `omega` and temperature `t`.
pub fn thermal_occupation(omega: f64, t: f64) -> f64 {
    1.0 / (HBAR * omega / (K_B * t)).exp_m1()
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        positive("mass", self.mass)?;
        positive("omega_m", self.omega_m)?;
        positive("q_factor", self.q_factor)?;
        positive("temperature", self.temperature)?;
        positive("length", self.length)?;
        positive("gamma_0", self.gamma_0)?;
        positive("gamma_p", self.gamma_p)?;
        positive("gamma_m_opt", self.gamma_m_opt)?;
        positive("lambda_0", self.lambda_0)?;
        positive("p_in", self.p_in)?;
        finite("eta_p", self.eta_p)?;
        finite("eta_m", self.eta_m)?;
        finite("delta_0", self.delta_0)
    }

    pub fn derive(&self) -> Result<DerivedParams> {
        self.validate()?;
        let gamma_mech = self.omega_m / (2.0 * self.q_factor);
        let x0 = (HBAR / (2.0 * self.mass * self.omega_m)).sqrt();
        let n_thermal = thermal_occupation(self.omega_m, self.temperature);
        let omega_0 = 2.0 * PI * C_LIGHT / self.lambda_0;
        let a0_sq = self.p_in / (HBAR * omega_0);
        let c0_sq = 2.0 * a0_sq / self.gamma_0;
        let g_p = self.eta_p * self.eta_p * c0_sq / self.gamma_p;
        let g_m = self.eta_m * self.eta_m * c0_sq / self.gamma_m_opt;
        let g_diff = g_p - g_m;
        Ok(DerivedParams {
            gamma_mech,
            x0,
            n_thermal,
            omega_0,
            a0_sq,
            c0_sq,
            g_p,
            g_m,
            g_mean: 0.5 * (g_p + g_m),
            g_diff,
            gamma_m0: gamma_mech + g_diff,
        })
    }

    /// Same device at a different input power; couplings are kept.
    pub fn with_power(&self, p_in: f64) -> Self {
        Self { p_in, ..*self }
    }
}

/// Free-function form of [`PhysicalParams::derive`].
pub fn derive(p: &PhysicalParams) -> Result<DerivedParams> {
    p.derive()
}

/// Coupling constants η± that realize the requested pump rates at `p`'s power.
pub fn couplings_for_target(p: &PhysicalParams, g_mean: f64, g_diff: f64) -> Result<(f64, f64)> {
    let d = p.derive()?;
    let (gp, gm) = (g_mean + 0.5 * g_diff, g_mean - 0.5 * g_diff);
    if !(g_mean.is_finite() && g_diff.is_finite()) || g_mean <= 0.0 || gp < 0.0 || gm < 0.0 {
        return Err(Error::Infeasible(format!(
            "G_mean = {g_mean}, G_diff = {g_diff} gives G+ = {gp}, G- = {gm}"
        )));
    }
    Ok(((gp * p.gamma_p / d.c0_sq).sqrt(), (gm * p.gamma_m_opt / d.c0_sq).sqrt()))
}

/// The subset of parameters the linear fluctuation response depends on.
///
/// Pump rates are stored as mean and difference so that G₊ − G₋ is carried
/// exactly even when it is tiny compared to G.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResponseParams {
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub gamma_mech: f64,
    pub g_mean: f64,
    pub g_diff: f64,
    pub n_thermal: f64,
}

impl ResponseParams {
    pub fn new(
        gamma_plus: f64,
        gamma_minus: f64,
        gamma_mech: f64,
        g_mean: f64,
        g_diff: f64,
        n_thermal: f64,
    ) -> Result<Self> {
        let r = Self { gamma_plus, gamma_minus, gamma_mech, g_mean, g_diff, n_thermal };
        r.validate()?;
        Ok(r)
    }

    /// Both sidebands share the optical rate `gamma`.
    pub fn symmetric(gamma: f64, gamma_mech: f64, g_mean: f64, g_diff: f64, n_thermal: f64) -> Result<Self> {
        Self::new(gamma, gamma, gamma_mech, g_mean, g_diff, n_thermal)
    }

    pub fn validate(&self) -> Result<()> {
        positive("gamma_plus", self.gamma_plus)?;
        positive("gamma_minus", self.gamma_minus)?;
        positive("gamma_mech", self.gamma_mech)?;
        finite("g_mean", self.g_mean)?;
        finite("g_diff", self.g_diff)?;
        if !(self.n_thermal.is_finite() && self.n_thermal >= 0.0) {
            return Err(Error::InvalidParameter {
                field: "n_thermal",
                reason: format!("must be finite and >= 0, got {}", self.n_thermal),
            });
        }
        if self.g_plus() < 0.0 || self.g_minus() < 0.0 {
            return Err(Error::Infeasible(format!(
                "G+ = {}, G- = {} must both be non-negative",
                self.g_plus(),
                self.g_minus()
            )));
        }
        Ok(())
    }

    pub fn g_plus(&self) -> f64 {
        self.g_mean + 0.5 * self.g_diff
    }

    pub fn g_minus(&self) -> f64 {
        self.g_mean - 0.5 * self.g_diff
    }

    /// Optically damped mechanical rate γ_m + G₊ − G₋.
    pub fn gamma_m0(&self) -> f64 {
        self.gamma_mech + self.g_diff
    }

    /// Same rates with both couplings switched off.
    pub fn decoupled(&self) -> Self {
        Self { g_mean: 0.0, g_diff: 0.0, ..*self }
    }

    pub fn with_pump(&self, g_mean: f64, g_diff: f64) -> Self {
        Self { g_mean, g_diff, ..*self }
    }
}

/// Physical parameters together with their derived quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptomechSystem {
    pub phys: PhysicalParams,
    pub derived: DerivedParams,
}

impl OptomechSystem {
    pub fn new(phys: PhysicalParams) -> Result<Self> {
        Ok(Self { derived: phys.derive()?, phys })
    }

    /// Re-solve couplings so that the current power realizes the given pump rates.
    pub fn with_pump_targets(&self, g_mean: f64, g_diff: f64) -> Result<Self> {
        let (eta_p, eta_m) = couplings_for_target(&self.phys, g_mean, g_diff)?;
        Self::new(PhysicalParams { eta_p, eta_m, ..self.phys })
    }

    pub fn with_power(&self, p_in: f64) -> Result<Self> {
        Self::new(self.phys.with_power(p_in))
    }

    pub fn response(&self) -> ResponseParams {
        let d = &self.derived;
        ResponseParams {
            gamma_plus: self.phys.gamma_p,
            gamma_minus: self.phys.gamma_m_opt,
            gamma_mech: d.gamma_mech,
            g_mean: d.g_mean,
            g_diff: d.g_diff,
            n_thermal: d.n_thermal,
        }
    }
}

/// Flat key/value parameter file contents.
///
/// Pump rates are targets: the couplings η± are solved for on load at
/// `p_in_w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSpec {
    pub mass_kg: f64,
    pub f_m_hz: f64,
    pub q_factor: f64,
    pub temp_k: f64,
    pub length_m: f64,
    pub gamma0_s: f64,
    pub gammap_s: f64,
    pub gammam_s: f64,
    pub lambda_m: f64,
    pub p_in_w: f64,
    pub g_mean_s: f64,
    pub g_diff_s: f64,
    #[serde(default)]
    pub detuning_s: f64,
}

pub const PRESET_NAMES: &[&str] = &["table1", "fig1"];

impl ParamSpec {
    /// Membrane and cavity of the reference device, pumped at G = 2.2e6 s⁻¹
    /// with the largest imbalance of the entangling regime, |G₊ − G₋| = 0.05 G.
    pub fn table1() -> Self {
        let g = 2.2e6;
        Self {
            mass_kg: 5e-11,
            f_m_hz: 2e6,
            q_factor: 0.6e7,
            temp_k: 10.0,
            length_m: 0.1,
            gamma0_s: 3e5,
            gammap_s: 3e5,
            gammam_s: 3e5,
            lambda_m: 1.55e-6,
            p_in_w: 1e-2,
            g_mean_s: g,
            g_diff_s: 0.05 * g,
            detuning_s: 0.0,
        }
    }

    /// Reference device at the spectral pump G = 2e6 γ_m, G₊ − G₋ = 1e4 γ_m.
    pub fn fig1() -> Self {
        Self::table1().with_pump_in_gamma_m(2e6, 1e4)
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "table1" => Ok(Self::table1()),
            "fig1" | "fig4" => Ok(Self::fig1()),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.message().replace('\n', " ")))
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("flat numeric table always serializes")
    }

    pub fn gamma_mech(&self) -> f64 {
        PI * self.f_m_hz / self.q_factor
    }

    /// Pump targets given in units of γ_m.
    pub fn with_pump_in_gamma_m(&self, g_mean: f64, g_diff: f64) -> Self {
        let gm = self.gamma_mech();
        Self { g_mean_s: g_mean * gm, g_diff_s: g_diff * gm, ..*self }
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let slot = match key {
            "mass_kg" => &mut self.mass_kg,
            "f_m_hz" => &mut self.f_m_hz,
            "q_factor" => &mut self.q_factor,
            "temp_k" => &mut self.temp_k,
            "length_m" => &mut self.length_m,
            "gamma0_s" => &mut self.gamma0_s,
            "gammap_s" => &mut self.gammap_s,
            "gammam_s" => &mut self.gammam_s,
            "lambda_m" => &mut self.lambda_m,
            "p_in_w" => &mut self.p_in_w,
            "g_mean_s" => &mut self.g_mean_s,
            "g_diff_s" => &mut self.g_diff_s,
            "detuning_s" => &mut self.detuning_s,
            other => return Err(Error::Parse(format!("unknown parameter key `{other}`"))),
        };
        *slot = value;
        Ok(())
    }

    fn uncoupled(&self) -> PhysicalParams {
        PhysicalParams {
            mass: self.mass_kg,
            omega_m: 2.0 * PI * self.f_m_hz,
            q_factor: self.q_factor,
            temperature: self.temp_k,
            length: self.length_m,
            gamma_0: self.gamma0_s,
            gamma_p: self.gammap_s,
            gamma_m_opt: self.gammam_s,
            lambda_0: self.lambda_m,
            p_in: self.p_in_w,
            eta_p: 0.0,
            eta_m: 0.0,
            delta_0: self.detuning_s,
        }
    }

    /// Solve couplings at the file's power and build the system.
    pub fn build(&self) -> Result<OptomechSystem> {
        OptomechSystem::new(self.uncoupled())?.with_pump_targets(self.g_mean_s, self.g_diff_s)
    }

    /// Apply `key=value` overrides.
    ///
    /// Pump-rate overrides move the targets. A `p_in_w` override changes the
    /// power of the device whose couplings were fixed at the original power,
    /// so G± scale with it.
    pub fn resolve(&self, overrides: &[(String, f64)]) -> Result<(Self, OptomechSystem)> {
        let mut spec = *self;
        let mut power = None;
        for (k, v) in overrides {
            if k == "p_in_w" {
                power = Some(*v);
            } else {
                spec.set(k, *v)?;
            }
        }
        let sys = spec.build()?;
        match power {
            Some(p) => Ok((spec, sys.with_power(p)?)),
            None => Ok((spec, sys)),
        }
    }
}
