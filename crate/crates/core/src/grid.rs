//! Spectral-frequency grids.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ResponseParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

impl std::str::FromStr for Spacing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log" => Ok(Spacing::Log),
            "linear" => Ok(Spacing::Linear),
            other => Err(Error::InvalidGrid(format!("unknown spacing `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyGrid {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

pub const DEFAULT_POINTS: usize = 400;

impl FrequencyGrid {
    pub fn new(omega_min: f64, omega_max: f64, points: usize, spacing: Spacing) -> Result<Self> {
        let g = Self { omega_min, omega_max, points, spacing };
        g.validate()?;
        Ok(g)
    }

    /// Log grid from 10⁻² γ_m to 10² × the larger optical rate.
    pub fn default_for(p: &ResponseParams) -> Self {
        Self {
            omega_min: 1e-2 * p.gamma_mech,
            omega_max: 1e2 * p.gamma_plus.max(p.gamma_minus),
            points: DEFAULT_POINTS,
            spacing: Spacing::Log,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {}", self.points)));
        }
        if !(self.omega_min.is_finite() && self.omega_max.is_finite()) || self.omega_max <= self.omega_min {
            return Err(Error::InvalidGrid(format!(
                "bounds must be finite with max > min, got [{}, {}]",
                self.omega_min, self.omega_max
            )));
        }
        if self.spacing == Spacing::Log && self.omega_min <= 0.0 {
            return Err(Error::InvalidGrid("log spacing needs positive bounds".into()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        let last = (n - 1) as f64;
        (0..n)
            .map(|i| match i {
                0 => self.omega_min,
                i if i == n - 1 => self.omega_max,
                i => {
                    let t = i as f64 / last;
                    match self.spacing {
                        Spacing::Linear => self.omega_min + t * (self.omega_max - self.omega_min),
                        Spacing::Log => (self.omega_min.ln() + t * (self.omega_max / self.omega_min).ln()).exp(),
                    }
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_exact_and_monotone() {
        for spacing in [Spacing::Log, Spacing::Linear] {
            let v = FrequencyGrid::new(0.01, 3e7, 400, spacing).unwrap().values();
            assert_eq!(v.len(), 400);
            assert_eq!(v[0], 0.01);
            assert_eq!(v[399], 3e7);
            assert!(v.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(FrequencyGrid::new(0.0, 1.0, 10, Spacing::Log).is_err());
        assert!(FrequencyGrid::new(1.0, 2.0, 1, Spacing::Linear).is_err());
        assert!(FrequencyGrid::new(2.0, 1.0, 10, Spacing::Linear).is_err());
    }
}
