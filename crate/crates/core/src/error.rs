use thiserror::Error;

/// Failures raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("infeasible pump targets: {0}")]
    Infeasible(String),

    #[error("singular response at omega = {omega} rad/s")]
    SingularResponse { omega: f64 },

    #[error("combination weights not normalized (|z+|^2 + |z-|^2 = {norm_sq})")]
    Unnormalized { norm_sq: f64 },

    #[error("bandwidth undefined: {0}")]
    BandwidthUndefined(String),

    #[error("parametric amplifier at or above threshold (g_par = {g_par}, threshold = {threshold})")]
    AboveThreshold { g_par: f64, threshold: f64 },

    #[error("sensor gain vanishes, no signal channel")]
    NoSignal,

    #[error("state is not a fixed point (residual {residual:e})")]
    NotFixedPoint { residual: f64 },

    #[error("integrator step size underflow at t = {t:e} s")]
    StepUnderflow { t: f64 },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("malformed parameters: {0}")]
    Parse(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

impl Error {
    /// Short stable identifier used in machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid-parameter",
            Error::Infeasible(_) => "infeasible",
            Error::SingularResponse { .. } => "singular-response",
            Error::Unnormalized { .. } => "unnormalized-weights",
            Error::BandwidthUndefined(_) => "bandwidth-undefined",
            Error::AboveThreshold { .. } => "above-threshold",
            Error::NoSignal => "no-signal",
            Error::NotFixedPoint { .. } => "not-fixed-point",
            Error::StepUnderflow { .. } => "step-underflow",
            Error::UnknownPreset(_) => "unknown-preset",
            Error::Parse(_) => "parse",
            Error::InvalidGrid(_) => "invalid-grid",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
