use thiserror::Error;

/// Errors returned by the model, detection and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("no physical stationary root found (residual sign pattern is inconsistent)")]
    NoPhysicalRoot,

    #[error("time step {dt:e} s exceeds the stability limit {limit:e} s")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("resonant detection requires zero detunings (delta_a = {delta_a:e}, delta_c = {delta_c:e} rad/s)")]
    NotResonant { delta_a: f64, delta_c: f64 },

    #[error("homodyne detection requires delta_c = 0 (got {delta_c:e} rad/s)")]
    NotDispersive { delta_c: f64 },

    #[error("no interior maximum in [{lower:e}, {upper:e}]")]
    NoMaximumInBounds { lower: f64, upper: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
