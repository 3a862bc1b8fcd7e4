use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Invalid parameters at construction time.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParams { field: &'static str, reason: String },

    /// Argument outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// No positive stationary profile `C r^(-2/(p-1))` exists for these parameters.
    #[error("no stationary profile: n = {n} >= 2p/(p-1) = {threshold}")]
    Regime { n: u32, threshold: f64 },

    /// Barrier case and problem regime disagree.
    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    /// A parameter search exhausted its range.
    #[error("search exhausted: {0}")]
    NotFound(String),

    /// Linear solve failure inside a time step.
    #[error("solver error: {0}")]
    Solve(String),

    /// Inconsistent maximal-solution schedule.
    #[error("schedule error: {0}")]
    Schedule(String),

    /// A sweep produced no critical-exponent bracket.
    #[error("sweep produced no critical-exponent estimate")]
    MissingEstimate,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParams {
        field,
        reason: reason.into(),
    }
}
