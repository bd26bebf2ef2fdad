use thiserror::Error;

/// Errors raised by the simulator library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("blockade radius undefined without control field")]
    BlockadeUndefined,

    #[error("susceptibility series order {0} unsupported (max 2)")]
    UnsupportedOrder(u32),

    #[error("grid invalid: {0}")]
    Grid(String),

    #[error("time window too short: {field} at window edge is {ratio:.3e} of its peak")]
    TimeWindowTooShort { field: &'static str, ratio: f64 },

    #[error("non-finite field at step {step} (z = {position} um)")]
    NonFinite { step: usize, position: f64 },

    #[error("solutions do not share grids: {0}")]
    GridMismatch(String),

    #[error("analytic regime violated: {0}")]
    Regime(String),

    #[error("invalid input signal: {0}")]
    InvalidSignal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
