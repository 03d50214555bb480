use std::io;

use thiserror::Error;

/// Errors produced by designs, decoders, detectors and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate design: {0}")]
    DegenerateDesign(String),

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("unsupported design for this operation: {0}")]
    UnsupportedDesign(String),

    #[error("instance too large: {what} = {size} exceeds guard {guard}")]
    InstanceTooLarge { what: &'static str, size: u128, guard: u128 },

    #[error("outcomes violate the noiseless OR model: {0}")]
    ModelViolation(String),

    #[error("parameters outside the supported regime: {0}")]
    Regime(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
