//! Error type shared by every module of the crate.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported derivative order {order} (maximum {max})")]
    UnsupportedOrder { order: usize, max: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("no valid tau: {0}")]
    NoValidTau(String),

    #[error("diverging norm: {0}")]
    Diverging(String),

    #[error("accuracy target missed: {0}")]
    Accuracy(String),

    #[error("non-integrable weight: {0}")]
    NonIntegrable(String),

    #[error("rejection sampler acceptance rate {rate:.3e} is below 1e-3")]
    Envelope { rate: f64 },

    #[error("non-finite value: {0}")]
    Evaluation(String),

    #[error("rate fit: {0}")]
    Fit(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse grouping of errors, used by the command-line front end to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Contract,
    Numerical,
    Parse,
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Contract(_)
            | Error::DimensionMismatch { .. }
            | Error::UnsupportedOrder { .. }
            | Error::Parameter(_)
            | Error::NoValidTau(_) => ErrorClass::Contract,
            Error::Diverging(_)
            | Error::Accuracy(_)
            | Error::NonIntegrable(_)
            | Error::Envelope { .. }
            | Error::Evaluation(_)
            | Error::Fit(_) => ErrorClass::Numerical,
            Error::Parse(_) => ErrorClass::Parse,
            Error::Io(_) => ErrorClass::Io,
        }
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
