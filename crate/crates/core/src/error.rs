// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

/// Errors returned by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("time series must contain at least one observation")]
    EmptySeries,
    #[error("observation at index {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error("noise scale must be positive and finite, got {0}")]
    InvalidSigma(f64),
    #[error("interval [{s}, {e}] is not admissible: {reason}")]
    InvalidInterval { s: usize, e: usize, reason: &'static str },
    #[error("invalid change-point set: {0}")]
    InvalidChangePoints(String),
    #[error("series of length {len} is too short: {what}")]
    TooShort { len: usize, what: &'static str },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
