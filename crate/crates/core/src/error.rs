// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by grid construction, solvers and metrology routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("grid too narrow: covers [{start:.6e}, {end:.6e}] s but ±{required:.6e} s is needed")]
    GridTooNarrow { start: f64, end: f64, required: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("time step does not resolve the cavity: dt·κ = {dt_kappa:.4} exceeds {limit}")]
    Resolution { dt_kappa: f64, limit: f64 },

    #[error("signal {index} is not supported by {method}: {reason}")]
    UnsupportedSignal {
        index: usize,
        method: String,
        reason: String,
    },

    #[error("finite-difference step selection failed: {0}")]
    StepSelection(String),

    #[error("η = 1: the coherent/incoherent ratio grows without bound")]
    UnboundedGrowth,

    #[error("configuration error at `{key}`: {message}")]
    Config { key: String, message: String },
}

impl Error {
    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
