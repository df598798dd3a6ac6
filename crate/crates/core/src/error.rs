use std::io;

use crate::padic::Valuation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("outside the convergence domain: {0}")]
    Domain(String),

    #[error("precision exhausted: needed {needed} digits, {available} available")]
    Precision { needed: u32, available: u32 },

    #[error("Hensel lifting does not apply: |f(y0)| has valuation {f_valuation}, |f'(y0)| has valuation {derivative_valuation}")]
    NoConvergence {
        f_valuation: Valuation,
        derivative_valuation: Valuation,
    },

    /// A prime whose Wall exponent exceeds the configured cap. Such a prime
    /// would be the first known Wall–Sun–Sun prime with that exponent.
    #[error("Wall exponent of p = {p} exceeds the cap {cap}")]
    ExponentCap { p: u64, cap: u32 },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn inconsistent(msg: impl Into<String>) -> Self {
        Error::Inconsistency(msg.into())
    }
}
