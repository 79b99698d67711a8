use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violated the precondition of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{iterations} iterations exhausted while evaluating {what}")]
    Convergence {
        what: &'static str,
        iterations: usize,
    },

    #[error("root not bracketed on [{lo}, {hi}]")]
    NotBracketed { lo: f64, hi: f64 },

    #[error(
        "exact enumeration of 2^{n} sign vectors exceeds the cap 2^{cap}; use the Monte Carlo path"
    )]
    EnumerationTooLarge { n: usize, cap: usize },

    #[error("matrix is not a symmetric idempotent projector (deviation {deviation:e})")]
    NotProjector { deviation: f64 },

    #[error("quantile chain violated for d = {d}, delta = {delta}: {detail}")]
    ChainViolation { d: f64, delta: f64, detail: String },
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
