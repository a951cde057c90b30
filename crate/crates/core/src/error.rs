use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("invalid block layout: {0}")]
    InvalidBlocks(String),

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("unsupported prox setup: {0}")]
    UnsupportedSetup(String),

    #[error("point outside the prox domain: {0}")]
    DomainViolation(String),

    #[error("point is not feasible (violation {violation:e})")]
    Infeasible { violation: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "power iteration did not converge after {iterations} iterations (last estimate {estimate})"
    )]
    NoConvergence { iterations: usize, estimate: f64 },

    #[error("non-finite iterate at outer k={k}, inner t={t}, coordinate {index}: {value}")]
    NonFiniteIterate {
        k: usize,
        t: usize,
        index: usize,
        value: f64,
    },

    #[error("unsupported structure for closed-form gap: {0} (use sup_gap_ascent)")]
    UnsupportedGap(String),

    #[error("not enough data: {0}")]
    NotEnoughData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
