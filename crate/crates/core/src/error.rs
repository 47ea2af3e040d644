use thiserror::Error;

/// Errors raised by the weight-function calculus.
///
/// Verdict-style outcomes (a bound that does not close, a Monte Carlo run
/// that diverges) are reported through the report types, never through
/// this enum.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {value} outside domain [{lo}, {hi}] of {what}")]
    Domain {
        what: String,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("{0} needs more precision than the configured representation offers")]
    Precision(String),

    #[error("exponential tower of depth {depth} exceeds the configured limit {limit}")]
    Overflow { depth: u32, limit: u32 },

    #[error("grid too small: need at least {needed} points, got {got}")]
    GridTooSmall { needed: usize, got: usize },

    #[error("objective is unbounded below on the search range (t = {0})")]
    UnboundedBelow(f64),

    #[error("objective is unbounded above on the search range (r = {0})")]
    UnboundedAbove(f64),

    #[error("series diverges: {0}")]
    Divergent(String),

    #[error("sequence value at index {index} is not positive")]
    NonPositive { index: usize },

    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("premise failed: {0}")]
    Premise(String),

    #[error("argument out of range: {0}")]
    Range(String),

    #[error("Gram matrix is not Hermitian (defect {0:e})")]
    NonHermitian(f64),

    #[error("sampler validation failed: {0}")]
    SamplerValidation(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(what: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Error::Domain {
            what: what.into(),
            value,
            lo,
            hi,
        }
    }
}
