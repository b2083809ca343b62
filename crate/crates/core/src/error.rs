use thiserror::Error;

/// Errors raised by the library. Cloneable so lazily cached results can hand
/// the same failure to every reader.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{what}: size {requested} exceeds the enumeration cap {cap}")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("malformed permutation: {0}")]
    MalformedPermutation(String),
    #[error("factorization failed for block {block}: {reason}")]
    Factorization { block: String, reason: String },
    #[error("truncation violation: {0}")]
    Truncation(String),
    #[error("unknown selector: {0}")]
    UnknownSelector(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
