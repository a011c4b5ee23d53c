use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An exact value would not fit the fixed-width arithmetic budget.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// An operation was called outside its precondition.
    #[error("usage error: {0}")]
    Usage(String),
    /// Problem input failed validation.
    #[error("invalid input: {0}")]
    Validation(String),
    /// An internal loop invariant did not hold.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
