use thiserror::Error;

/// Errors surfaced by the library.
///
/// `Internal` is reserved for broken invariants that the algorithm guarantees
/// cannot happen on well-formed input; seeing one means a bug upstream.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("synthesis failure: {0}")]
    SynthesisFailure(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("oracle budget exceeded: {needed} candidate assignments > budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn internal(msg: impl Into<String>) -> Error {
    Error::Internal(msg.into())
}
