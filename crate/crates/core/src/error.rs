use thiserror::Error;

use crate::engine::ValidationError;

/// Crate-wide error type.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A value left the 63-bit range every sequence is computed in.
    #[error("arithmetic overflow: {0}")]
    Overflow(&'static str),

    /// An argument outside the operation's domain, e.g. `least_prime_factor(1)`.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid generator spec: {0}")]
    Validation(#[from] ValidationError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
