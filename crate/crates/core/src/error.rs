use thiserror::Error;

/// Errors raised by the arithmetic layers.
///
/// Variants are grouped by cause rather than by module, so callers (the CLI in
/// particular) can map them onto exit codes without knowing which operation
/// produced them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A value left the supported integer width or an enumeration budget.
    #[error("out of range: {0}")]
    Range(String),

    /// The input lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// `q` is not `p + 2`.
    #[error("not a twin-prime pair: p = {p}, q = {q}")]
    Twin { p: i128, q: i128 },

    /// `p` or `q` is composite.
    #[error("{0} is not prime")]
    Primality(i128),

    /// The twisting integer is not square-free or not coprime to 2pq.
    #[error("invalid twist: {0}")]
    Twist(String),

    /// The operation does not cover this input (no table row applies).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A bounded search ran out of room.
    #[error("search exhausted: {0}")]
    Exhaustion(String),

    /// Two routes that must agree did not. Always a bug.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    /// A numerical routine failed to converge.
    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn overflow(what: &str) -> Self {
        Error::Range(format!("overflow in {what}"))
    }
}
