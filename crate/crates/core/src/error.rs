use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or out-of-domain argument (zero where nonzero is required, non-prime p, ...).
    #[error("invalid argument: {0}")]
    Argument(String),
    /// A floating-point guard tripped: a zero or pole too close to a quadrature circle,
    /// or a root that failed to polish.
    #[error("numerical guard: {0}")]
    NumericalGuard(String),
    /// Input that is well formed but describes no valid object (singular lattice, indefinite Gram).
    #[error("infeasible input: {0}")]
    Infeasible(String),
    /// Combination of inputs the library does not handle.
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
