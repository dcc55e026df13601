use thiserror::Error;

/// Errors raised by the field kit, the functionals and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// Inputs outside the operation's domain (bad axis, shape mismatch, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition on the inputs does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The oscillator boundary-value problem sits on a resonance.
    #[error("resonant oscillator: sqrt(b - a^2) = {m} * pi (within {tol:e}); the problem has no unique solution")]
    Resonance { m: i64, tol: f64 },

    /// Singular factorization or failed linear solve.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Snapshot or configuration input could not be read.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
