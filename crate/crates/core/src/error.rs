//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by state construction, linear algebra and optimizers.
#[derive(Debug, Error)]
pub enum Error {
    /// A square matrix was required.
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    /// Hermiticity check failed (Frobenius distance to the adjoint).
    #[error("matrix is not Hermitian (|M - M^H|_F = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    /// A positive-semidefinite matrix was required.
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    /// Rank filtering removed more probability mass than allowed.
    #[error("rank tolerance removed too much Schmidt mass ({removed:.3e})")]
    RankTolTooAggressive { removed: f64 },

    /// A parameter was outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The columns of the supplied matrix are not orthonormal.
    #[error("matrix is not an isometry (|V^H V - I|_F = {deviation:.3e})")]
    NotIsometry { deviation: f64 },

    /// Invalid optimizer configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The file is not valid JSON.
    #[error("parse error: {0}")]
    Parse(String),

    /// The file is valid JSON but does not match the state schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// A loaded state violates a type invariant (norm, trace, positivity).
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
