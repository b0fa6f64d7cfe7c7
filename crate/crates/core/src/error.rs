use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix entries must be finite ({context})")]
    NonFinite { context: &'static str },

    #[error("matrix is singular to working precision: pivot {pivot:.3e} at column {column} below threshold {threshold:.3e}")]
    Singular {
        column: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("eigenvalue iteration did not converge for a {n}x{n} matrix")]
    EigenNoConvergence { n: usize },

    #[error("{what} residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    Membership {
        what: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("fixed-point iteration diverged after {iterations} iterations (residual {residual:.3e})")]
    Divergence { iterations: usize, residual: f64 },

    #[error("fixed-point iteration hit the limit of {iterations} iterations (residual {residual:.3e})")]
    MaxIterations { iterations: usize, residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("step {step}: {cause}")]
    Step { step: usize, cause: Box<Error> },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
