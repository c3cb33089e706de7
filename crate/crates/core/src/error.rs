use thiserror::Error;

/// Errors raised by the decision procedures, decompositions and witness builders.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NonConvergence { sweeps: usize },

    #[error("vector is not in the range of the matrix (residual {residual:.3e})")]
    NotInRange { residual: f64 },

    #[error("base matrix is not in the cone (worst violation {violation:.3e})")]
    InfeasibleBase { violation: f64 },

    #[error("pencil matrices are linearly dependent")]
    DegeneratePencil,

    #[error("quadratic image solve failed after {restarts} restarts (best residual {residual:.3e})")]
    SolveFailed { restarts: usize, residual: f64 },

    #[error("no pencil combination of rank at least three")]
    NotFound,

    #[error("cone specification carries no structured family tag")]
    UntaggedSpec,

    #[error("input matrix is not feasible for the cone (worst violation {violation:.3e})")]
    InfeasibleInput { violation: f64 },

    #[error("certificate does not support this operation: {0}")]
    CertificateMismatch(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("random sampling failed after {tries} tries")]
    SamplingFailed { tries: usize },

    #[error("subspace reduction failed: {0}")]
    ReductionFailed(String),

    #[error("matrix is not on the slice <B,X> = 1 (value {value:.6e})")]
    SliceMismatch { value: f64 },

    #[error("internal invariant failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
