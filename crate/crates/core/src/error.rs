use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not self-adjoint (defect {0:e})")]
    NotSelfAdjoint(f64),

    #[error("matrix is not unitary (defect {0:e})")]
    NotUnitary(f64),

    #[error("principal logarithm undefined: the relative unitary has eigenvalue -1")]
    BranchCut,

    #[error("not a bijection: {0}")]
    NotBijection(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("input failed verification: {0}")]
    Unverified(String),

    #[error("reducible input: {0}")]
    Reducible(String),

    #[error("numerical breakdown: {0}")]
    Numerical(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Failures caused by floating point breakdown rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::BranchCut)
    }
}
