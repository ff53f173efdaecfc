use thiserror::Error;

/// Errors raised by matrix construction, validation and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: max |A - A*| = {asymmetry:e}")]
    NotHermitian { asymmetry: f64 },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error(
        "Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})"
    )]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("states not normalized (norm deviates by more than 1e-10) at indices {indices:?}")]
    NotNormalized { indices: Vec<usize> },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eig:e}")]
    NotPsd { min_eig: f64 },

    #[error("Gram matrix diagonal entry {index} is {value}, expected 1")]
    NotUnitDiagonal { index: usize, value: f64 },

    #[error("off-diagonal entry ({row}, {col}) has modulus {modulus} > 1")]
    EntryTooLarge {
        row: usize,
        col: usize,
        modulus: f64,
    },

    #[error("matrix is not circulant (shift deviation {deviation:e})")]
    NotCirculant { deviation: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("certificate verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
