use thiserror::Error;

/// Errors raised by constructions, measurements and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parameters out of range: {0}")]
    OutOfRange(String),

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("eigensolver did not converge on a {0}x{0} matrix")]
    EigenNonConvergence(usize),

    #[error("certification failed after {attempts} attempts: {what}")]
    CertificationFailed { what: String, attempts: usize },

    #[error("subspace is not contained in the ambient space: {0}")]
    NotInAmbient(String),

    #[error("generator set is rank deficient: expected rank {expected}, found {found}")]
    RankDeficient { expected: usize, found: usize },

    #[error("operator norm {norm:e} exceeds bound {bound:e}")]
    NormBound { norm: f64, bound: f64 },

    #[error("observable {0} carries no POVM decomposition")]
    MissingDecomposition(usize),

    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("cannot read {path}: {source}")]
    Unreadable { path: String, source: std::io::Error },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
