use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The worst offending pair is reported so malformed inputs can be located.
    #[error(
        "operator is not Hermitian: |H[{row}][{col}] - conj(H[{col}][{row}])| = {deviation:.3e} exceeds {tolerance:.3e}"
    )]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
        tolerance: f64,
    },

    #[error("operator is not positive semidefinite: eigenvalue {eigenvalue:.3e} is below {tolerance:.3e}")]
    NotPsd { eigenvalue: f64, tolerance: f64 },

    #[error("density matrix has trace {trace}, expected 1")]
    BadTrace { trace: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("tensor power requires dimension {required}, which exceeds the limit {limit}")]
    DimensionGuard { required: u128, limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate support: {0}")]
    DegenerateSupport(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
