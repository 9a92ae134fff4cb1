use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("row {0} of the matrix is zero")]
    ZeroRow(usize),

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("row index {index} out of range for a system with {rows} rows")]
    IndexOutOfRange { index: usize, rows: usize },

    #[error("non-finite iterate component after {iterations} iterations")]
    NonFinite { iterations: u64 },

    #[error("reference solution is zero after {attempts} draws; lambda too large for this shape")]
    DegenerateTarget { attempts: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed CSV: {0}")]
    MalformedCsv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed problem file: {0}")]
    Json(#[from] serde_json::Error),
}
