use thiserror::Error;

/// Failures surfaced by the command line, each with a stable exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error(transparent)]
    Solver(#[from] arbk::Error),
}

impl CliError {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 2 invalid input, 3 I/O failure, 4 degenerate target, 5 non-finite iterate.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Solver(e) => match e {
                arbk::Error::Io(_) => 3,
                arbk::Error::DegenerateTarget { .. } => 4,
                arbk::Error::NonFinite { .. } => 5,
                _ => 2,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
