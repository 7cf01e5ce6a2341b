use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("invalid dimensions: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{location}: {message}")]
    Parse { location: String, message: String },

    #[error("{path}: {error}")]
    Io { path: String, error: std::io::Error },
}

impl Error {
    pub(crate) fn io(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
        move |error| Error::Io {
            path: path.display().to_string(),
            error,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
