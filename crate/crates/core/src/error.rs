use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Domain(String),

    #[error("graph generation failed: {0}")]
    Generation(String),

    #[error("exponent fit failed: {0}")]
    Fit(String),

    #[error("dense oracle refused: N = {0} exceeds {1}")]
    TooLarge(usize, usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
