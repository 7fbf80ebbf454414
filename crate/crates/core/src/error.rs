use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A vector or matrix did not have the length the operation requires.
    #[error("shape mismatch for {what}: expected {expected}, got {actual}")]
    Shape {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("insufficient capacity: {required} bits required, {available} available")]
    Capacity { required: usize, available: usize },

    /// A text document (model file, sidecar, bit string) failed to parse.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid PGM: {0}")]
    Pgm(String),

    #[error("invalid value: {0}")]
    Invalid(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("training diverged at epoch {epoch}")]
    Diverged { epoch: usize },

    #[error("input space of 2^{bits} vectors exceeds the enumeration limit of 2^{limit}")]
    SpaceTooLarge { bits: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn shape(what: &'static str, expected: usize, actual: usize) -> Self {
        Error::Shape {
            what,
            expected,
            actual,
        }
    }
}
