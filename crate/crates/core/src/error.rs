use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("model validation failed: {0}")]
    Validation(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("label alphabets differ: {0:?} vs {1:?}")]
    AlphabetMismatch(Vec<String>, Vec<String>),

    /// Positive-time kernels are only available in floating point.
    #[error("exact arithmetic is unavailable for a positive-time segment ({0})")]
    InexactTime(String),

    #[error("formula is not of uniform depth: offending subterm `{0}`")]
    NotUniform(String),

    #[error("operator `{operator}` is not part of the {instance} logic")]
    WrongInstance { operator: String, instance: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Validation(e.to_string())
    }
}
