use std::io;

use thiserror::Error;

/// Errors produced by the embedding toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("invalid node id {0}")]
    InvalidNode(usize),

    #[error("unknown node '{0}'")]
    UnknownNode(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("graph too dense: could only find {found} of {wanted} non-edges")]
    TooDense { found: usize, wanted: usize },

    #[error("({src}, {dst}) is not a temporal edge at time {time}")]
    NotTemporalEdge { src: usize, dst: usize, time: f64 },

    #[error("corruption saturated after {0} attempts")]
    Saturated(usize),

    #[error("undefined relative stability: {0}")]
    UndefinedStability(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}
