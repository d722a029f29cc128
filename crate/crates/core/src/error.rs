use thiserror::Error;

/// Errors raised by the model, the algorithms and the file parsers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} bits, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid correlation model: {0}")]
    InvalidModel(String),

    #[error("capacity exceeded: {what} is {got}, limit {limit}")]
    Capacity {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unsupported mode: {0}")]
    Mode(String),

    #[error("cover is incomplete: {0}")]
    Incomplete(String),

    #[error("no cover state anchors vertex {vertex} at bit {bit}")]
    Coverage { vertex: usize, bit: u8 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
