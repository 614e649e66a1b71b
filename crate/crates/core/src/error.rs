use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// An iterative method failed to reach its tolerance.
    #[error("numerical failure in {op}: {detail}")]
    Numerical { op: &'static str, detail: String },

    /// Malformed input data (income files).
    #[error("data error at line {line}: {detail}")]
    Data { line: usize, detail: String },

    /// Invalid configuration (distribution specs, simulation settings).
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        op,
        detail: detail.into(),
    }
}

pub(crate) fn numerical(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Numerical {
        op,
        detail: detail.into(),
    }
}
