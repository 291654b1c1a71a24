use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("empty interval: lower bound {lo} is not below upper bound {hi}")]
    EmptyInterval { lo: String, hi: String },

    #[error("parameter outside domain: {0}")]
    Domain(String),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("family is not rational-valued: {0}")]
    NotRational(String),

    #[error("no symbolic condition available for {0}")]
    NoSymbolicCondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("series error: {0}")]
    Series(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("demo failed: {0}")]
    DemoFailed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
