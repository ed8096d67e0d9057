use thiserror::Error;

/// Errors raised by generators, samplers and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("graph would have {requested} vertices, above the cap of {cap}")]
    SizeCap { requested: u128, cap: usize },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("exhaustive cap exceeded: {0}")]
    CapExceeded(String),
    #[error("no admissible set: {0}")]
    NoAdmissibleSet(String),
    #[error("graph is disconnected: {0}")]
    Disconnected(String),
    #[error("linear system is singular")]
    Singular,
    #[error("solver did not converge: residual {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("retry cap exceeded: {0}")]
    RetryCap(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
