use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("invalid edge: {0}")]
    InvalidEdge(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("invalid observable: {0}")]
    InvalidObservable(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid priors: {0}")]
    InvalidPriors(String),
    #[error("invalid bound: {0}")]
    InvalidBound(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("indeterminate feasibility: residual {residual:.3e} after {iterations} iterations")]
    Indeterminate { residual: f64, iterations: usize },
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;
