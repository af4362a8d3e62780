use thiserror::Error;

/// Errors raised by the operators, the decomposition and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("singular origin: derivative of order {alpha} at node 0 requires z0 = 0")]
    SingularOrigin { alpha: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("unsupported problem: {0}")]
    Unsupported(String),
    #[error("singular pivot: {0}")]
    Singular(String),
    #[error("numerical failure: non-finite value at node {node}")]
    NumericalFailure { node: usize },
    #[error("grid mismatch: {0}")]
    Grid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
