use thiserror::Error;

/// Errors produced by the placement, bound and optimizer routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid port count {0}: at least 2 ports are required")]
    InvalidPortCount(usize),

    #[error("no minimum-redundancy index table entry for {0} ports")]
    UnsupportedPortCount(usize),

    #[error("infeasible constraints: {0}")]
    InfeasibleConstraints(String),

    #[error("unbounded CRB: {0}")]
    UnboundedCrb(&'static str),

    #[error("unbounded AoA-MSE bound: {0}")]
    UnboundedMseBound(&'static str),

    #[error("objective undefined: {0}")]
    UndefinedObjective(&'static str),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
