use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line direction `a` must be nonzero")]
    ZeroDirection,

    #[error("line leaves the pole-free sector: {0}")]
    SectorViolation(String),

    #[error("invalid domain layout: {0}")]
    InvalidLayout(String),

    #[error("a*x + b vanishes at x = {x}")]
    ZeroArgument { x: f64 },

    #[error("square-root branch cut crossed between x = {from} and x = {to}")]
    BranchCutCrossed { from: f64, to: f64 },

    #[error("Chebyshev degree must be at least 1, got {0}")]
    InvalidDegree(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("evaluation point {0} lies outside [-1, 1]")]
    OutOfInterval(f64),

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("singular matrix: pivot magnitude {pivot:e} in column {column}")]
    SingularMatrix { column: usize, pivot: f64 },

    #[error("singular Jacobian at Newton iteration {iteration} (column {column}); a pole on or near the line is likely")]
    SingularJacobian { iteration: usize, column: usize },

    #[error("the asymptotic expansion is undefined at z = 0")]
    ZeroZ,

    #[error("s = 0 is the point at infinity where Omega is unbounded")]
    InfiniteZ,

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}
