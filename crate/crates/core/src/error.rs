use thiserror::Error;

/// Errors raised by the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix {which} is singular or not positive-definite")]
    SingularMatrix { which: &'static str },

    #[error("matrix {which} is not symmetric positive-definite at sampled point {sample}")]
    NotPositiveDefinite { which: &'static str, sample: usize },

    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("non-finite value at step {step}, index {index}")]
    NonFinite { step: usize, index: usize },

    #[error("trajectory crossing: Jacobian {value:.3e} <= 0 at label {label}")]
    TrajectoryCrossing { label: usize, value: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("initial density is not normalized: integral = {integral}")]
    NotNormalized { integral: f64 },

    #[error("label domain too small: boundary density ratio {ratio:.3e} exceeds 1e-3")]
    DomainTooSmall { ratio: f64 },

    #[error("CFL condition violated: dt*max|v|/dx = {courant:.3} > 0.9")]
    Cfl { courant: f64 },

    #[error("tridiagonal solver breakdown at row {row}")]
    SolverBreakdown { row: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
