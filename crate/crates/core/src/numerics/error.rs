use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        found: String,
    },
    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("pair (A, B) is not stabilizable")]
    NotStabilizable,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl NumericsError {
    pub(crate) fn dims(op: &'static str, expected: impl ToString, found: impl ToString) -> Self {
        NumericsError::DimensionMismatch {
            op,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
