use thiserror::Error;

/// Errors raised by the operator-calculus kernels.
///
/// Variants are split so callers can tell a mathematical precondition
/// failure apart from malformed input or a numerical breakdown.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        found: String,
    },

    #[error("invalid tolerance {name} = {value}: must lie in (0, 1e-2)")]
    InvalidTolerance { name: &'static str, value: f64 },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("numerical kernel failure: {0}")]
    NumericalKernel(String),

    #[error("matrix is not symmetric: asymmetry {asymmetry:e} exceeds {threshold:e}")]
    NotSymmetric { asymmetry: f64, threshold: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {min_eigenvalue:e} below {threshold:e}")]
    NotPsd { min_eigenvalue: f64, threshold: f64 },

    #[error("subspaces are not complementary (dims {range_dim} + {null_dim} in R^{ambient})")]
    NotComplementary {
        range_dim: usize,
        null_dim: usize,
        ambient: usize,
    },

    #[error("operator and subspace are not compatible")]
    NotCompatible,

    #[error("precondition violated: {hypothesis}")]
    PreconditionViolated { hypothesis: &'static str },

    #[error("range of the right-hand side is not contained in the range of the operator")]
    RangeNotContained,

    #[error("assembled block matrix is not positive semidefinite")]
    BlockNotPsd,

    #[error("equivalent characterizations disagree: {what}")]
    Disagreement { what: &'static str },

    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),

    #[error("postcondition {name} failed with residual {residual:e}")]
    Postcondition { name: &'static str, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn mismatch(op: &'static str, expected: impl ToString, found: impl ToString) -> Error {
    Error::DimensionMismatch {
        op,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
