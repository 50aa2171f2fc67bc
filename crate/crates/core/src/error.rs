use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}")]
    InvalidDimension(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("matrix is not symmetric (residual {residual:.3e})")]
    NotSymmetric { residual: f64 },
    #[error("operands carry different conjugations")]
    ConjugationMismatch,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid Schatten index p = {0}")]
    InvalidP(f64),
    #[error("invalid epsilon {0}")]
    InvalidEpsilon(f64),
    #[error("input must be nonzero")]
    ZeroInput,
    #[error("vector must be nonzero")]
    ZeroVector,
    #[error("vector is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },
    #[error("operator is not selfadjoint (residual {residual:.3e})")]
    NotSelfadjoint { residual: f64 },
    #[error("operator is not normal (residual {residual:.3e})")]
    NotNormal { residual: f64 },
    #[error("operator is not invertible (smallest singular value {sigma_min:.3e})")]
    NotInvertible { sigma_min: f64 },
    #[error("0 lies in sigma(T)+sigma(T): |lambda_{i} + lambda_{j}| = {value:.3e}")]
    SingularJordanMultiplier { i: usize, j: usize, value: f64 },
    #[error("dense Sylvester fallback is numerically singular")]
    NonDiagonalizable,
    #[error("parse error in field `{field}`: {message}")]
    Parse { field: String, message: String },
    #[error("bad suite configuration: {0}")]
    BadConfig(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }
}
