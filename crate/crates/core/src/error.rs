use thiserror::Error;

/// Errors raised by the symbolic and numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("boundary metric h0 is not positive definite")]
    NotPositiveDefinite,

    #[error("tensor is not symmetric at entry ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },

    #[error("coefficients violate the reality condition c(-xi) = conj(c(xi))")]
    NotReal,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("incompatible base exponents: {0}")]
    IncompatibleBase(String),

    #[error("log power {l} at order x^{j} exceeds the configured cap {cap}")]
    LogCapExceeded { j: usize, l: usize, cap: usize },

    #[error("order {j} is beyond the truncation order {trunc}")]
    BeyondTruncation { j: usize, trunc: usize },

    #[error("constant term is not invertible: {0}")]
    NotInvertible(String),

    #[error("pole of order {found} exceeds the expected order {expected}")]
    UnexpectedPoleOrder { expected: usize, found: usize },

    #[error("input outside the supported class: {0}")]
    Unsupported(String),

    #[error("ill-posed data: {0}")]
    IllPosed(String),

    #[error("gamma function pole at {0}")]
    GammaPole(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
