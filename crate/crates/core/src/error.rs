use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain is not covered by the background mesh: exterior face {face} ({a:?} - {b:?}) lies inside the domain")]
    Coverage {
        face: usize,
        a: [f64; 2],
        b: [f64; 2],
    },

    #[error("geometric assumption violated: {0}")]
    AssumptionViolation(String),

    #[error("numerically singular system: no acceptable pivot in column {pivot} (largest candidate {magnitude:e})")]
    SingularSystem { pivot: usize, magnitude: f64 },

    #[error("direct solve left relative residual {residual:e} above {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("system of size {n} exceeds the dense limit {limit}; use a coarser mesh")]
    SizeLimit { n: usize, limit: usize },

    #[error("error undefined: {0}")]
    Undefined(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
