use thiserror::Error;

/// Errors raised by the verification library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("capability error: {0}")]
    Capability(String),

    #[error("jet order exhausted: {0}")]
    OrderExhausted(String),

    #[error("divergent integral: {0}")]
    Divergence(String),

    #[error("quadrature did not converge: {0}")]
    NotConverged(String),

    #[error("radial reduction not applicable: {0}")]
    ReductionNotApplicable(String),

    #[error("hypothesis violation: {0}")]
    Hypothesis(String),

    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),

    #[error("admissibility violation: {0}")]
    Admissibility(String),

    #[error("unknown statement id `{0}`")]
    UnknownStatement(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
