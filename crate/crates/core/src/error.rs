use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller handed us something that violates an operation's contract.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    /// G_α(σ) is not positive definite at the requested σ.
    #[error("sigma is outside the dual feasible domain")]
    DualInfeasible,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("instance too large: {vertices} vertices exceeds limit {limit}")]
    Size { vertices: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// Wrap a numeric error with the stage that produced it.
    pub fn context(self, what: &str) -> Self {
        match self {
            Error::Numeric(m) => Error::Numeric(format!("{what}: {m}")),
            Error::Precondition(m) => Error::Precondition(format!("{what}: {m}")),
            other => other,
        }
    }
}
