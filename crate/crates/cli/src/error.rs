use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input, bad flags or inconsistent dimensions.
    #[error("{0}")]
    Validation(String),

    /// The input is well formed but violates a mathematical precondition.
    #[error("{0}")]
    Precondition(String),

    #[error("{0}")]
    ResourceCap(String),

    #[error("{0}")]
    Numerical(String),

    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Io { .. } => 2,
            Error::Precondition(_) => 3,
            Error::ResourceCap(_) => 4,
            Error::Numerical(_) => 1,
        }
    }

    /// Wraps a library error with a short description of what was being computed.
    pub fn core(context: &str, e: asymkit::Error) -> Self {
        use asymkit::Error as E;
        let msg = format!("{context}: {e}");
        match e {
            E::CovarianceViolated { .. } | E::NotPsd { .. } | E::NotTracePreserving { .. } => Error::Precondition(msg),
            E::CapExceeded { .. } => Error::ResourceCap(msg),
            E::NonConvergence => Error::Numerical(msg),
            _ => Error::Validation(msg),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
