use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A numerical procedure failed (non-PD matrix, bracket not found, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// The requested quantity is undefined in this parameter regime.
    #[error("regime error: {0}")]
    Regime(String),
    /// Input data is degenerate (all zero, absorbed path, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the CLI: 2 for argument errors, 3 for
    /// numerical/runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Regime(_) | Error::Io(_) => 2,
            Error::Numerical(_) | Error::DegenerateInput(_) => 3,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn numerical(msg: impl Into<String>) -> Error {
    Error::Numerical(msg.into())
}
