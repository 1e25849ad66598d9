use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    /// An enumeration or search was refused because its input exceeds a cap.
    #[error("{what}: size {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("unsupported value: {0}")]
    Unsupported(String),

    #[error("level {level} out of range for a chain with {levels} levels")]
    LevelOutOfRange { level: usize, levels: usize },

    /// No solution exists; carries the conflicting part of the instance.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A guaranteed property failed to hold. Always a bug signal.
    #[error("internal invariant broken: {0}")]
    Internal(String),

    #[error("{path}: {msg}")]
    Parse { path: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded { .. } => 3,
            Error::Internal(_) => 1,
            Error::SpaceMismatch(_)
            | Error::Contract(_)
            | Error::Unsupported(_)
            | Error::LevelOutOfRange { .. }
            | Error::Infeasible(_)
            | Error::Parse { .. }
            | Error::Io(_) => 2,
        }
    }
}
