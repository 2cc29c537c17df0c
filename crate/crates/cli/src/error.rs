use hilmod_core::Error;
use thiserror::Error as ThisError;

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const VIOLATED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const NUMERIC: i32 = 3;
}

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot write {path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Non-convergence maps to 3; everything else the user can fix maps to 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::Numeric { .. }) => exit::NUMERIC,
            _ => exit::USAGE,
        }
    }
}
