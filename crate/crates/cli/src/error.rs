//! CLI error type with the stable exit-code contract: 0 success, 1 budget
//! or resource exhaustion, 2 invalid input.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config, files, or parameter combinations — exit code 2.
    Input(String),
    /// Budget overruns and I/O failures — exit code 1.
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Resource(_) => 1,
        }
    }

    pub fn input(msg: impl Into<String>) -> CliError {
        CliError::Input(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> CliError {
        CliError::Resource(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) | CliError::Resource(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<diffset_core::Error> for CliError {
    fn from(e: diffset_core::Error) -> CliError {
        match e {
            diffset_core::Error::Budget { .. } => CliError::Resource(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}
