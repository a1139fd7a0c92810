//! Command-line pipeline over the bibcite engine, plus the XML Abstracts
//! and RSS exporters.

pub mod commands;
pub mod export;
pub mod state;
pub mod xsd;

use thiserror::Error;

pub use commands::{run, Cli};

/// A failed command. Input errors exit with 1, internal errors with 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        CliError::Internal(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}
