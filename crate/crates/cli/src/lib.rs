//! Front end for `mlradon-core`: problem files, subcommands and the bundled
//! verification suite.

pub mod args;
pub mod commands;
pub mod spec;
pub mod verify;

use std::path::PathBuf;

use mlradon_core::{Error, ErrorClass};

pub use args::{Cli, Command};
pub use commands::run;
pub use spec::{parse_spec, ProblemSpec};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("line {line}: {source}")]
    Spec { line: usize, source: Error },

    #[error(transparent)]
    Core(#[from] Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("verification failed: {0}")]
    VerifyFailed(String),
}

impl CliError {
    /// Class of the underlying library error, if any.
    pub fn class(&self) -> Option<ErrorClass> {
        match self {
            CliError::Spec { source, .. } | CliError::Core(source) => Some(source.class()),
            _ => None,
        }
    }

    /// Parse 2, precondition 3, numerical 4, I/O 5, failed verification 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 5,
            CliError::VerifyFailed(_) => 1,
            _ => match self.class() {
                Some(ErrorClass::Parse) => 2,
                Some(ErrorClass::Precondition) => 3,
                Some(ErrorClass::Numerical) => 4,
                None => 1,
            },
        }
    }
}
