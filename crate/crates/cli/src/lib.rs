//! Experiment drivers behind the `gwpd` binary: config parsing, CSV
//! emission, trajectory/ensemble runs, and the invariant-check suite.
//!
//! Exit-code contract of the binary: 0 success, 1 configuration or I/O
//! error, 2 numerical failure, 3 check failure.

pub mod checks;
pub mod config;
pub mod run;
pub mod table;

use std::fmt;

/// Driver-level error, carrying the exit class.
#[derive(Debug)]
pub enum CliError {
    Config(config::ConfigError),
    Io(std::io::Error),
    Numerical(gwpd_core::CoreError),
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::ChecksFailed { .. } => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
            CliError::ChecksFailed { failed, total } => {
                write!(f, "{failed} of {total} checks failed")
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<config::ConfigError> for CliError {
    fn from(e: config::ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<gwpd_core::CoreError> for CliError {
    fn from(e: gwpd_core::CoreError) -> Self {
        CliError::Numerical(e)
    }
}
