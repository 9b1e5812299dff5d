//! Error type shared by every subcommand, split along the exit-code contract:
//! configuration problems exit with 2, failures inside a computation with 3.

use std::fmt::Display;

use thiserror::Error;

/// Exit code for rejected input: flags, config files, graph files, vertex
/// references, parameter ranges.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for failures during an accepted computation: exhausted budgets,
/// solver breakdowns, unreachable tolerances.
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn config(msg: impl Display) -> Self {
        CliError::Config(msg.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

/// Call-site classification of library errors. Preconditions are checked (or
/// validated by constructors) before work starts, so constructor errors map to
/// [`CliError::Config`] and errors from a running computation to
/// [`CliError::Numeric`].
pub trait Classify<T> {
    fn or_config(self, context: &str) -> Result<T, CliError>;
    fn or_numeric(self, context: &str) -> Result<T, CliError>;
}

impl<T, E: Display> Classify<T> for Result<T, E> {
    fn or_config(self, context: &str) -> Result<T, CliError> {
        self.map_err(|e| CliError::Config(format!("{context}: {e}")))
    }

    fn or_numeric(self, context: &str) -> Result<T, CliError> {
        self.map_err(|e| CliError::Numeric(format!("{context}: {e}")))
    }
}
