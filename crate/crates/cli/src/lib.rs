//! Library surface of the `ripa` binary: the JSON scenario schema, CSV/JSON
//! artifact rendering, and the drivers behind each subcommand. Everything the
//! binary does is callable from here so tests can exercise the exact code
//! paths the command line runs.

use std::fmt;

pub mod artifacts;
pub mod commands;
pub mod scenario;

/// One error type for the whole front end; the variant decides the process
/// exit code (config problems 2, operator/runtime problems 3, IO 1).
#[derive(Debug)]
pub enum CliError {
    /// The scenario or sweep description is malformed: bad JSON, wrong
    /// schema version, missing or contradictory fields.
    Config(String),
    /// The operator library rejected the construction or the run.
    Operator(ripa_core::Error),
    /// Reading a config or writing an artifact failed.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Operator(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> CliError {
        CliError::Config(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Operator(e) => write!(f, "operator error: {e}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ripa_core::Error> for CliError {
    fn from(e: ripa_core::Error) -> CliError {
        CliError::Operator(e)
    }
}
