//! Library backing the `trustchain` binary.
//!
//! The binary is a thin argument parser; everything it does lives here so
//! scenarios and the acceptance suite can drive the same code in-process.

pub mod bench;
pub mod commands;
pub mod scenario;
pub mod workspace;

use std::process::ExitCode;

/// CLI failure modes, each with a fixed exit code.
///
/// * `0` — success
/// * `2` — a verification or protocol check failed
/// * `3` — bad usage (arguments, missing workspace, malformed input)
/// * `4` — an I/O error
#[derive(Debug)]
pub enum CliError {
    Verification(String),
    Usage(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Verification(_) => ExitCode::from(2),
            CliError::Usage(_) => ExitCode::from(3),
            CliError::Io(_) => ExitCode::from(4),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Verification(msg) => write!(f, "verification failed: {msg}"),
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}
