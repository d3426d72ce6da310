//! Scenario runner for `bqfield`.
//!
//! The `bqsim` binary is a thin wrapper over this library: [`config`] parses
//! and validates scenario files, [`simulate`] runs evolutions and writes
//! diagnostics, [`checks`] cross-validates the light-cone solver and the
//! Lorentz closed forms, and [`identities`] runs the randomized identity
//! battery.

pub mod checks;
pub mod config;
pub mod identities;
pub mod profiles;
pub mod simulate;

use thiserror::Error;

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit status for bad input: unparsable or invalid configuration, bad flags.
pub const EXIT_VALIDATION: i32 = 1;
/// Exit status for failures during a run.
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid `{key}`: {reason}")]
    Config { key: String, reason: String },
    #[error("{0}")]
    Runtime(String),
    #[error(transparent)]
    Core(#[from] bqfield::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => EXIT_VALIDATION,
            CliError::Core(
                bqfield::Error::InvalidGrid(_)
                | bqfield::Error::InvalidParameter { .. }
                | bqfield::Error::Superluminal(_)
                | bqfield::Error::TimeStep { .. },
            ) => EXIT_VALIDATION,
            _ => EXIT_RUNTIME,
        }
    }
}
