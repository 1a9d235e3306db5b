//! Experiment runner: config files, the commands behind the `pco`
//! binary, and the engine-versus-map oracle suites.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod oracle;

pub use commands::{execute, Artifacts, CommandError, Outcome};
pub use config::{load_config, parse_config, Command, ConfigError, ExperimentSpec};

/// Exit code for a passing run.
pub const EXIT_OK: i32 = 0;
/// Exit code when a check (oracle, acceptance) fails.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Exit code for usage and config errors.
pub const EXIT_CONFIG: i32 = 2;

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) | CommandError::Oracle(oracle::OracleError::NoGraphs) => EXIT_CONFIG,
            _ => EXIT_CHECK_FAILED,
        }
    }
}
