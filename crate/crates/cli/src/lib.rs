//! Library side of the `kljn` command-line tool.
//!
//! The binary is a thin wrapper: each subcommand maps onto one function here
//! so that the same code paths can be driven from tests.

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod error;

pub use commands::{check, run, solve, RunOptions, RunSummary};
pub use config::ConfigFile;
pub use error::CliError;

/// Exit status of a successful command or a passing security check.
pub const EXIT_OK: i32 = 0;
/// Usage, parse or I/O failure.
pub const EXIT_USAGE: i32 = 1;
/// The resistor quad cannot be made secure.
pub const EXIT_INFEASIBLE: i32 = 2;
/// Security check ran but failed.
pub const EXIT_INSECURE: i32 = 3;
