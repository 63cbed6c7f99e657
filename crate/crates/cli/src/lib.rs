//! Command-line front end: sweeps that regenerate figure data, monogamy
//! threshold search, separability audits and protocol runs.

pub mod audit;
pub mod commands;
pub mod config;
pub mod error;
pub mod params;
pub mod protocol;
pub mod sweep;

pub use commands::{execute, Cli, Command};
pub use error::{CliError, CliResult};
