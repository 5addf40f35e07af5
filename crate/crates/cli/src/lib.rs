//! Command-line front end for the `tqm-core` experiments: config parsing,
//! the `run`, `sweep` and `verify` commands, and report writers.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{execute, Cli, Failure};
pub use config::{ConfigError, ExperimentConfig, OutputFormat, RawConfig};
