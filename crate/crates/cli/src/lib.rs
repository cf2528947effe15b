//! Library side of the `qram-sim` binary: configuration, the three
//! subcommands and their file outputs.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{cmd_example, cmd_montecarlo, cmd_run, Failure};
pub use config::{ConfigError, ExperimentConfig, TargetTypeEntry};
