//! Experiment runner for the homframe library: JSON configuration, named
//! scenarios, subcommands and deterministic CSV/JSON output.

pub mod commands;
pub mod config;
pub mod error;
pub mod matrix_io;
pub mod output;
pub mod scenarios;

pub use commands::{run, Command, RunOutput};
pub use config::ExperimentConfig;
pub use error::CliError;
pub use scenarios::{scenario_catalog, Scenario};
