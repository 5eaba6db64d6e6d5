//! File formats, configuration and subcommands for the `trapnet` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod graph_file;
pub mod report;

pub use commands::{run, Status};
pub use config::{Command, RunConfig};
pub use error::CliError;
