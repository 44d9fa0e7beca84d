//! Configuration-driven runs of `gfcount` scans.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{Command, Outcome, Run};
pub use config::RunConfig;
pub use error::{CliError, Result};
