//! Batch front-end: configuration parsing, grid evaluation and output.

pub mod config;
pub mod emit;
pub mod run;

use thiserror::Error;

pub use config::{parse_config, Command, Format, RunConfig, Sweep, SweepParameter};
pub use emit::{render, write_output};
pub use run::{run, ResultRow};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}
