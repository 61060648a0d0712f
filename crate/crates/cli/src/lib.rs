//! Batch driver for hermitex experiments.
//!
//! Expansions are exchanged as line-oriented `HEXP v1` text files, and every
//! command writes a key/value report (sections `[inputs]`, `[results]`,
//! `[fit]`, `[verdict]`) with plot data in an adjacent CSV file.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod expansion_file;
pub mod function_spec;
pub mod report;

pub use cli::{run, Cli, Command};
pub use config::{ExperimentConfig, DEFAULT_SEED, MAX_DEGREE_ENV};
pub use error::CliError;
pub use expansion_file::ExpansionFile;
pub use report::{Csv, Report};
