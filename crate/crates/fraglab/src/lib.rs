//! Command-line driver and std runtime for `fraglab-core`: thread-pool
//! execution, TOML configs, CSV tables and JSON reports.

// `!(x <= y)` is used on purpose: it also catches NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod exec;
pub mod output;
pub mod spec;

pub use cli::run;
pub use config::{ExperimentConfig, Params};
pub use error::CliError;
pub use exec::Parallel;
pub use output::RunReport;
