//! Configuration, ingestion, artifact output and orchestration for the
//! `modelset` command-line tool.

pub mod config;
pub mod error;
pub mod ingest;
pub mod ops;
pub mod output;
pub mod run;

pub use config::{RunConfig, Verb};
pub use error::{CliError, Result};
pub use run::{run, RunOptions, RunReport};
