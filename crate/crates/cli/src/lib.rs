//! Library behind the `lglab` binary: run configuration, the analysis report
//! and the subcommand bodies.

pub mod analysis;
pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

/// Version of the JSON report layout, echoed in every report.
pub const SCHEMA_VERSION: &str = "1";

pub use analysis::{analyze, AnalysisReport};
pub use config::RunConfig;
pub use error::{CliError, CliResult};
