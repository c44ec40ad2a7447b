//! Configuration, file formats, reports and orchestration around
//! `tsmrc-core`, plus the `tsmrc` command-line tool.

pub mod config;
pub mod error;
pub mod formats;
pub mod pipeline;
pub mod report;

pub use config::RunConfig;
pub use error::{CliError, CliResult};
