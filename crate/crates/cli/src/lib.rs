//! Library side of the `laxforge` command line: configuration, the
//! pipelines behind each command and the verification report.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use commands::{run, Outcome};
pub use config::{Cli, Command, Flags, RunConfig};
pub use error::{CliError, CliResult};
