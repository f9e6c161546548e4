//! Batch front end: parses workspace files, resolves objects and runs
//! commands that emit JSON or text reports.

pub mod app;
pub mod commands;
pub mod error;
pub mod expr;
pub mod resolve;
pub mod workspace;

pub use app::{run, Cli, Outcome};
pub use error::CliError;
pub use workspace::Workspace;
