//! Command-line front end for `schmidt-scope`: state and channel file
//! formats, report documents, and the subcommand implementations.

pub mod args;
pub mod commands;
pub mod error;
pub mod formats;

pub use args::Cli;
pub use commands::{run, Output};
pub use error::{CliError, Status};
