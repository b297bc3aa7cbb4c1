//! Command-line front end and realtime sandbox server for `fibersim-core`.

pub mod commands;
pub mod error;
pub mod protocol;
pub mod report;
pub mod scenario;
pub mod server;
pub mod trajectory;

pub use error::CliError;
