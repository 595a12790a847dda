//! Command-line front end and local HTTP service for `mmp-core`.

pub mod commands;
pub mod input;
pub mod service;

pub use commands::dispatch;
pub use input::CliError;
