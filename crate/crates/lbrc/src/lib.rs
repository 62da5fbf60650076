//! File formats and command implementations behind the `lbrc` binary.
//!
//! The numerical work lives in [`lbrc_core`]; this crate reads and writes
//! CSV, parses experiment configs and runs replications in parallel.

pub mod commands;
pub mod config;
pub mod error;
pub mod experiment;
pub mod io;

pub use error::CliError;
pub use lbrc_core;
