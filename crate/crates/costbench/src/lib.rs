//! Command-line front end and file formats for `costbench-core`.
//!
//! - [`dataset_io`]: dataset manifests and per-product CSV files.
//! - [`manifest`]: run manifests (datasets, roster, configuration, output directory).
//! - [`document`]: the JSON results document and its CSV renderings.
//! - [`commands`]: the subcommands behind the `costbench` binary.

pub mod commands;
pub mod dataset_io;
pub mod display;
pub mod document;
mod error;
pub mod manifest;

pub use error::{CliError, LoadError};
