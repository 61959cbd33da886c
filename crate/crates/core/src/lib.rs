//! Engine for cost-aware benchmarking of cross-project defect prediction.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. Datasets are
//! handed in fully loaded; results come back as plain data that the `costbench`
//! crate serialises.
//!
//! - [`dataset`]: instances, products, label modes.
//! - [`metrics`]: NECM, RelB, AUCEC and the usual classification metrics.
//! - [`stats`]: two-sample tests, Friedman/Nemenyi ranking, rankscores.
//! - [`approaches`]: baselines, data treatments and reference learners.
//! - [`runner`]: experiment planning, benchmark execution and aggregation.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod approaches;
pub mod dataset;
mod error;
mod math;
pub mod metrics;
pub mod runner;
pub mod stats;

pub use error::{Error, Result};
