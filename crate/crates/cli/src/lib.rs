//! Batch front-end for `lsq-core`: TOML experiment configs, CSV result tables,
//! parameter sweeps, plot data and the acceptance suite.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod config;
pub mod error;
pub mod experiment;
pub mod table;

pub use config::{ExperimentConfig, Kind};
pub use error::CliError;
pub use table::ResultTable;
