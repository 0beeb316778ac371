//! Experiment runner, configuration and file formats for `ovaplug`.

pub mod cli;
pub mod config;
mod error;
pub mod experiment;
pub mod samples;

pub use error::{LabError, LabResult};
