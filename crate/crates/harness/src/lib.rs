//! Experiment harness and command-line front end for `depthcore`.

pub mod cli;
pub mod config;
pub mod deviation;
pub mod error;
pub mod experiments;
pub mod report;
pub mod selftest;

pub use config::{load_config, ExperimentConfig, RRule, Target};
pub use error::{HarnessError, Result};
