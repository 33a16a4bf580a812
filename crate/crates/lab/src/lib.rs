//! Experiment harness for the stampede simulations: JSON configs, seeded
//! runs, parameter sweeps, paired comparisons, and CSV/JSON output.

pub mod commands;
pub mod config;
pub mod error;
pub mod netfile;
pub mod output;

pub use config::{load_config, ExperimentConfig, Kind, LoadedConfig};
pub use error::{LabError, Result};
