//! Configuration, parameter sweeps and CSV output for the `hetsim` binary.

pub mod config;
pub mod error;
pub mod sweep;

pub use config::{load_config, parse_config, write_config, ExperimentConfig, ScenarioSpec, SweepVariable};
pub use error::{ConfigError, SweepError};
pub use sweep::{read_csv, run_sweep, write_csv, SweepRow, CSV_HEADER};
