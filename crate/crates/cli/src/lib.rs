//! Experiment harness for `qbnsl`: declarative TOML configs in,
//! comma-separated result tables and a JSON manifest out.

pub mod config;
mod error;
pub mod experiment;
pub mod histogram;
pub mod output;
pub mod table;

pub use config::{Algorithm, ExperimentConfig, Task};
pub use error::{CliError, Result};
pub use experiment::{run_experiment, ExperimentOutput, RunOptions};
pub use histogram::{emit_histogram, read_histogram, read_histogram_path};
pub use output::{replay, write_outputs, Manifest};
pub use table::{ResultRow, ResultTable};
