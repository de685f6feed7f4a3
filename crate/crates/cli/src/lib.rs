//! Experiment runner for sampled networks: 1D regression and MNIST sweeps
//! over scale schedules, and layer-probe spectra of trained or sampled
//! networks. Results are CSV files plus a metadata file and SVG charts.

pub mod args;
pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod runs;

pub use config::{RunConfig, Task};
pub use error::{CliError, CliResult};
