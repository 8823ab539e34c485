//! Experiment driver for the graphon estimation toolkit: configuration,
//! Monte Carlo sweeps over (n, k, graphon, sparsity, observed fraction),
//! rate-slope estimation, CSV emission, and text reports.

pub mod config;
pub mod error;
pub mod rate;
pub mod record;
pub mod report;
pub mod sweep;

pub use config::{auto_k, ExperimentConfig, FitConfig, GridPoint, Scenario};
pub use error::{CliError, Result};
pub use rate::{rate_fit, RateFit};
pub use record::{read_csv, strip_wall_time, write_csv, ResultRecord, CSV_HEADER};
pub use report::report;
pub use sweep::run_experiment;
