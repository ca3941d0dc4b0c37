//! Monte-Carlo simulation of recycling Bloom filters, report formats and
//! the `rbf` command line.
//!
//! Epochs are independent: each derives its seed from the experiment's
//! master seed and its index, so a report does not depend on how epochs are
//! scheduled across threads.

pub mod cli;
mod epoch;
mod error;
pub mod experiment;
pub mod format;
mod stats;
mod workload;

pub use epoch::{run_epoch, run_epoch_traced, EpochStats, EpochTrace, TraceOptions};
pub use error::{Result, SimError};
pub use experiment::{epoch_seed, predictions, run_experiment, ExperimentConfig, Prediction, SimulationReport};
pub use stats::{confidence_interval, RateSummary};
pub use workload::{Arrivals, Workload};
