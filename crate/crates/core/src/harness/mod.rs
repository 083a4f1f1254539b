//! Monte Carlo experiment harness: configuration, complexity and signaling
//! counters, the seeded trial runner, and CSV/plot-data emission.

mod config;
mod counters;
mod output;
mod runner;

pub use config::{Algorithm, ConfigError, ExperimentConfig};
pub use counters::{predicted_counters, CounterVariant, EffortCounters};
pub use output::{emit_results, OutputError};
pub use runner::{build_scenario, run_experiment, trial_seed, TrialRecord};
