//! Experiment harness around the qsearch library: textual configuration,
//! deterministic scenario runners, CSV emission, and parameter sweeps.
//! The binary in main.rs is a thin shell over these modules so tests can
//! drive scenarios in-process.

pub mod config;
pub mod csvout;
pub mod scenario;
pub mod sweep;

pub use config::{ConfigError, ExperimentConfig, Scenario};
pub use csvout::CsvDoc;
pub use scenario::{run_scenario, RunFailure, ScenarioOutput, Summary};
