//! Scenario configuration, execution and CSV/SVG reporting for the
//! `coulomblab` binary.

pub mod config;
pub mod runner;

pub use config::{parse_batch, ScenarioConfig};
pub use runner::{run, run_batch, selftest, thread_cap, CliError, Outcome};
