//! Scenario files, task dispatch and reports for the `bmc` binary.

pub mod config;
pub mod report;
pub mod runner;
pub mod shorthand;
pub mod tasks;

pub use config::{load_config, parse_config, ConfigError, ScenarioConfig, TaskConfig};
pub use runner::{output_dir, run_scenario, RunOutput};
pub use tasks::Verdict;
