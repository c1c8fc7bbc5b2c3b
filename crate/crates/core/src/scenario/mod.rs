//! Scenario files, verification suites and run dispatch for the command
//! line tool.

pub mod config;
pub mod expr;
mod report;
mod run;
pub mod suites;

pub use config::{parse_config, parse_str, ConfigError, Mode, ScenarioConfig};
pub use report::{Bound, Check, VerificationReport};
pub use run::{run, RunOutcome, ScenarioError};
