//! Experiment driver behind the command-line tool: configuration, the five
//! commands and their JSON reports.

mod commands;
mod config;
mod report;
pub mod suite;

pub use commands::{cmd_check, cmd_construct, cmd_family, cmd_learn, cmd_suite, register_base_set, run};
pub use config::{register_learners, ExperimentConfig, Fault, LearnerKind};
pub use report::*;
