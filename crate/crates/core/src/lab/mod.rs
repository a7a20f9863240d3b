//! Configuration-driven experiment runner: config schema, execution, and
//! the results.csv / meta.txt / SVG artifacts.

pub mod config;
pub mod report;
pub mod runner;

pub use config::{ExperimentConfig, ExperimentKind};
pub use report::{RunRecord, Table, Verdict};
pub use runner::{run, RunOptions};
