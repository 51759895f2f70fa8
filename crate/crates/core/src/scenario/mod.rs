//! Scenario files, the experiment runner and report writers.

mod config;
mod report;
mod run;

pub use config::*;
pub use report::*;
pub use run::*;
