//! Many-path Monte Carlo runs, statistical identity checks, run
//! configuration files and report formats on top of `persistence-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod identities;
pub mod montecarlo;
pub mod output;

pub use error::{LabError, LabResult};
