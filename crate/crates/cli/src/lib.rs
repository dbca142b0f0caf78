//! Command-line front end: bounds, λ-sweeps, extremizers and simulator runs
//! as CSV or JSON reports.

pub mod config;
pub mod format;
pub mod run;

pub use config::{Command, Format, LambdaSpec, RunConfig};
pub use run::run;
