//! Scenario files, the particle and reference runners, CSV/JSON output and
//! error metrics on top of `apmc-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod builtins;
mod error;
pub mod metrics;
pub mod output;
pub mod parallel;
pub mod report;
pub mod runner;
pub mod scenario;

pub use error::{Result, SimError};
pub use metrics::{compute_error, field_error, profile_error, Field, Norm};
pub use output::{read_csv, write_csv, write_run, Profile};
pub use parallel::Parallel;
pub use report::ComparisonReport;
pub use runner::{run_scenario, RunOptions, RunOutput};
pub use scenario::{Scenario, SchemeName};

/// Loads a scenario file, or a built-in when no such file exists.
pub fn resolve_scenario(arg: &str) -> Result<Scenario> {
    let path = std::path::Path::new(arg);
    if path.exists() {
        Scenario::load(path)
    } else {
        builtins::builtin(arg).ok_or_else(|| SimError::UnknownScenario(arg.to_owned()))
    }
}
