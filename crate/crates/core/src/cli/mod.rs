//! Experiment configs, task orchestration and report output for the `endim` binary.

pub mod config;
pub mod emit;
pub mod presets;
pub mod run;

pub use config::{ExperimentConfig, Format, Task};
pub use emit::{RunReport, Status};
pub use presets::{preset, presets};
pub use run::{run, RunOptions};

use crate::error::Error;

/// Process exit code for a library error: 2 for configuration problems, 3 for budget or
/// capacity limits, 4 for broken invariants (including a code that is not a factor map), 1 for I/O
/// failures.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Invariant(_) | Error::FactorViolation(_) => 4,
        Error::Budget(_) | Error::Capacity(_) => 3,
        Error::Io(_) => 1,
        _ => 2,
    }
}
