//! Config-driven runner for the `gamesolve` library.
//!
//! A run is one JSON document naming a built-in game, a command and its
//! options. Outputs are a CSV trace (dynamics only) and a JSON report.
//! Exit codes: 0 success, 2 completed with a negative answer, 1 error.

pub mod config;
pub mod run;

pub use config::{ActionValue, Command, RunConfig};
pub use run::{execute, run, Outcome, RunOutput, REPORT_VERSION};

/// Exit code for configuration, I/O and solver errors.
pub const EXIT_ERROR: i32 = 1;
