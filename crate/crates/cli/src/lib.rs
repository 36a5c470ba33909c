//! Batch front end for q-deformed Lax flows.
//!
//! Problems come in as JSON files (or built-in presets), results go out as a
//! directory of CSV tables and a JSON manifest. Every diagnostic row carries
//! its threshold; the exit code is 0 when all rows pass, 1 when one fails,
//! 2 for schema errors, 3 for capability or numeric failures and 4 when an
//! appendix model violates its hypotheses.

pub mod bundle;
pub mod commands;
pub mod error;
pub mod payload;
pub mod problem;

pub use commands::{run_appendix, run_selftest, run_solve, run_sweep, run_symmetry, Outcome, RunOptions};
pub use error::{CliError, CliResult};
pub use problem::{AppendixFile, Overrides, ProblemFile};
