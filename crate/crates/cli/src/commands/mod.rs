mod appendix;
mod selftest;
mod solve;
mod sweep;
mod symmetry;

pub use appendix::run_appendix;
pub use selftest::{run_selftest, SELFTEST_CASES};
pub use solve::run_solve;
pub use sweep::{run_sweep, NOISE_FLOOR, RATIO_MAX_Q0};
pub use symmetry::run_symmetry;

use serde_json::{json, Value};

use crate::error::CliResult;
use crate::problem::ProblemFile;

/// Residual bound for centered-difference checks at the default grid.
pub const RESIDUAL_THRESHOLD: f64 = 1e-6;
/// Agreement between two solvers of the same equation.
pub const AGREEMENT_THRESHOLD: f64 = 1e-8;
pub const TRACE_THRESHOLD: f64 = 1e-8;
pub const AD_EXP_THRESHOLD: f64 = 1e-9;
pub const EXACT_THRESHOLD: f64 = 1e-12;
/// Integrator allowance added to the a-priori truncation bound when
/// comparing with the dense oracle.
pub const ORACLE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Record wall-clock timings in the manifest.
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// A diagnostic exceeded its threshold.
    Fail,
    /// The appendix model violates its hypotheses.
    Precondition,
}

impl Outcome {
    pub fn from_passed(passed: bool) -> Self {
        if passed {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Precondition => 4,
        }
    }
}

fn inputs(pf: &ProblemFile) -> CliResult<Value> {
    Ok(serde_json::to_value(pf)?)
}

fn resolved(pf: &ProblemFile) -> CliResult<Value> {
    Ok(json!({
        "backend": serde_json::to_value(pf.backend_spec()?)?,
        "q0": pf.q0,
        "order": pf.order,
        "grid": { "h": pf.grid.h, "T": pf.grid.horizon, "steps": pf.grid()?.steps() },
    }))
}
