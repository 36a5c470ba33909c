use std::path::Path;

use qlax_core::appendix::{BoundsReport, VelocityReport, NonRegularityWitness};
use serde_json::{json, Map, Value};

use super::{Outcome, RunOptions};
use crate::bundle::{num, write_json, Bundle, Diagnostics, Threshold, Timings};
use crate::error::{CliError, CliResult};
use crate::problem::AppendixFile;

pub const VELOCITY_THRESHOLD: f64 = 1e-6;
/// Point and time of the translation witness.
pub const WITNESS: (f64, f64) = (0.5, 0.6);

fn bounds_json(r: &BoundsReport) -> Value {
    json!({
        "t": r.t,
        "points": r.points,
        "value_violations": r.value_violations,
        "derivative_violations": r.derivative_violations,
        "min_value_slack": r.min_value_slack,
        "min_derivative_slack": r.min_derivative_slack,
        "pass": r.passed(),
    })
}

fn velocity_json(r: &VelocityReport) -> Value {
    json!({
        "analytic_max_deviation": r.analytic_max_deviation,
        "forward_max_deviation": r.forward_max_deviation,
        "backward_max_deviation": r.backward_max_deviation,
        "base_step": r.base_step,
        "threshold": VELOCITY_THRESHOLD,
        "pass": r.max_deviation() <= VELOCITY_THRESHOLD,
    })
}

fn witness_json(w: &NonRegularityWitness) -> Value {
    json!({
        "x": w.x,
        "t": w.t,
        "translation": w.translation,
        "translation_exits": w.translation_exits,
        "c_t": w.c_t,
        "c_t_inside": w.c_t_inside,
        "lower": w.lower,
        "upper": w.upper,
        "pass": w.translation_exits && w.c_t_inside,
    })
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Checks the diffeomorphism bounds, the velocity at `t = 0` and the
/// translation witness for an appendix model.
pub fn run_appendix(file: &AppendixFile, out: &Path, opts: &RunOptions) -> CliResult<Outcome> {
    let model = file.model();
    let times = file.times()?;
    let run = CliError::from_run;
    let mut timings = Timings::new(opts.timings);
    let mut diag = Diagnostics::default();
    let mut report = Map::new();
    report.insert(
        "model".into(),
        json!({ "poly": model.poly, "epsilon": model.epsilon, "points": model.points }),
    );
    report.insert("times".into(), json!(times));

    let outcome = match model.validate() {
        Err(e) => {
            report.insert("precondition".into(), json!({ "passed": false, "message": e.to_string() }));
            Outcome::Precondition
        }
        Ok(()) => {
            report.insert("precondition".into(), json!({ "passed": true }));
            let mut bounds = Vec::new();
            for &t in &times {
                let r = model.verify_diffeo_bounds(t).map_err(run)?;
                let at = format!("@t={}", num(t));
                diag.push(&format!("value_bound_violations{at}"), None, r.value_violations as f64, Threshold::Max(0.0));
                diag.push(
                    &format!("derivative_bound_violations{at}"),
                    None,
                    r.derivative_violations as f64,
                    Threshold::Max(0.0),
                );
                bounds.push(bounds_json(&r));
            }
            report.insert("bounds".into(), Value::Array(bounds));

            let v = model.velocity_at_zero().map_err(run)?;
            diag.push("velocity_at_zero", None, v.max_deviation(), Threshold::Max(VELOCITY_THRESHOLD));
            report.insert("velocity_at_zero".into(), velocity_json(&v));

            let w = model.demonstrate_nonregularity(WITNESS.0, WITNESS.1).map_err(run)?;
            diag.push("translation_exits", None, flag(w.translation_exits), Threshold::Band(1.0, 1.0));
            diag.push("c_t_inside", None, flag(w.c_t_inside), Threshold::Band(1.0, 1.0));
            report.insert("witness".into(), witness_json(&w));

            let samples = 101;
            let m = model.phi_monotonicity_violations(samples).map_err(run)?;
            diag.push("phi_monotonicity_violations", None, m as f64, Threshold::Max(0.0));
            report.insert("monotonicity".into(), json!({ "samples": samples, "violations": m, "pass": m == 0 }));
            Outcome::from_passed(diag.passed())
        }
    };
    timings.lap("checks");
    report.insert("passed".into(), json!(outcome == Outcome::Pass));

    let mut bundle = Bundle::create(out)?;
    write_json(&bundle.file("appendix.json"), &Value::Object(report))?;
    diag.write(&bundle.file("diagnostics.csv"))?;
    let mut extra = Map::new();
    extra.insert("outcome".into(), json!(format!("{outcome:?}").to_lowercase()));
    bundle.finish("appendix", serde_json::to_value(file)?, extra, &diag, timings)?;
    Ok(outcome)
}
