use std::path::Path;

use qlax_core::dyson::left_log_derivative_residual;
use qlax_core::lax::{
    conserved_traces, lax_residual, oracle_error, solve_lax, truncation_bound, uniqueness_discrepancy,
};
use serde_json::{json, Map};

use super::{
    inputs, resolved, Outcome, RunOptions, AGREEMENT_THRESHOLD, ORACLE_SLACK, RESIDUAL_THRESHOLD,
    TRACE_THRESHOLD,
};
use crate::bundle::{num, series_json, write_flow, write_json, Bundle, Diagnostics, Threshold, Timings};
use crate::error::{CliError, CliResult};
use crate::problem::ProblemFile;

/// Solves the scaled Lax equation and checks it against its residual, the
/// direct integrator, trace conservation and the dense oracle.
pub fn run_solve(pf: &ProblemFile, out: &Path, opts: &RunOptions) -> CliResult<Outcome> {
    let problem = pf.lax_problem()?;
    let powers = pf.trace_powers()?;
    let run = CliError::from_run;
    let mut timings = Timings::new(opts.timings);

    let res = solve_lax(&problem).map_err(run)?;
    timings.lap("solve");

    let mut diag = Diagnostics::default();
    let mut skipped = Vec::new();
    diag.profile("lax_residual", &lax_residual(&res).map_err(run)?, RESIDUAL_THRESHOLD);
    let llog = left_log_derivative_residual(&res.group, &problem.path, problem.q0).map_err(run)?;
    diag.profile("left_log_residual", &llog, RESIDUAL_THRESHOLD);
    diag.profile("uniqueness", &uniqueness_discrepancy(&res).map_err(run)?, AGREEMENT_THRESHOLD);
    let mut traces = Vec::new();
    if problem.l0.descriptor().is_matrix() {
        for &k in &powers {
            let tr = conserved_traces(&res, k).map_err(run)?;
            diag.profile(&format!("trace_drift_k{k}"), &tr.drift, TRACE_THRESHOLD);
            traces.push(tr);
        }
        let err = oracle_error(&res).map_err(run)?;
        let bound = truncation_bound(&problem) + ORACLE_SLACK;
        diag.push("oracle_error", None, err, Threshold::Max(bound));
    } else {
        skipped.extend(["conserved_traces", "oracle"]);
    }
    timings.lap("diagnostics");

    let mut bundle = Bundle::create(out)?;
    write_flow(&bundle.file("flow.csv"), &problem.grid, &res.values)?;
    diag.write(&bundle.file("diagnostics.csv"))?;
    if !traces.is_empty() {
        let mut w = csv::Writer::from_path(bundle.file("traces.csv"))?;
        w.write_record(["power", "grade", "initial_re", "initial_im", "drift"])?;
        for tr in &traces {
            for (n, (z, d)) in tr.initial.iter().zip(tr.drift.grades()).enumerate() {
                w.write_record([
                    tr.power.to_string(),
                    n.to_string(),
                    num(z.re),
                    num(z.im),
                    num(*d),
                ])?;
            }
        }
        w.flush()?;
    }
    write_json(&bundle.file("series.json"), &series_json(&problem.grid, &res.values))?;
    timings.lap("write");

    let mut extra = Map::new();
    extra.insert("resolved".into(), resolved(pf)?);
    extra.insert("skipped".into(), json!(skipped));
    bundle.finish("solve", inputs(pf)?, extra, &diag, timings)?;
    Ok(Outcome::from_passed(diag.passed()))
}
