use std::path::Path;

use qlax_core::lax::{oracle_error, solve_lax, truncation_bound};
use qlax_core::par;
use serde_json::{json, Map};

use super::{inputs, resolved, Outcome, RunOptions, ORACLE_SLACK};
use crate::bundle::{num, sampled_nodes, Bundle, Diagnostics, Threshold, Timings};
use crate::error::{CliError, CliResult};
use crate::payload::element_entries;
use crate::problem::ProblemFile;

/// Largest `q0` of a halving pair whose error ratio is asserted; above it
/// the error is not yet in its asymptotic regime.
pub const RATIO_MAX_Q0: f64 = 0.25;
/// Oracle errors below this are integrator noise and carry no order
/// information.
pub const NOISE_FLOOR: f64 = 1e-12;

fn is_halving(a: f64, b: f64) -> bool {
    (a - 2.0 * b).abs() <= 1e-12 * a
}

/// Evaluates the flow at every `q0` of the sweep list. On matrix backends
/// also tabulates oracle errors and the observed convergence order.
pub fn run_sweep(pf: &ProblemFile, out: &Path, opts: &RunOptions) -> CliResult<Outcome> {
    let base = pf.lax_problem()?;
    let q0s = pf.sweep()?;
    let problems = q0s
        .iter()
        .map(|&q| base.with_q0(q))
        .collect::<qlax_core::Result<Vec<_>>>()
        .map_err(CliError::from_input)?;
    let matrix = base.l0.descriptor().is_matrix();
    let mut timings = Timings::new(opts.timings);

    let runs = par::try_map_slice(&problems, |p| {
        let res = solve_lax(p)?;
        let err = if matrix { Some(oracle_error(&res)?) } else { None };
        Ok::<_, qlax_core::Error>((res, err))
    })
    .map_err(CliError::from_run)?;
    timings.lap("solve");

    let mut bundle = Bundle::create(out)?;
    let nodes = sampled_nodes(&base.grid);
    let mut w = csv::Writer::from_path(bundle.file("sweep.csv"))?;
    let columns: Vec<String> = element_entries(&base.l0).into_iter().map(|(c, _)| c).collect();
    let mut header = vec!["q0".to_string(), "t".to_string()];
    header.extend(columns);
    w.write_record(&header)?;
    for (res, _) in &runs {
        let q0 = res.problem.q0;
        for &k in &nodes {
            let mut row = vec![num(q0), num(base.grid.time(k))];
            row.extend(element_entries(&res.values[k].evaluate(q0)).into_iter().map(|(_, v)| num(v)));
            w.write_record(&row)?;
        }
    }
    w.flush()?;

    let mut diag = Diagnostics::default();
    let mut skipped = Vec::new();
    if matrix {
        let order = base.order as f64;
        let band = Threshold::Band(order + 0.5, order + 1.5);
        let mut w = csv::Writer::from_path(bundle.file("convergence.csv"))?;
        w.write_record(["q0", "order", "oracle_error", "truncation_bound", "log2_ratio", "asserted"])?;
        for (i, (res, err)) in runs.iter().enumerate() {
            let q0 = res.problem.q0;
            let err = err.expect("matrix backend has oracle errors");
            let bound = truncation_bound(&res.problem);
            diag.push(&format!("oracle_error@q0={}", num(q0)), None, err, Threshold::Max(bound + ORACLE_SLACK));
            let mut ratio = String::new();
            let mut asserted = false;
            if i > 0 {
                let (prev, prev_err) = (runs[i - 1].0.problem.q0, runs[i - 1].1.expect("matrix"));
                if is_halving(prev, q0) {
                    let r = (prev_err / err).log2();
                    ratio = num(r);
                    asserted = prev <= RATIO_MAX_Q0 && err > NOISE_FLOOR;
                    if asserted {
                        diag.push(&format!("log2_ratio@q0={}", num(q0)), None, r, band);
                    }
                }
            }
            w.write_record([
                num(q0),
                base.order.to_string(),
                num(err),
                num(bound),
                ratio,
                asserted.to_string(),
            ])?;
        }
        w.flush()?;
    } else {
        skipped.push("oracle");
    }
    diag.write(&bundle.file("diagnostics.csv"))?;
    timings.lap("write");

    let mut extra = Map::new();
    extra.insert("resolved".into(), resolved(pf)?);
    extra.insert("sweep".into(), json!(q0s));
    extra.insert("skipped".into(), json!(skipped));
    bundle.finish("sweep", inputs(pf)?, extra, &diag, timings)?;
    Ok(Outcome::from_passed(diag.passed()))
}
