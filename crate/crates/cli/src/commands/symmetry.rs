use std::path::Path;

use qlax_core::lax::solve_lax;
use qlax_core::symmetry::{
    check_ad_exp_ad, equivariance_discrepancy, solve_symmetry, symmetry_residual,
    symmetry_residual_full,
};
use qlax_core::{GradeProfile, GradedSeries};
use serde_json::{json, Map};

use super::{
    inputs, resolved, Outcome, RunOptions, AD_EXP_THRESHOLD, AGREEMENT_THRESHOLD, EXACT_THRESHOLD,
    RESIDUAL_THRESHOLD,
};
use crate::bundle::{series_json, write_flow, write_json, Bundle, Diagnostics, Timings};
use crate::error::{CliError, CliResult};
use crate::problem::ProblemFile;

/// Solves the symmetry flow for `S0` and checks it against both residual
/// forms, the `Ad = exp(ad)` identity and, when `S0 = ad_{L0}`,
/// equivariance with the Lax flow.
pub fn run_symmetry(pf: &ProblemFile, out: &Path, opts: &RunOptions) -> CliResult<Outcome> {
    let problem = pf.lax_problem()?;
    let (kind, s0) = pf.initial_symmetry(&problem.l0)?;
    let run = CliError::from_run;
    let mut timings = Timings::new(opts.timings);

    let sym = solve_symmetry(&s0, &problem.path, problem.q0, problem.order, &problem.grid)
        .map_err(run)?;
    let lax = solve_lax(&problem).map_err(run)?;
    timings.lap("solve");

    let mut diag = Diagnostics::default();
    diag.profile("symmetry_residual", &symmetry_residual(&sym).map_err(run)?, RESIDUAL_THRESHOLD);
    diag.profile(
        "phi_q_residual",
        &symmetry_residual_full(&sym, &lax).map_err(run)?,
        RESIDUAL_THRESHOLD,
    );
    let ad_exp = check_ad_exp_ad(&problem.path, problem.q0, problem.order, &problem.grid, &problem.l0)
        .map_err(run)?;
    diag.profile("ad_exp_ad", &ad_exp, AD_EXP_THRESHOLD);
    match kind.as_str() {
        "ad-l0" => diag.profile(
            "equivariance",
            &equivariance_discrepancy(&sym, &lax).map_err(run)?,
            AGREEMENT_THRESHOLD,
        ),
        "identity" => {
            let unit = GradedSeries::constant(s0.clone(), problem.order);
            let mut worst = GradeProfile::zeros(problem.order);
            for v in &sym.values {
                worst.combine(&v.distances(&unit).map_err(run)?);
            }
            diag.profile("identity_deviation", &worst, EXACT_THRESHOLD);
        }
        _ => {}
    }
    timings.lap("diagnostics");

    let mut bundle = Bundle::create(out)?;
    write_flow(&bundle.file("flow.csv"), &problem.grid, &sym.values)?;
    diag.write(&bundle.file("diagnostics.csv"))?;
    write_json(&bundle.file("series.json"), &series_json(&problem.grid, &sym.values))?;
    timings.lap("write");

    let mut extra = Map::new();
    extra.insert("resolved".into(), resolved(pf)?);
    extra.insert("s0".into(), json!(kind));
    bundle.finish("symmetry", inputs(pf)?, extra, &diag, timings)?;
    Ok(Outcome::from_passed(diag.passed()))
}
