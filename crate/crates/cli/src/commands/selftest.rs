use std::path::Path;

use serde_json::{json, Map};

use super::{run_appendix, run_solve, run_sweep, run_symmetry, Outcome, RunOptions};
use crate::bundle::{Bundle, Diagnostics, Threshold, Timings};
use crate::error::CliResult;
use crate::problem::{AppendixFile, ProblemFile};

/// Built-in cases, each written to its own subdirectory.
pub const SELFTEST_CASES: [&str; 8] = [
    "solve-sl2-nilpotent",
    "solve-toda-3",
    "solve-rotation-2",
    "symmetry-toda-3",
    "symmetry-identity-rotation-2",
    "sweep-toda-3",
    "sweep-sl2-nilpotent",
    "appendix",
];

fn case(name: &str, dir: &Path, opts: &RunOptions) -> CliResult<Outcome> {
    match name {
        "solve-sl2-nilpotent" => run_solve(&ProblemFile::from_preset("sl2-nilpotent"), dir, opts),
        "solve-toda-3" => run_solve(&ProblemFile::from_preset("toda-3"), dir, opts),
        "solve-rotation-2" => run_solve(&ProblemFile::from_preset("rotation-2"), dir, opts),
        "symmetry-toda-3" => {
            let mut pf = ProblemFile::from_preset("toda-3");
            pf.order = 4;
            run_symmetry(&pf, dir, opts)
        }
        "symmetry-identity-rotation-2" => {
            let mut pf = ProblemFile::from_preset("rotation-2");
            pf.order = 4;
            pf.options.s0 = Some(json!("identity"));
            run_symmetry(&pf, dir, opts)
        }
        "sweep-toda-3" => {
            let mut pf = ProblemFile::from_preset("toda-3");
            pf.order = 4;
            pf.options.sweep = Some(vec![1.0, 0.5, 0.2, 0.1, 0.05]);
            run_sweep(&pf, dir, opts)
        }
        "sweep-sl2-nilpotent" => {
            let mut pf = ProblemFile::from_preset("sl2-nilpotent");
            pf.order = 4;
            pf.options.sweep = Some(vec![0.2, 0.1, 0.05]);
            run_sweep(&pf, dir, opts)
        }
        "appendix" => run_appendix(&AppendixFile::default(), dir, opts),
        other => unreachable!("unknown selftest case {other}"),
    }
}

/// Runs every built-in case; passes iff each case exits 0.
pub fn run_selftest(out: &Path, opts: &RunOptions) -> CliResult<Outcome> {
    let timings = Timings::new(opts.timings);
    let mut bundle = Bundle::create(out)?;
    let mut diag = Diagnostics::default();
    let mut w = csv::Writer::from_path(bundle.file("selftest.csv"))?;
    w.write_record(["case", "exit_code", "pass"])?;
    for name in SELFTEST_CASES {
        let code = match case(name, &out.join(name), opts) {
            Ok(o) => o.exit_code(),
            Err(e) => e.exit_code(),
        };
        diag.push(name, None, code as f64, Threshold::Max(0.0));
        w.write_record([name, &code.to_string(), &(code == 0).to_string()])?;
    }
    w.flush()?;
    diag.write(&bundle.file("diagnostics.csv"))?;
    let mut extra = Map::new();
    extra.insert("cases".into(), json!(SELFTEST_CASES));
    bundle.finish("selftest", json!({}), extra, &diag, timings)?;
    Ok(Outcome::from_passed(diag.passed()))
}
