use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qlax_cli::{
    run_appendix, run_selftest, run_solve, run_sweep, run_symmetry, AppendixFile, CliError,
    CliResult, Outcome, Overrides, ProblemFile, RunOptions,
};

#[derive(Parser)]
#[command(name = "qlax", version, about = "q-deformed Lax flows: solve, check and sweep")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ProblemArgs {
    /// Problem file (JSON, "schema": 1). Optional with --preset.
    problem: Option<PathBuf>,
    /// Built-in problem: sl2-nilpotent, toda-3 or rotation-2.
    #[arg(long)]
    preset: Option<String>,
    /// Truncation order N.
    #[arg(long = "order")]
    order: Option<usize>,
    #[arg(long)]
    q0: Option<f64>,
    /// Grid step h.
    #[arg(long)]
    step: Option<f64>,
    /// Time horizon T.
    #[arg(long)]
    horizon: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Output directory.
    #[arg(long, default_value = "qlax-out")]
    out: PathBuf,
    /// Record wall-clock timings in the manifest (breaks byte-identity).
    #[arg(long)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the scaled Lax equation and check the solution.
    Solve(ProblemArgs),
    /// Solve the symmetry flow for options.s0 and check it.
    Symmetry(ProblemArgs),
    /// Evaluate the flow over a list of q0 values.
    Sweep {
        #[command(flatten)]
        args: ProblemArgs,
        /// Comma-separated q0 list; replaces options.sweep.
        #[arg(long, value_delimiter = ',')]
        sweep: Option<Vec<f64>>,
    },
    /// Check the diffeomorphism-group example.
    Appendix {
        /// Appendix model file (JSON, "schema": 1).
        model: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run every built-in case.
    Selftest {
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn load(args: &ProblemArgs, sweep: Option<Vec<f64>>) -> CliResult<ProblemFile> {
    let base = match (&args.problem, &args.preset) {
        (Some(path), _) => ProblemFile::load(path)?,
        (None, Some(name)) => ProblemFile::from_preset(name),
        (None, None) => {
            return Err(CliError::Schema("give a problem file or --preset".into()))
        }
    };
    Ok(base.apply(&Overrides {
        order: args.order,
        q0: args.q0,
        step: args.step,
        horizon: args.horizon,
        preset: args.preset.clone(),
        sweep,
    }))
}

fn options(o: &OutputArgs) -> RunOptions {
    RunOptions { timings: o.timings }
}

#[cfg(feature = "parallel")]
fn configure_threads() {
    let Ok(value) = std::env::var("QLAX_THREADS") else {
        return;
    };
    match value.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("qlax: QLAX_THREADS ignored: {e}");
            }
        }
        _ => eprintln!("qlax: QLAX_THREADS={value:?} is not a positive integer; ignored"),
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads() {}

fn run(cli: Cli) -> CliResult<(Outcome, PathBuf)> {
    Ok(match cli.command {
        Command::Solve(a) => (run_solve(&load(&a, None)?, &a.output.out, &options(&a.output))?, a.output.out),
        Command::Symmetry(a) => {
            (run_symmetry(&load(&a, None)?, &a.output.out, &options(&a.output))?, a.output.out)
        }
        Command::Sweep { args, sweep } => {
            let pf = load(&args, sweep)?;
            (run_sweep(&pf, &args.output.out, &options(&args.output))?, args.output.out)
        }
        Command::Appendix { model, output } => {
            let file = match &model {
                Some(p) => AppendixFile::load(p)?,
                None => AppendixFile::default(),
            };
            (run_appendix(&file, &output.out, &options(&output))?, output.out)
        }
        Command::Selftest { output } => (run_selftest(&output.out, &options(&output))?, output.out),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(cli) {
        Ok((outcome, out)) => {
            let status = match outcome {
                Outcome::Pass => "all diagnostics pass",
                Outcome::Fail => "diagnostics FAILED",
                Outcome::Precondition => "model precondition FAILED",
            };
            println!("qlax: {status}; results in {}", out.display());
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("qlax: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
