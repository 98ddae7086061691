//! Command-line harness: `drfeas solve | verify | compare | generate`.
//!
//! Exit codes: 0 on success (converged run, passing verification or comparison), 2 when a run
//! exhausts its iteration budget, 1 on any error or failed verdict.

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use drfeas::algorithms::{
    bi_dr, cyclic_dr, r_set_dr_scheme, reference_cyclic_projections, sa_dr, simultaneous_dr,
};
use drfeas::diagnostics::compare_trajectories;
use drfeas::harness::syntax::{
    format_float_list, format_float_lists, parse_float_list, parse_float_lists, parse_index_lists,
};
use drfeas::harness::{
    default_start, generate, load_problem, load_run, run_suite, save_problem, save_run,
    InstanceSpec, RunMetadata,
};
use drfeas::{BlockPlan, FeasibilityProblem, Point, RunRecord, StopConfig, StopReason, StringPlan};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "drfeas",
    version,
    about = "Douglas-Rachford solvers for convex feasibility problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one algorithm on a problem file or a generated instance.
    Solve(SolveArgs),
    /// Run the seeded property suites; exits nonzero on any failed verdict.
    Verify(VerifyArgs),
    /// Compare the iterates of two saved runs.
    Compare(CompareArgs),
    /// Write a generated instance as a problem file.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    SaDr,
    BiDr,
    RsetDr,
    CyclicDr,
    Sdr,
    Pocs,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.to_possible_value().expect("no skipped variants");
        f.write_str(name.get_name())
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    /// JSON problem file.
    #[arg(
        long,
        conflicts_with = "generate",
        required_unless_present = "generate"
    )]
    problem: Option<PathBuf>,
    /// Generator spec, e.g. `polytope:5x10:slack=0.3`, `ball_box_mix:3x2+2:slack=0.2`, `lines:2x2`.
    #[arg(long)]
    generate: Option<String>,
    /// Strings for sa-dr as 1-based index lists, e.g. `1,2,3;4,5`.
    #[arg(long)]
    strings: Option<String>,
    /// Blocks for bi-dr as 1-based index lists, e.g. `1,2,3;4,5`.
    #[arg(long)]
    blocks: Option<String>,
    /// Weights: one per string (sa-dr), per pair (sdr), per r = 2..m (rset-dr), or per block
    /// position separated by `;` (bi-dr). Equal weights when omitted.
    #[arg(long)]
    weights: Option<String>,
    /// Starting point as a comma list. Defaults to a seeded random point.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long = "step-tol", default_value_t = 1e-12)]
    step_tol: f64,
    #[arg(long = "max-iters", default_value_t = 100_000)]
    max_iters: usize,
    #[arg(long = "trace-stride", default_value_t = 1)]
    trace_stride: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trace CSV; sidecars `<stem>.iterates.csv` and `<stem>.meta.json` are written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// geometry, operators, algorithms, diagnostics or all.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Debug, Args)]
struct CompareArgs {
    first: PathBuf,
    second: PathBuf,
    #[arg(long)]
    tol: f64,
    #[arg(long = "stride-a", default_value_t = 1)]
    stride_a: usize,
    #[arg(long = "stride-b", default_value_t = 1)]
    stride_b: usize,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    spec: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

type CliResult<T> = Result<T, String>;

/// Parses `args` (including the program name) and runs the command, returning the exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Verify(args) => verify(args),
        Command::Compare(args) => compare(args),
        Command::Generate(args) => generate_cmd(args),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_ERROR
        }
    }
}

fn load_or_generate(args: &SolveArgs) -> CliResult<(FeasibilityProblem, String)> {
    match (&args.problem, &args.generate) {
        (Some(path), None) => Ok((
            load_problem(path).map_err(|e| e.to_string())?,
            path.display().to_string(),
        )),
        (None, Some(spec)) => {
            let spec = InstanceSpec::parse(spec, args.seed).map_err(|e| e.to_string())?;
            Ok((
                generate(&spec).map_err(|e| e.to_string())?,
                spec.to_string(),
            ))
        }
        _ => Err("exactly one of --problem and --generate is required".into()),
    }
}

fn check_flag_use(args: &SolveArgs) -> CliResult<()> {
    if args.strings.is_some() && args.algorithm != Algorithm::SaDr {
        return Err(format!(
            "--strings only applies to sa-dr, not {}",
            args.algorithm
        ));
    }
    if args.blocks.is_some() && args.algorithm != Algorithm::BiDr {
        return Err(format!(
            "--blocks only applies to bi-dr, not {}",
            args.algorithm
        ));
    }
    if args.weights.is_some() && matches!(args.algorithm, Algorithm::CyclicDr | Algorithm::Pocs) {
        return Err(format!("{} takes no weights", args.algorithm));
    }
    Ok(())
}

fn flat_weights(text: &Option<String>, count: usize) -> CliResult<Vec<f64>> {
    match text {
        Some(t) => parse_float_list(t).map_err(|e| e.to_string()),
        None => Ok(vec![1.0 / count as f64; count]),
    }
}

fn solve(args: SolveArgs) -> CliResult<i32> {
    check_flag_use(&args)?;
    let (problem, source) = load_or_generate(&args)?;
    let m = problem.num_sets();
    let x0 = match &args.x0 {
        Some(text) => {
            let coords = parse_float_list(text).map_err(|e| e.to_string())?;
            Point::new(coords).map_err(|e| format!("--x0: {e}"))?
        }
        None => default_start(&problem, args.seed),
    };
    let cfg = StopConfig {
        residual_tol: args.tol,
        step_tol: args.step_tol,
        max_iters: args.max_iters,
        trace_stride: args.trace_stride,
    };
    cfg.validate().map_err(|e| e.to_string())?;

    let mut plan_text = None;
    let mut weights_text = None;
    let run: drfeas::Result<RunRecord> = match args.algorithm {
        Algorithm::SaDr => {
            let strings = match &args.strings {
                Some(s) => parse_index_lists(s).map_err(|e| e.to_string())?,
                None => vec![(1..=m).collect()],
            };
            let weights = flat_weights(&args.weights, strings.len())?;
            let plan = StringPlan::new(strings, weights, m).map_err(|e| e.to_string())?;
            plan_text = Some(plan.to_string());
            weights_text = Some(format_float_list(plan.weights()));
            sa_dr(&problem, &plan, &x0, &cfg)
        }
        Algorithm::BiDr => {
            let blocks = match &args.blocks {
                Some(s) => parse_index_lists(s).map_err(|e| e.to_string())?,
                None => vec![(1..=m).collect()],
            };
            let plan = match &args.weights {
                Some(w) => {
                    BlockPlan::new(blocks, parse_float_lists(w).map_err(|e| e.to_string())?, m)
                }
                None => BlockPlan::with_equal_weights(blocks, m),
            }
            .map_err(|e| e.to_string())?;
            plan_text = Some(plan.to_string());
            weights_text = Some(format_float_lists(plan.weights()));
            bi_dr(&problem, &plan, &x0, &cfg)
        }
        Algorithm::RsetDr => {
            let weights = flat_weights(&args.weights, m.saturating_sub(1).max(1))?;
            weights_text = Some(format_float_list(&weights));
            r_set_dr_scheme(&problem, &weights, &x0, &cfg)
        }
        Algorithm::Sdr => {
            let weights = flat_weights(&args.weights, m)?;
            weights_text = Some(format_float_list(&weights));
            simultaneous_dr(&problem, &weights, &x0, &cfg)
        }
        Algorithm::CyclicDr => cyclic_dr(&problem, &x0, &cfg),
        Algorithm::Pocs => reference_cyclic_projections(&problem, &x0, &cfg),
    };
    let rec = run.map_err(|e| e.to_string())?;

    if let Some(out) = &args.out {
        let meta = RunMetadata {
            problem: Some(source),
            plan: plan_text,
            weights: weights_text,
            seed: Some(args.seed),
            residual_tol: Some(cfg.residual_tol),
            step_tol: Some(cfg.step_tol),
            max_iters: Some(cfg.max_iters),
            ..RunMetadata::for_record(&rec)
        };
        save_run(&rec, &meta, out).map_err(|e| e.to_string())?;
    }

    println!("algorithm: {}", rec.algorithm);
    println!("iterations: {}", rec.iterations);
    println!("stop_reason: {}", rec.stop_reason);
    println!("final_residual: {:e}", rec.final_residual());
    println!("x: {}", rec.final_iterate());
    Ok(match rec.stop_reason {
        StopReason::MaxIters => EXIT_BUDGET,
        _ => EXIT_OK,
    })
}

fn verify(args: VerifyArgs) -> CliResult<i32> {
    let cases = run_suite(&args.suite, args.seed).map_err(|e| e.to_string())?;
    let mut failed = 0;
    for c in &cases {
        println!("[{}] {}: {}", c.suite, c.name, c.verdict);
        if !c.verdict.passed {
            failed += 1;
        }
    }
    println!("{} cases, {failed} failed", cases.len());
    Ok(if failed == 0 { EXIT_OK } else { EXIT_ERROR })
}

fn compare(args: CompareArgs) -> CliResult<i32> {
    let (a, _) = load_run(&args.first).map_err(|e| e.to_string())?;
    let (b, _) = load_run(&args.second).map_err(|e| e.to_string())?;
    let verdict = compare_trajectories(&a, &b, args.tol, args.stride_a, args.stride_b)
        .map_err(|e| e.to_string())?;
    println!("{verdict}");
    Ok(if verdict.passed { EXIT_OK } else { EXIT_ERROR })
}

fn generate_cmd(args: GenerateArgs) -> CliResult<i32> {
    let spec = InstanceSpec::parse(&args.spec, args.seed).map_err(|e| e.to_string())?;
    let problem = generate(&spec).map_err(|e| e.to_string())?;
    save_problem(&problem, &args.out).map_err(|e| e.to_string())?;
    println!(
        "wrote {} sets in R^{} to {}",
        problem.num_sets(),
        problem.dim(),
        args.out.display()
    );
    Ok(EXIT_OK)
}
