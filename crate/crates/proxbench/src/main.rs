//! Command-line benchmark harness.
//!
//! Subcommands: `solve` runs one solver on one instance and prints a
//! report; `bench` executes a suite descriptor into a records file;
//! `profile` turns a records file into performance-profile curves.
//!
//! Exit codes: 0 on full completion, 1 when any benchmark record carries
//! an error status (or output cannot be written), 2 on invalid
//! configuration.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use proxbench::emit::{self, Format};
use proxbench::profile::{performance_profile, ProfileMetric};
use proxbench::record::{RecordStatus, SolverId};
use proxbench::suite::{run_suite, SuiteDescriptor};
use proxssn::problems::{ProblemDescriptor, ProblemKind};
use proxssn::solver::{run_proxgd, run_proxssn};
use proxssn::{SolverConfig, StepMode};

#[derive(Parser)]
#[command(
    name = "proxbench",
    about = "Benchmark harness for projected semismooth Newton and proximal gradient solvers",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a single problem instance and print a run report.
    Solve(SolveArgs),
    /// Run a benchmark suite from a JSON descriptor into a records file.
    Bench(BenchArgs),
    /// Compute performance-profile curves from a records file.
    Profile(ProfileArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Problem family: spca, npca, slr, or bec.
    #[arg(long)]
    problem: ProblemKind,
    /// Solver: proxssn or proxgd.
    #[arg(long, default_value = "proxssn")]
    solver: SolverId,
    /// Sample count (data matrix rows); ignored by bec.
    #[arg(long, default_value_t = 50)]
    m: usize,
    /// Variable dimension (bec: complex dimension M).
    #[arg(long)]
    n: usize,
    /// Number of columns (spca/npca only).
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// Sparsity weight; for bec this is the interaction strength beta.
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Data seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// KKT stopping tolerance; default 1e-10*n*p (bec: 1e-6).
    #[arg(long)]
    tol: Option<f64>,
    /// Outer iteration cap.
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    /// Step-size regime: experiment (spectral) or theory (1/L scale).
    #[arg(long, default_value = "experiment")]
    mode: StepMode,
    /// Write the full run report (trace included) as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Suite descriptor JSON file.
    #[arg(long)]
    suite: PathBuf,
    /// Records output file.
    #[arg(long, default_value = "records.csv")]
    out: PathBuf,
    /// Output format; defaults to the extension of --out.
    #[arg(long)]
    format: Option<Format>,
    /// Concurrent instances.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct ProfileArgs {
    /// Records file (csv or json, inferred from the extension).
    #[arg(long)]
    records: PathBuf,
    /// Scoring metric: time or obj_gap.
    #[arg(long, default_value = "time")]
    metric: ProfileMetric,
    /// Curves output file.
    #[arg(long, default_value = "curves.csv")]
    out: PathBuf,
    /// Output format; defaults to the extension of --out.
    #[arg(long)]
    format: Option<Format>,
}

const EXIT_OK: u8 = 0;
const EXIT_RECORD_ERROR: u8 = 1;
const EXIT_BAD_CONFIG: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Profile(args) => cmd_profile(args),
    };
    ExitCode::from(code)
}

fn cmd_solve(args: SolveArgs) -> u8 {
    let desc = ProblemDescriptor {
        kind: args.problem,
        m: args.m,
        n: args.n,
        p: args.p,
        lambda: args.lambda,
        seed: args.seed,
        mode: args.mode,
    };
    let (rows, cols) = desc.dims();
    let tol = args.tol.unwrap_or(match args.problem {
        ProblemKind::Bec => 1e-6,
        _ => 1e-10 * (rows * cols) as f64,
    });
    if !(tol.is_finite() && tol > 0.0) {
        eprintln!("error: tol must be finite and positive, got {tol}");
        return EXIT_BAD_CONFIG;
    }
    let cfg = SolverConfig::for_mode(args.mode)
        .with_tol(tol)
        .with_max_iter(args.max_iter);
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return EXIT_BAD_CONFIG;
    }

    let (prob, x0) = desc.build();
    let report = match args.solver {
        SolverId::Proxssn => run_proxssn(&prob, &cfg, &x0),
        SolverId::Proxgd => run_proxgd(&prob, &cfg, &x0),
    };

    println!("problem      {}", desc.id());
    println!("solver       {}", args.solver);
    println!("status       {:?}", report.status);
    println!("iterations   {}", report.iters);
    println!(
        "newton       {} accepted / {} rejected",
        report.newton_accepted, report.newton_rejected
    );
    println!("objective    {:.12e}", report.obj);
    println!("kkt error    {:.3e} (tol {:.3e})", report.kkt_err, tol);
    println!("step size    {:.6e} (L = {:.6e})", report.t_used, report.l_estimate);
    println!("wall time    {:.3} s", report.wall_time_s);

    if let Some(path) = args.out {
        let file = match std::fs::File::create(&path) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_RECORD_ERROR;
            }
        };
        if let Err(e) = serde_json::to_writer_pretty(file, &report) {
            eprintln!("error: cannot serialize report: {e}");
            return EXIT_RECORD_ERROR;
        }
        println!("report       {}", path.display());
    }
    EXIT_OK
}

fn cmd_bench(args: BenchArgs) -> u8 {
    let text = match std::fs::read_to_string(&args.suite) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.suite.display());
            return EXIT_BAD_CONFIG;
        }
    };
    let suite: SuiteDescriptor = match serde_json::from_str(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: bad suite descriptor: {e}");
            return EXIT_BAD_CONFIG;
        }
    };
    let records = match run_suite(&suite, args.jobs) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_BAD_CONFIG;
        }
    };

    let format = args.format.unwrap_or_else(|| Format::from_path(&args.out));
    if let Err(e) = emit::write_records_file(&args.out, &records, format) {
        eprintln!("error: cannot write {}: {e}", args.out.display());
        return EXIT_RECORD_ERROR;
    }

    let errors = records
        .iter()
        .filter(|r| r.status == RecordStatus::Error)
        .count();
    let solved = records.iter().filter(|r| r.status.is_success()).count();
    println!(
        "{} records ({} solved, {} errors) -> {}",
        records.len(),
        solved,
        errors,
        args.out.display()
    );
    if errors > 0 {
        EXIT_RECORD_ERROR
    } else {
        EXIT_OK
    }
}

fn cmd_profile(args: ProfileArgs) -> u8 {
    let records = match emit::read_records_file(&args.records) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.records.display());
            return EXIT_BAD_CONFIG;
        }
    };
    let curves = match performance_profile(&records, args.metric) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_BAD_CONFIG;
        }
    };
    let format = args.format.unwrap_or_else(|| Format::from_path(&args.out));
    if let Err(e) = emit::write_curves_file(&args.out, &curves, format) {
        eprintln!("error: cannot write {}: {e}", args.out.display());
        return EXIT_RECORD_ERROR;
    }
    println!(
        "{} curves ({} samples each) -> {}",
        curves.len(),
        curves.first().map_or(0, |c| c.points.len()),
        args.out.display()
    );
    EXIT_OK
}
