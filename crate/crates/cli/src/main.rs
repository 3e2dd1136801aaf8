use std::path::PathBuf;
use std::process::ExitCode;

use abs_core::experiment::{self, GridSpec};
use abs_core::instance_io;
use abs_core::model::{self, RngSeed};
use abs_core::solvers::{self, SolverConfig, SolverKind};
use abs_core::{abs_recover, recover, SolverReport};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "abs", version, about = "Analysis-by-synthesis recovery experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a phase-transition grid and export success rates and timings.
    Phase(PhaseArgs),
    /// Recover a single serialized instance and print solver reports.
    Recover(RecoverArgs),
    /// Generate a random instance and write it to a file.
    Gen(GenArgs),
    /// Compare the exhaustive analysis and synthesis oracles on a small instance.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct PhaseArgs {
    /// Signal dimension d.
    #[arg(long, default_value_t = 200)]
    d: usize,
    /// Number of analysis operator rows N.
    #[arg(long, default_value_t = 240)]
    n: usize,
    /// Comma-separated delta values; defaults to 0.05, 0.10, ..., 0.95.
    #[arg(long, value_delimiter = ',')]
    delta: Option<Vec<f64>>,
    /// Comma-separated rho values; defaults to 0.05, 0.10, ..., 0.95.
    #[arg(long, value_delimiter = ',')]
    rho: Option<Vec<f64>>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, value_delimiter = ',', default_value = "omp-k,omp-eps,tst,bp,gap")]
    solvers: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = experiment::DEFAULT_SUCCESS_TOL)]
    success_tol: f64,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Directory for one `<solver>.pgm` success map per solver.
    #[arg(long)]
    out_pgm_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Write zeros in the CSV timing column so repeated runs compare byte for byte.
    #[arg(long)]
    no_timing: bool,
    /// Draw a fresh analysis operator for every cell.
    #[arg(long)]
    operator_per_cell: bool,
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Args)]
struct RecoverArgs {
    /// Instance file written by `abs gen`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "omp-k,omp-eps,tst,bp,gap")]
    solvers: Vec<String>,
    #[arg(long, default_value_t = experiment::DEFAULT_SUCCESS_TOL)]
    success_tol: f64,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 200)]
    d: usize,
    #[arg(long, default_value_t = 240)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    /// Read the instance from a file instead of generating one.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    d: usize,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 6)]
    m: usize,
    #[arg(long, default_value_t = 6)]
    l: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_solvers(names: &[String]) -> Result<Vec<SolverConfig>> {
    names
        .iter()
        .map(|n| Ok(SolverConfig::new(n.trim().parse::<SolverKind>()?)))
        .collect()
}

fn run_phase(args: PhaseArgs) -> Result<()> {
    let spec = GridSpec {
        d: args.d,
        n_rows: args.n,
        delta_values: args.delta.unwrap_or_else(experiment::default_axis),
        rho_values: args.rho.unwrap_or_else(experiment::default_axis),
        trials_per_cell: args.trials,
        solvers: parse_solvers(&args.solvers)?,
        success_tol: args.success_tol,
        master_seed: RngSeed(args.seed),
        operator_per_cell: args.operator_per_cell,
        jobs: args.jobs,
    };
    spec.validate()?;
    if let Some(dir) = &args.out_pgm_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let quiet = args.quiet;
    let step = (spec.instance_count() / 100).max(1);
    let progress = move |done: usize, total: usize| {
        if !quiet && (done % step == 0 || done == total) {
            eprint!("\r{done}/{total} instances");
            if done == total {
                eprintln!();
            }
        }
    };
    let grid = experiment::run_grid_with_progress(&spec, &progress)?;
    let exported = if args.no_timing {
        grid.without_timing()
    } else {
        grid.clone()
    };
    if let Some(path) = &args.out_csv {
        experiment::export_csv(&exported, path)?;
    }
    if let Some(dir) = &args.out_pgm_dir {
        for solver in grid.solvers() {
            experiment::export_success_map(&grid, solver, &dir.join(format!("{solver}.pgm")))?;
        }
    }
    for solver in grid.solvers() {
        println!(
            "{:>10}  mean success rate {:.3}",
            solver.name(),
            grid.mean_success_rate(solver).unwrap_or(0.0)
        );
    }
    print!("{}", experiment::timing_table(&grid));
    Ok(())
}

fn print_report(report: &SolverReport, x: &abs_core::Vector, success_tol: f64) {
    let rel = (&report.x_hat - x).norm() / x.norm();
    println!(
        "{:>16}  rel_err {:<12.3e} {}  status {:?}  iterations {}  residual {:.3e}  time {:.3} ms",
        report.solver.name(),
        rel,
        if rel < success_tol { "ok  " } else { "FAIL" },
        report.status,
        report.iterations,
        report.residual_norm,
        report.elapsed.as_secs_f64() * 1e3
    );
}

fn run_recover(args: RecoverArgs) -> Result<()> {
    let (op, inst) = instance_io::read_instance(&args.input)?;
    println!(
        "instance: N = {}, d = {}, m = {}, l = {}, seed = {}",
        op.n_rows(),
        op.dim(),
        inst.m(),
        inst.l(),
        inst.seed.0
    );
    for cfg in parse_solvers(&args.solvers)? {
        let cfg = match cfg.kind {
            SolverKind::OmpK | SolverKind::Tst => cfg.with_k(op.n_rows() - inst.l()),
            SolverKind::GapBaseline => cfg.with_k(inst.l()),
            _ => cfg,
        };
        match recover(&op, &inst.m_mat, &inst.y, &cfg) {
            Ok(report) => print_report(&report, &inst.x, args.success_tol),
            Err(e) => println!("{:>16}  error: {e}", cfg.kind.name()),
        }
    }
    Ok(())
}

fn run_gen(args: GenArgs) -> Result<()> {
    let seed = RngSeed(args.seed);
    let op = model::generate_tight_frame(args.n, args.d, seed.derive(0))?;
    let inst = model::make_instance(&op, args.delta, args.rho, seed.derive(1))?;
    instance_io::write_instance(&args.out, &op, &inst)?;
    println!(
        "wrote {} (N = {}, d = {}, m = {}, l = {})",
        args.out.display(),
        op.n_rows(),
        op.dim(),
        inst.m(),
        inst.l()
    );
    Ok(())
}

fn run_oracle(args: OracleArgs) -> Result<()> {
    let (op, inst) = match &args.input {
        Some(path) => instance_io::read_instance(path)?,
        None => {
            let seed = RngSeed(args.seed);
            let op = model::generate_tight_frame(args.n, args.d, seed.derive(0))?;
            let inst = model::make_instance_with_dims(&op, args.m, args.l, seed.derive(1))?;
            (op, inst)
        }
    };
    if op.n_rows() > 16 {
        bail!("exhaustive oracles are limited to N <= 16, got N = {}", op.n_rows());
    }
    let analysis = solvers::oracle_analysis(&op, &inst.m_mat, &inst.y, 0)?;
    let synthesis = abs_recover(
        &op,
        &inst.m_mat,
        &inst.y,
        &SolverConfig::oracle_synthesis(op.n_rows()),
    )?;
    let Some(x_analysis) = analysis.x else {
        bail!("analysis oracle found no feasible signal");
    };
    println!(
        "analysis oracle:  cosparsity {:?}, unique {}, cosupports tested {}",
        analysis.cosparsity, analysis.unique, analysis.cosupports_tested
    );
    let sparsity = synthesis.gamma_hat.iter().filter(|v| **v != 0.0).count();
    println!(
        "synthesis oracle: sparsity {sparsity} (N - l = {}), status {:?}, supports tested {}",
        op.n_rows() - analysis.cosparsity.unwrap_or(0),
        synthesis.status,
        synthesis.iterations
    );
    let gap = (&x_analysis - &synthesis.x_hat).norm() / x_analysis.norm().max(f64::MIN_POSITIVE);
    let truth = (&x_analysis - &inst.x).norm() / inst.x.norm();
    println!("relative difference analysis vs synthesis: {gap:.3e}");
    println!("relative error of analysis oracle vs ground truth: {truth:.3e}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Phase(args) => run_phase(args),
        Command::Recover(args) => run_recover(args),
        Command::Gen(args) => run_gen(args),
        Command::Oracle(args) => run_oracle(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
