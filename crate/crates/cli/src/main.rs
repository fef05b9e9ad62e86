use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use qcqp_vqe::document::{parse_instance, serialize_instance, ReportDocument};
use qcqp_vqe::dual::trace_csv;
use qcqp_vqe::generate::{gen_instance_with, GenOptions};
use qcqp_vqe::suite::{render_csv, render_markdown, run_suite, success_count, Suite, SuiteSpec};
use qcqp_vqe::{brute_force_solve, lp_solve, solve, DualConfig, Execution, LpStatus, VqeSettings};

const EXIT_NOT_CONVERGED: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "cvqe",
    version,
    about = "Constrained VQE for stochastic binary QCQPs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random instances.
    Gen(GenArgs),
    /// Run the dual-decomposition solver on an instance.
    Solve(SolveArgs),
    /// Solve an instance exactly.
    Oracle(OracleArgs),
    /// Run a benchmark suite.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(short = 'n', long = "qubits")]
    qubits: usize,
    #[arg(short = 'm', long = "constraints", default_value_t = 0)]
    constraints: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Shift constants until some constraint has a positive LP multiplier.
    #[arg(long)]
    ensure_active: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long)]
    mu0: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_outer: Option<usize>,
    /// Shots per constraint estimate in the dual update (0 = exact).
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Augmented-Lagrangian weight relative to the step size (0 = plain Lagrangian).
    #[arg(long)]
    penalty: Option<f64>,
}

impl SolverArgs {
    fn apply(&self, vqe: &mut VqeSettings, dual: &mut DualConfig) {
        if let Some(v) = self.mu0 {
            dual.mu0 = v;
        }
        if let Some(v) = self.alpha {
            dual.alpha = v;
        }
        if let Some(v) = self.tol {
            dual.tol = v;
        }
        if let Some(v) = self.max_outer {
            dual.max_outer = v;
        }
        if let Some(v) = self.shots {
            dual.shots = v;
        }
        if let Some(v) = self.penalty {
            dual.penalty = v;
        }
        if let Some(v) = self.restarts {
            vqe.restarts = v;
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleMode {
    Lp,
    Brute,
}

#[derive(Args)]
struct OracleArgs {
    instance: PathBuf,
    #[arg(long, value_enum)]
    mode: OracleMode,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteName {
    Table1,
    Feas30,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(value_enum)]
    suite: SuiteName,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    solver: SolverArgs,
    /// Solve instances one after another instead of on the thread pool.
    #[arg(long)]
    sequential: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Gen(a) => cmd_gen(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Oracle(a) => cmd_oracle(&a),
        Command::Bench(a) => cmd_bench(&a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".into())
}

fn read_instance(path: &Path) -> Result<qcqp_vqe::QcqpInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn cmd_gen(a: &GenArgs) -> Result<u8> {
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let opts = GenOptions {
        ensure_active: a.ensure_active,
        ..GenOptions::default()
    };
    for i in 0..a.count {
        let seed = a.seed.wrapping_add(i as u64);
        let inst = gen_instance_with(a.qubits, a.constraints, seed, &opts)?;
        let path = a.out.join(format!(
            "instance-n{}-m{}-s{seed}.json",
            a.qubits, a.constraints
        ));
        write(&path, &serialize_instance(&inst))?;
        println!("{}", path.display());
    }
    Ok(0)
}

fn cmd_solve(a: &SolveArgs) -> Result<u8> {
    let inst = read_instance(&a.instance)?;
    let mut vqe = VqeSettings::default();
    let mut dual = DualConfig::default();
    a.solver.apply(&mut vqe, &mut dual);
    let report = solve(&inst, &vqe, &dual, a.seed)?;

    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let name = stem(&a.instance);
    let report_path = a.out.join(format!("{name}.report.json"));
    let trace_path = a.out.join(format!("{name}.trace.csv"));
    write(
        &report_path,
        &ReportDocument::from_solve(&inst, &report).to_json(),
    )?;
    write(&trace_path, &trace_csv(&report))?;
    println!(
        "{}: converged={} outer={} objective={:?} lambda={:?} mode={}",
        name,
        report.converged,
        report.outer_iterations(),
        report.objective,
        report.lambda,
        report.mode_bitstring
    );
    Ok(if report.converged {
        0
    } else {
        EXIT_NOT_CONVERGED
    })
}

fn cmd_oracle(a: &OracleArgs) -> Result<u8> {
    let inst = read_instance(&a.instance)?;
    let name = stem(&a.instance);
    let (doc, infeasible, tag) = match a.mode {
        OracleMode::Lp => {
            let lp = lp_solve(&inst)?;
            let infeasible = lp.status == LpStatus::Infeasible;
            (ReportDocument::from_lp(&inst, &lp)?, infeasible, "lp")
        }
        OracleMode::Brute => {
            let bf = brute_force_solve(&inst)?;
            let infeasible = bf.best.is_none();
            (ReportDocument::from_brute(&inst, &bf)?, infeasible, "brute")
        }
    };
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let path = a.out.join(format!("{name}.{tag}.json"));
    write(&path, &doc.to_json())?;
    println!(
        "{}: status={:?} objective={:?}",
        name, doc.status, doc.objective
    );
    Ok(if infeasible { EXIT_INFEASIBLE } else { 0 })
}

fn cmd_bench(a: &BenchArgs) -> Result<u8> {
    let suite = match a.suite {
        SuiteName::Table1 => Suite::Table1,
        SuiteName::Feas30 => Suite::Feas30,
    };
    let mut spec = SuiteSpec::new(suite, a.seed);
    a.solver.apply(&mut spec.vqe, &mut spec.dual);
    if a.sequential {
        spec.execution = Execution::Sequential;
    }
    let outcomes = run_suite(&spec)?;
    let markdown = render_markdown(&spec, &outcomes);
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    write(&a.out.join(format!("{}.md", suite.name())), &markdown)?;
    write(
        &a.out.join(format!("{}.csv", suite.name())),
        &render_csv(&spec, &outcomes),
    )?;
    print!("{markdown}");
    if suite == Suite::Feas30 {
        println!(
            "\nStochastic-optimal {} / {}",
            success_count(&outcomes),
            outcomes.len()
        );
    }
    Ok(0)
}
