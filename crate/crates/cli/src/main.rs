//! `bsm`: command-line front end for the binary stochastic mixture solvers.

mod bench;
mod output;
mod problem_file;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use bsm_core::baseline::run_source_iteration;
use bsm_core::driver::run_multilevel;
use bsm_core::problem::{build_test, DEFAULT_CELLS, DEFAULT_NODES_PER_HALF};
use bsm_core::{IterationOptions, ProblemSpec, TestId};
use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{Emit, RunReport};

const EXIT_NOT_CONVERGED: u8 = 2;
const EXIT_INVALID_INPUT: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

/// Rejected user input: bad flags, unknown test ids, malformed problem files.
#[derive(Debug)]
pub struct InvalidInput(pub String);

impl fmt::Display for InvalidInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InvalidInput {}

#[derive(Parser, Debug)]
#[command(name = "bsm", version, about = "Transport in binary stochastic mixtures: multilevel and source-iteration solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one catalog test or problem file.
    Solve(SolveArgs),
    /// Run all catalog tests for n_max = 1 and 2 and tabulate spectral radii.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Multilevel,
    Si,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Multilevel => "multilevel",
            Algorithm::Si => "si",
        })
    }
}

/// Options shared by `solve` and `bench`.
#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Relative stopping tolerance on the ensemble scalar flux.
    #[arg(long, default_value_t = 1e-10)]
    epsilon: f64,
    /// Maximum number of outer iterations.
    #[arg(long, default_value_t = 200)]
    max_iterations: usize,
    /// Number of spatial cells (overrides a problem file).
    #[arg(long)]
    cells: Option<usize>,
    /// Gauss-Legendre nodes per half-range.
    #[arg(long, default_value_t = DEFAULT_NODES_PER_HALF)]
    quad_order: usize,
    /// Skip the half-range rescale of the angular fluxes after prolongation.
    #[arg(long)]
    no_angular_rescale: bool,
    /// Output directory.
    #[arg(long, env = "BSM_OUT_DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Catalog test id (A1..D3).
    #[arg(long, conflicts_with = "problem_file", required_unless_present = "problem_file")]
    test: Option<String>,
    /// TOML problem description.
    #[arg(long)]
    problem_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Algorithm::Multilevel)]
    algorithm: Algorithm,
    /// Gauss-Seidel transport cycles per outer iteration.
    #[arg(long, default_value_t = 1)]
    nmax: usize,
    /// Outputs to produce.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "history,flux,summary")]
    emit: Vec<Emit>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Number of runs executed concurrently.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[command(flatten)]
    solver: SolverArgs,
}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    InvalidInput(msg.into()).into()
}

impl SolverArgs {
    fn options(&self, n_max: usize) -> Result<IterationOptions> {
        let options = IterationOptions {
            epsilon: self.epsilon,
            max_iterations: self.max_iterations,
            n_max,
            angular_rescale: !self.no_angular_rescale,
            ..IterationOptions::default()
        };
        options.validate()?;
        Ok(options)
    }

    fn catalog_problem(&self, id: TestId) -> Result<ProblemSpec> {
        Ok(build_test(id, self.cells.unwrap_or(DEFAULT_CELLS), self.quad_order)?)
    }
}

fn parse_test(text: &str) -> Result<TestId> {
    text.parse::<TestId>()
        .map_err(|_| invalid(format!("unknown test id '{text}' (expected A1..D3)")))
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode> {
    let options = args.solver.options(args.nmax)?;
    let (name, problem) = match (&args.test, &args.problem_file) {
        (Some(t), None) => {
            let id = parse_test(t)?;
            (id.name().to_string(), args.solver.catalog_problem(id)?)
        }
        (None, Some(path)) => {
            let problem = problem_file::load(path, args.solver.cells, args.solver.quad_order)?;
            let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "problem".into());
            (name, problem)
        }
        _ => return Err(invalid("exactly one of --test and --problem-file is required")),
    };
    let report = match args.algorithm {
        Algorithm::Multilevel => RunReport::from_multilevel(&problem, &run_multilevel(&problem, &options)?),
        Algorithm::Si => RunReport::from_source_iteration(&problem, &run_source_iteration(&problem, &options)?),
    };
    std::fs::create_dir_all(&args.solver.out)
        .with_context(|| format!("cannot create output directory {}", args.solver.out.display()))?;
    if args.emit.contains(&Emit::History) {
        output::write_history(&args.solver.out.join("history.csv"), &report.history)?;
    }
    if args.emit.contains(&Emit::Flux) {
        output::write_flux(&args.solver.out.join("flux.csv"), &report)?;
    }
    if args.emit.contains(&Emit::Summary) {
        let line = output::summary_line(&name, &args.algorithm.to_string(), args.nmax, &report.history);
        println!("{line}");
        output::write_summary(&args.solver.out.join("summary.csv"), &name, &args.algorithm.to_string(), args.nmax, &report.history)?;
    }
    Ok(if report.history.converged { ExitCode::SUCCESS } else { ExitCode::from(EXIT_NOT_CONVERGED) })
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<InvalidInput>() {
            return EXIT_INVALID_INPUT;
        }
        if let Some(e) = cause.downcast_ref::<bsm_core::Error>() {
            return match e {
                bsm_core::Error::InvalidArgument(_) => EXIT_INVALID_INPUT,
                _ => EXIT_NUMERICAL,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => bench::run(&args.solver, args.workers),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
