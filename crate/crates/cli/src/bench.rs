//! Spectral-radius matrix over the catalog: 12 tests x n_max in {1, 2}.
//!
//! Writes to the output directory:
//! * `table2.csv`: one row per n_max, one column per test, estimated rho.
//! * `runs.csv`: per-run iteration count, convergence flag and rho.
//! * `timings.csv`: per-run wall time. Kept apart so the other files are
//!   byte-identical across invocations.
//! * `runs/<test>_nmax<k>_history.csv`: per-run convergence history.

use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use bsm_core::driver::run_multilevel;
use bsm_core::{IterationHistory, TestId};
use rayon::prelude::*;

use crate::output::{float, history_csv};
use crate::{invalid, SolverArgs, EXIT_NOT_CONVERGED};

const N_MAX: [usize; 2] = [1, 2];

struct BenchRun {
    id: TestId,
    n_max: usize,
    outcome: Result<IterationHistory, bsm_core::Error>,
    seconds: f64,
}

fn execute(args: &SolverArgs, id: TestId, n_max: usize) -> Result<BenchRun> {
    let problem = args.catalog_problem(id)?;
    let options = args.options(n_max)?;
    let start = Instant::now();
    let outcome = run_multilevel(&problem, &options).map(|s| s.history);
    Ok(BenchRun { id, n_max, outcome, seconds: start.elapsed().as_secs_f64() })
}

fn rho_cell(run: &BenchRun) -> String {
    match &run.outcome {
        Ok(h) => h.rho_estimate.map(float).unwrap_or_default(),
        Err(_) => String::new(),
    }
}

pub fn run(args: &SolverArgs, workers: usize) -> Result<ExitCode> {
    if workers == 0 {
        return Err(invalid("--workers must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().context("cannot start worker pool")?;
    let cases: Vec<(TestId, usize)> = N_MAX.iter().flat_map(|&k| TestId::ALL.map(|id| (id, k))).collect();
    let runs: Vec<BenchRun> =
        pool.install(|| cases.par_iter().map(|&(id, k)| execute(args, id, k)).collect::<Result<Vec<_>>>())?;

    let out = &args.out;
    let run_dir = out.join("runs");
    std::fs::create_dir_all(&run_dir).with_context(|| format!("cannot create {}", run_dir.display()))?;

    let header: Vec<&str> = TestId::ALL.iter().map(|id| id.name()).collect();
    let mut table = format!("n_max,{}\n", header.join(","));
    let mut runs_csv = String::from("test,n_max,iterations,converged,rho_estimate,error\n");
    let mut timings = String::from("test,n_max,wall_seconds\n");
    for &k in &N_MAX {
        let row: Vec<String> = runs.iter().filter(|r| r.n_max == k).map(rho_cell).collect();
        let _ = writeln!(table, "{k},{}", row.join(","));
    }
    let mut failures = Vec::new();
    let mut unconverged = 0;
    for r in &runs {
        let _ = writeln!(timings, "{},{},{:.6}", r.id, r.n_max, r.seconds);
        match &r.outcome {
            Ok(h) => {
                let _ = writeln!(runs_csv, "{},{},{},{},{},", r.id, r.n_max, h.iterations(), h.converged, rho_cell(r));
                let path = run_dir.join(format!("{}_nmax{}_history.csv", r.id, r.n_max));
                std::fs::write(&path, history_csv(h)).with_context(|| format!("cannot write {}", path.display()))?;
                if !h.converged {
                    unconverged += 1;
                }
            }
            Err(e) => {
                let _ = writeln!(runs_csv, "{},{},,false,,{}", r.id, r.n_max, e.to_string().replace(',', ";"));
                failures.push(format!("{} n_max={}: {e}", r.id, r.n_max));
            }
        }
    }
    for (name, text) in [("table2.csv", &table), ("runs.csv", &runs_csv), ("timings.csv", &timings)] {
        let path = out.join(name);
        std::fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    }

    println!("{:<6}{}", "n_max", header.iter().map(|h| format!("{h:>7}")).collect::<String>());
    for &k in &N_MAX {
        let cells: String = runs
            .iter()
            .filter(|r| r.n_max == k)
            .map(|r| match &r.outcome {
                Ok(h) => h.rho_estimate.map(|v| format!("{v:>7.3}")).unwrap_or_else(|| format!("{:>7}", "NA")),
                Err(_) => format!("{:>7}", "ERR"),
            })
            .collect();
        println!("{k:<6}{cells}");
    }

    if !failures.is_empty() {
        let first = runs.iter().find_map(|r| r.outcome.as_ref().err()).cloned();
        let err = anyhow!("{} of {} runs failed: {}", failures.len(), runs.len(), failures.join("; "));
        return Err(match first {
            Some(e) => anyhow::Error::new(e).context(err.to_string()),
            None => err,
        });
    }
    Ok(if unconverged == 0 { ExitCode::SUCCESS } else { ExitCode::from(EXIT_NOT_CONVERGED) })
}
