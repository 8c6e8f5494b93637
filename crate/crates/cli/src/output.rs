//! CSV and summary emission. Floats are written with 17 significant digits
//! so that every value round-trips exactly.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use bsm_core::baseline::SourceIterationSolution;
use bsm_core::driver::MultilevelSolution;
use bsm_core::highorder::angular_moments;
use bsm_core::{IterationHistory, ProblemSpec};
use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    History,
    Flux,
    Summary,
}

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn optional(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

/// Cell-centred results of one run.
pub struct RunReport {
    pub history: IterationHistory,
    pub x_center: Vec<f64>,
    pub phi_ensemble: Vec<f64>,
    pub phi_material: [Vec<f64>; 2],
    pub current_ensemble: Vec<f64>,
}

impl RunReport {
    fn centers(problem: &ProblemSpec) -> Vec<f64> {
        (0..problem.n_cells()).map(|i| problem.cell_center(i)).collect()
    }

    pub fn from_multilevel(problem: &ProblemSpec, sol: &MultilevelSolution) -> Self {
        Self {
            history: sol.history.clone(),
            x_center: Self::centers(problem),
            phi_ensemble: sol.ensemble.phi.cell_averages(),
            phi_material: [sol.material_phi[0].cell_averages(), sol.material_phi[1].cell_averages()],
            current_ensemble: sol.ensemble.current.cell_averages(),
        }
    }

    pub fn from_source_iteration(problem: &ProblemSpec, sol: &SourceIterationSolution) -> Self {
        let p = problem.probabilities();
        let quad = problem.quadrature();
        let moments = [angular_moments(quad, &sol.psi.materials[0]), angular_moments(quad, &sol.psi.materials[1])];
        let current = (0..problem.n_cells())
            .map(|i| {
                (0..2)
                    .map(|l| p[l] * 0.5 * (moments[l][i][0].current() + moments[l][i][1].current()))
                    .sum()
            })
            .collect();
        Self {
            history: sol.history.clone(),
            x_center: Self::centers(problem),
            phi_ensemble: sol.ensemble_phi.cell_averages(),
            phi_material: [sol.material_phi[0].cell_averages(), sol.material_phi[1].cell_averages()],
            current_ensemble: current,
        }
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn history_csv(history: &IterationHistory) -> String {
    let mut out = String::from("s,delta_phi_inf,delta_phi_mat1_inf,delta_phi_mat2_inf,rho_s\n");
    for r in &history.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.s,
            float(r.delta_phi),
            float(r.delta_phi_material[0]),
            float(r.delta_phi_material[1]),
            optional(r.rho)
        );
    }
    out
}

pub fn write_history(path: &Path, history: &IterationHistory) -> Result<()> {
    write(path, &history_csv(history))
}

pub fn write_flux(path: &Path, report: &RunReport) -> Result<()> {
    let mut out = String::from("x_center,phi_ens,phi_mat1,phi_mat2,J_ens\n");
    for i in 0..report.x_center.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            float(report.x_center[i]),
            float(report.phi_ensemble[i]),
            float(report.phi_material[0][i]),
            float(report.phi_material[1][i]),
            float(report.current_ensemble[i])
        );
    }
    write(path, &out)
}

pub fn summary_line(test: &str, algorithm: &str, n_max: usize, history: &IterationHistory) -> String {
    format!(
        "test={test} algorithm={algorithm} n_max={n_max} iterations={} rho_estimate={} converged={}",
        history.iterations(),
        history.rho_estimate.map(|r| format!("{r:.4}")).unwrap_or_else(|| "NA".into()),
        history.converged
    )
}

pub fn write_summary(path: &Path, test: &str, algorithm: &str, n_max: usize, history: &IterationHistory) -> Result<()> {
    let text = format!(
        "test,algorithm,n_max,iterations,rho_estimate,converged\n{test},{algorithm},{n_max},{},{},{}\n",
        history.iterations(),
        optional(history.rho_estimate),
        history.converged
    );
    write(path, &text)
}
