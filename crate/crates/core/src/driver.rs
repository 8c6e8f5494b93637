//! Multilevel V-cycle iteration.
//!
//! One outer iteration `s`:
//!
//! 1. `n_max` Gauss-Seidel transport sweeps over the materials, scattering
//!    from the prolonged material scalar fluxes.
//! 2. Material factors and half-range moments of the swept fluxes.
//! 3. One Gauss-Seidel pass over the coupled Yvon-Mertens equations.
//! 4. Ensemble coefficients, then the quasidiffusion solve for `<phi>`, `<J>`.
//! 5. Ensemble partial moments by prolongation, then the decoupled
//!    Yvon-Mertens solve for each material.
//! 6. Prolongation back to material scalar fluxes and a half-range rescale
//!    of the angular fluxes.
//!
//! Iteration stops once `||<phi>^(s) - <phi>^(s-1)||_inf <= eps ||<phi>^(s)||_inf`
//! on cell averages.

use crate::closures::{
    ensemble_coefficients, factors_from_moments, prolongation_factors, MaterialFactors, NodeState,
    ProlongationFactors,
};
use crate::error::{Error, Result};
use crate::field::{max_abs, max_abs_diff, LdField, LEFT, RIGHT};
use crate::highorder::{angular_moments, gauss_seidel_highorder, AngularFluxField, MaterialFlux, MomentField};
use crate::loqd::{solve_loqd, EnsembleMoments, QdCoefficients};
use crate::loym::{loym_gs_pass, modified_loym_solve, EnsemblePartials, PartialFluxField};
use crate::problem::ProblemSpec;
use crate::quadrature::{AngularQuadrature, Half};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationOptions {
    /// Relative stopping tolerance on `<phi>`.
    pub epsilon: f64,
    pub max_iterations: usize,
    /// Gauss-Seidel transport cycles per outer iteration.
    pub n_max: usize,
    /// Number of trailing convergence ratios averaged into the estimate.
    pub rho_window: usize,
    /// Rescale the angular fluxes by the prolonged partial fluxes. When
    /// disabled the next transport sweep starts from the unscaled flux;
    /// the fixed point is the same but the convergence rate is not.
    pub angular_rescale: bool,
}

impl Default for IterationOptions {
    fn default() -> Self {
        Self { epsilon: 1e-10, max_iterations: 200, n_max: 1, rho_window: 5, angular_rescale: true }
    }
}

impl IterationOptions {
    pub fn with_n_max(n_max: usize) -> Self {
        Self { n_max, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::invalid(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.n_max == 0 {
            return Err(Error::invalid("n_max must be at least 1"));
        }
        if self.rho_window == 0 {
            return Err(Error::invalid("rho_window must be at least 1"));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub s: usize,
    /// `||Delta <phi>^(s)||_inf` over cell averages.
    pub delta_phi: f64,
    /// `||Delta phi_l^(s)||_inf` per material.
    pub delta_phi_material: [f64; 2],
    /// Ratio of successive `delta_phi`; undefined for the first iteration.
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IterationHistory {
    pub records: Vec<IterationRecord>,
    pub converged: bool,
    pub rho_estimate: Option<f64>,
}

impl IterationHistory {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }
}

/// Tracks successive iterates and decides convergence.
pub(crate) struct Recorder {
    options: IterationOptions,
    prev_ensemble: Vec<f64>,
    prev_material: [Vec<f64>; 2],
    history: IterationHistory,
}

impl Recorder {
    pub(crate) fn new(n_cells: usize, options: IterationOptions) -> Self {
        Self {
            options,
            prev_ensemble: vec![0.0; n_cells],
            prev_material: [vec![0.0; n_cells], vec![0.0; n_cells]],
            history: IterationHistory::default(),
        }
    }

    /// Records iteration `s`; returns `true` once converged.
    pub(crate) fn record(&mut self, ensemble: &LdField, material: [&LdField; 2]) -> bool {
        let ens = ensemble.cell_averages();
        let mat = [material[0].cell_averages(), material[1].cell_averages()];
        let delta = max_abs_diff(&ens, &self.prev_ensemble);
        let rho = self
            .history
            .records
            .last()
            .and_then(|r| (r.delta_phi > 0.0).then(|| delta / r.delta_phi));
        self.history.records.push(IterationRecord {
            s: self.history.records.len() + 1,
            delta_phi: delta,
            delta_phi_material: [
                max_abs_diff(&mat[0], &self.prev_material[0]),
                max_abs_diff(&mat[1], &self.prev_material[1]),
            ],
            rho,
        });
        let converged = delta <= self.options.epsilon * max_abs(&ens);
        self.prev_ensemble = ens;
        self.prev_material = mat;
        converged
    }

    pub(crate) fn finish(mut self, converged: bool) -> IterationHistory {
        self.history.converged = converged;
        self.history.rho_estimate = estimate_spectral_radius(&self.history, self.options.rho_window).ok();
        self.history
    }
}

/// Geometric mean of the last `rho_window` convergence ratios.
pub fn estimate_spectral_radius(history: &IterationHistory, rho_window: usize) -> Result<f64> {
    if rho_window == 0 {
        return Err(Error::invalid("rho_window must be at least 1"));
    }
    let ratios: Vec<f64> = history.records.iter().filter_map(|r| r.rho).collect();
    if history.records.len() < rho_window + 1 || ratios.len() < rho_window {
        return Err(Error::InsufficientHistory { needed: rho_window + 1, have: history.records.len() });
    }
    let tail = &ratios[ratios.len() - rho_window..];
    if tail.iter().any(|&r| r <= 0.0) {
        return Ok(0.0);
    }
    let log_mean = tail.iter().map(|r| r.ln()).sum::<f64>() / rho_window as f64;
    Ok(log_mean.exp())
}

/// Result of a multilevel run.
#[derive(Debug, Clone)]
pub struct MultilevelSolution {
    /// Angular fluxes after the last prolongation.
    pub psi: AngularFluxField,
    /// Low-order material partial fluxes of the last iteration.
    pub partial: [PartialFluxField; 2],
    /// Last quasidiffusion solution.
    pub ensemble: EnsembleMoments,
    /// Prolonged material scalar fluxes.
    pub material_phi: [LdField; 2],
    pub history: IterationHistory,
    /// Half-range rescales skipped because the old partial flux vanished.
    pub skipped_rescales: usize,
}

fn node_state(problem: &ProblemSpec, factors: [&MaterialFactors; 2], fields: &[PartialFluxField; 2], i: usize, node: usize) -> NodeState {
    NodeState {
        p: problem.probabilities(),
        phi_plus: [fields[0].phi_plus[i][node], fields[1].phi_plus[i][node]],
        phi_minus: [fields[0].phi_minus[i][node], fields[1].phi_minus[i][node]],
        factors: [factors[0][i][node], factors[1][i][node]],
    }
}

/// Nodal quasidiffusion coefficients from material partial fluxes.
pub fn qd_coefficients(problem: &ProblemSpec, factors: [&MaterialFactors; 2], fields: &[PartialFluxField; 2]) -> QdCoefficients {
    let n = problem.n_cells();
    let mut ensemble = Vec::with_capacity(n);
    let mut prolongation = Vec::with_capacity(n);
    for i in 0..n {
        let states = [LEFT, RIGHT].map(|node| node_state(problem, factors, fields, i, node));
        ensemble.push(states.map(|s| ensemble_coefficients(&s, problem.materials())));
        prolongation.push(states.map(|s| prolongation_factors(&s)));
    }
    QdCoefficients { ensemble, prolongation }
}

/// Nodal prolongation factors from material partial fluxes.
pub fn prolongation_field(problem: &ProblemSpec, factors: [&MaterialFactors; 2], fields: &[PartialFluxField; 2]) -> Vec<[ProlongationFactors; 2]> {
    (0..problem.n_cells())
        .map(|i| [LEFT, RIGHT].map(|node| prolongation_factors(&node_state(problem, factors, fields, i, node))))
        .collect()
}

/// Maps `<phi>`, `<J>` to ensemble partial fluxes and currents with
/// `<phi^±> = beta^± (<J> - Ctilde^∓ <phi>)`, `<J^±> = gamma^± (...)`.
pub fn map_ensemble_to_partial(moments: &EnsembleMoments, factors: &[[ProlongationFactors; 2]]) -> EnsemblePartials {
    let n = moments.n_cells();
    let mut out = EnsemblePartials {
        j_plus: LdField::zeros(n),
        j_minus: LdField::zeros(n),
        phi_plus: LdField::zeros(n),
        phi_minus: LdField::zeros(n),
        e_plus: LdField::zeros(n),
        e_minus: LdField::zeros(n),
    };
    for i in 0..n {
        for node in [LEFT, RIGHT] {
            let f = &factors[i][node];
            let (phi, cur) = (moments.phi[i][node], moments.current[i][node]);
            out.phi_plus[i][node] = f.partial_phi(Half::Positive, phi, cur);
            out.phi_minus[i][node] = f.partial_phi(Half::Negative, phi, cur);
            out.j_plus[i][node] = f.partial_current(Half::Positive, phi, cur);
            out.j_minus[i][node] = f.partial_current(Half::Negative, phi, cur);
            out.e_plus[i][node] = f.e_plus;
            out.e_minus[i][node] = f.e_minus;
        }
    }
    out
}

/// Output of [`prolong_fluxes`].
#[derive(Debug, Clone)]
pub struct Prolonged {
    pub material_phi: [LdField; 2],
    pub psi: [MaterialFlux; 2],
    pub skipped_rescales: usize,
}

fn scaled(value: f64, target: f64, reference: f64) -> (f64, bool) {
    if reference.abs() < f64::MIN_POSITIVE || !reference.is_finite() {
        (value, false)
    } else {
        (value * target / reference, true)
    }
}

/// Prolongs the low-order solution to material scalar fluxes and angular
/// fluxes.
///
/// * `phi_l <- (phi+_l + phi-_l) <phi> / sum p (phi+ + phi-)`
/// * `phĩ^±_l <- phi^±_l <phi^±> / sum p phi^±`
/// * `psi_l <- psi_l phĩ^±_l / (old partial flux of psi_l)` on each half.
pub fn prolong_fluxes(
    problem: &ProblemSpec,
    partial: &[PartialFluxField; 2],
    ensemble_phi: &LdField,
    ensemble_partial: &EnsemblePartials,
    psi_old: [&MaterialFlux; 2],
    moments_old: [&MomentField; 2],
) -> Prolonged {
    let n = problem.n_cells();
    let quad: &AngularQuadrature = problem.quadrature();
    let p = problem.probabilities();
    let mut phi_out = [LdField::zeros(n), LdField::zeros(n)];
    let mut psi_out = [psi_old[0].clone(), psi_old[1].clone()];
    let mut skipped = 0;
    for i in 0..n {
        for node in [LEFT, RIGHT] {
            let tot = |l: usize| partial[l].phi_plus[i][node] + partial[l].phi_minus[i][node];
            let sum_tot = p[0] * tot(0) + p[1] * tot(1);
            let sum_half = |half: Half| p[0] * partial[0].get(half)[i][node] + p[1] * partial[1].get(half)[i][node];
            for l in 0..2 {
                phi_out[l][i][node] = scaled(tot(l), ensemble_phi[i][node], sum_tot).0;
                for half in [Half::Positive, Half::Negative] {
                    let target_ens = match half {
                        Half::Positive => ensemble_partial.phi_plus[i][node],
                        Half::Negative => ensemble_partial.phi_minus[i][node],
                    };
                    let tilde = scaled(partial[l].get(half)[i][node], target_ens, sum_half(half)).0;
                    let (old, _, _) = moments_old[l][i][node].partial(half);
                    if old.abs() < f64::MIN_POSITIVE {
                        skipped += 1;
                        continue;
                    }
                    let factor = tilde / old;
                    for dir in quad.directions(half) {
                        psi_out[l].get_mut(dir, i)[node] *= factor;
                    }
                }
            }
        }
    }
    Prolonged { material_phi: phi_out, psi: psi_out, skipped_rescales: skipped }
}

fn ensure_finite(ok: bool, what: &str, s: usize) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::NumericalFailure(format!("non-finite {what} in iteration {s}")))
    }
}

/// Runs the multilevel iteration from a zero initial guess.
pub fn run_multilevel(problem: &ProblemSpec, options: &IterationOptions) -> Result<MultilevelSolution> {
    options.validate()?;
    let n = problem.n_cells();
    let quad = problem.quadrature();
    let mut material_phi = [LdField::zeros(n), LdField::zeros(n)];
    let zero_flux = MaterialFlux::zeros(n, quad.n_directions());
    let mut psi = [zero_flux.clone(), zero_flux];
    let mut recorder = Recorder::new(n, *options);
    let mut converged = false;
    let mut skipped_rescales = 0;
    let mut last = None;

    for s in 1..=options.max_iterations {
        // Level 1
        let [psi1, psi2] = gauss_seidel_highorder(problem, [&material_phi[0], &material_phi[1]], &psi[1], options.n_max)?;
        let moments = [angular_moments(quad, &psi1), angular_moments(quad, &psi2)];
        let factors = [factors_from_moments(&moments[0]), factors_from_moments(&moments[1])];
        let fr = [&factors[0], &factors[1]];
        let from_transport = [PartialFluxField::from_moments(&moments[0]), PartialFluxField::from_moments(&moments[1])];

        // Level 2, coupled
        let loym = loym_gs_pass(problem, fr, &from_transport)?;
        ensure_finite(loym.iter().all(|f| f.is_finite()), "partial fluxes", s)?;
        let coeffs = qd_coefficients(problem, fr, &loym);

        // Level 3
        let ensemble = solve_loqd(problem, &coeffs)?;
        ensure_finite(ensemble.phi.is_finite() && ensemble.current.is_finite(), "ensemble moments", s)?;

        // Level 2, decoupled
        let down = map_ensemble_to_partial(&ensemble, &coeffs.prolongation);
        let partial = modified_loym_solve(problem, fr, &down)?;
        ensure_finite(partial.iter().all(|f| f.is_finite()), "partial fluxes", s)?;
        let up = map_ensemble_to_partial(&ensemble, &prolongation_field(problem, fr, &partial));

        let prolonged = prolong_fluxes(problem, &partial, &ensemble.phi, &up, [&psi1, &psi2], [&moments[0], &moments[1]]);
        ensure_finite(prolonged.psi.iter().all(|p| p.is_finite()), "angular flux", s)?;
        material_phi = prolonged.material_phi;
        if options.angular_rescale {
            skipped_rescales += prolonged.skipped_rescales;
            psi = prolonged.psi;
        } else {
            psi = [psi1, psi2];
        }

        let done = recorder.record(&ensemble.phi, [&material_phi[0], &material_phi[1]]);
        last = Some((partial, ensemble));
        if done {
            converged = true;
            break;
        }
    }
    let (partial, ensemble) = last.expect("at least one iteration runs");
    let [psi1, psi2] = psi;
    Ok(MultilevelSolution {
        psi: AngularFluxField { materials: [psi1, psi2] },
        partial,
        ensemble,
        material_phi,
        history: recorder.finish(converged),
        skipped_rescales,
    })
}
