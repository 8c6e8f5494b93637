//! Source iteration on the coupled transport equations.
//!
//! Each iteration performs `n_max` Gauss-Seidel sweeps over the materials
//! with scattering lagged from the previous iterate, then updates the
//! material scalar fluxes from the angular fluxes. It shares the transport
//! sweep and stopping rule with the multilevel driver, so both converge to
//! the same discrete solution.

use crate::driver::{IterationHistory, IterationOptions, Recorder};
use crate::error::{Error, Result};
use crate::field::LdField;
use crate::highorder::{angular_moments, gauss_seidel_highorder, scalar_flux, AngularFluxField, MaterialFlux};
use crate::problem::ProblemSpec;

#[derive(Debug, Clone)]
pub struct SourceIterationSolution {
    pub psi: AngularFluxField,
    pub material_phi: [LdField; 2],
    /// `<phi> = p_1 phi_1 + p_2 phi_2`.
    pub ensemble_phi: LdField,
    pub history: IterationHistory,
}

pub fn run_source_iteration(problem: &ProblemSpec, options: &IterationOptions) -> Result<SourceIterationSolution> {
    options.validate()?;
    let n = problem.n_cells();
    let quad = problem.quadrature();
    let p = problem.probabilities();
    let mut material_phi = [LdField::zeros(n), LdField::zeros(n)];
    let mut psi2 = MaterialFlux::zeros(n, quad.n_directions());
    let mut psi1 = psi2.clone();
    let mut ensemble_phi = LdField::zeros(n);
    let mut recorder = Recorder::new(n, *options);
    let mut converged = false;

    for s in 1..=options.max_iterations {
        let [a, b] = gauss_seidel_highorder(problem, [&material_phi[0], &material_phi[1]], &psi2, options.n_max)?;
        psi1 = a;
        psi2 = b;
        material_phi = [
            scalar_flux(&angular_moments(quad, &psi1)),
            scalar_flux(&angular_moments(quad, &psi2)),
        ];
        ensemble_phi = material_phi[0].zip_with(&material_phi[1], |x, y| p[0] * x + p[1] * y);
        if !ensemble_phi.is_finite() {
            return Err(Error::NumericalFailure(format!("non-finite scalar flux in iteration {s}")));
        }
        if recorder.record(&ensemble_phi, [&material_phi[0], &material_phi[1]]) {
            converged = true;
            break;
        }
    }
    Ok(SourceIterationSolution {
        psi: AngularFluxField { materials: [psi1, psi2] },
        material_phi,
        ensemble_phi,
        history: recorder.finish(converged),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{build_test, Inflow, MaterialSpec, TestId};
    use crate::quadrature::AngularQuadrature;

    #[test]
    fn pure_absorber_converges_in_two_iterations() {
        // No scattering in either material and n_max large enough to
        // resolve the material coupling leaves nothing to iterate on.
        let a = MaterialSpec::new(1.0, 0.0, 2.0, 1.0).unwrap();
        let b = MaterialSpec::new(3.0, 0.0, 0.5, 1.0).unwrap();
        let q = AngularQuadrature::double_gauss_legendre(2).unwrap();
        let p = ProblemSpec::new([a, b], 4.0, 20, q, Inflow::vacuum(2)).unwrap();
        let sol = run_source_iteration(&p, &IterationOptions { n_max: 200, ..Default::default() }).unwrap();
        assert!(sol.history.converged);
        assert!(sol.history.iterations() <= 3);
    }

    #[test]
    fn reports_non_convergence() {
        let p = build_test(TestId::C3, 20, 2).unwrap();
        let sol = run_source_iteration(&p, &IterationOptions { max_iterations: 3, ..Default::default() }).unwrap();
        assert!(!sol.history.converged);
        assert_eq!(sol.history.iterations(), 3);
    }
}
