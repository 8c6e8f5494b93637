//! Fixtures for the solver benchmarks.
//!
//! A [`Fixture`] holds a catalog problem together with a partially relaxed
//! state, so that each kernel can be timed on realistic, nonzero inputs
//! without paying for the setup inside the measured loop.

use bsm_core::baseline::run_source_iteration;
use bsm_core::closures::{material_factors, MaterialFactors};
use bsm_core::driver::qd_coefficients;
use bsm_core::highorder::{angular_moments, AngularFluxField};
use bsm_core::loqd::QdCoefficients;
use bsm_core::loym::PartialFluxField;
use bsm_core::problem::build_test;
use bsm_core::{IterationOptions, LdField, ProblemSpec, Result, TestId};

/// Source iterations used to warm up the fixture state.
const WARMUP_ITERATIONS: usize = 10;

pub struct Fixture {
    pub problem: ProblemSpec,
    pub psi: AngularFluxField,
    pub material_phi: [LdField; 2],
    pub factors: [MaterialFactors; 2],
    pub partial: [PartialFluxField; 2],
    pub qd: QdCoefficients,
}

impl Fixture {
    pub fn new(id: TestId, n_cells: usize, n_per_half: usize) -> Result<Self> {
        let problem = build_test(id, n_cells, n_per_half)?;
        let options = IterationOptions { max_iterations: WARMUP_ITERATIONS, ..IterationOptions::default() };
        let warm = run_source_iteration(&problem, &options)?;
        let quad = problem.quadrature();
        let factors = warm.psi.materials.each_ref().map(|psi| material_factors(quad, psi));
        let partial = warm.psi.materials.each_ref().map(|psi| PartialFluxField::from_moments(&angular_moments(quad, psi)));
        let qd = qd_coefficients(&problem, [&factors[0], &factors[1]], &partial);
        Ok(Self { problem, psi: warm.psi, material_phi: warm.material_phi, factors, partial, qd })
    }

    pub fn factor_refs(&self) -> [&MaterialFactors; 2] {
        [&self.factors[0], &self.factors[1]]
    }
}
