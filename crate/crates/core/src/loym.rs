//! Low-order Yvon-Mertens equations for the material partial scalar fluxes.
//!
//! The discrete equations are the weight-1 and weight-`mu` angular moments of
//! the nodal LD transport equations, multiplied by `p_l`. Per cell the
//! unknowns are `[phi+_L, phi+_R, phi-_L, phi-_R]`; the four rows are the
//! left/right basis-function equations of each moment. For the left row of
//! the zeroth moment,
//!
//! ```text
//! p (Jbar - J+_{i-1,R} - J-_{i,L}) + h/6 (2 M_L + M_R) = h/6 (2 S_L + S_R)
//! M = p (sigma_a phi + r (C+ phi+ - C- phi-)),   J^± = C^± phi^±
//! ```
//!
//! with the upwind edge currents taken from the neighbouring cell (or the
//! inflow) and `r` the transition rate. The first moment replaces `C` by `E`
//! in the streaming term and uses `sigma_t J + r (E+ phi+ - E- phi-)` as the
//! collision term.

use crate::blocktri::BlockTridiagonal;
use crate::closures::{MaterialFactors, NodeFactors};
use crate::error::{Error, Result};
use crate::field::{LdField, LEFT, RIGHT};
use crate::highorder::MomentField;
use crate::problem::{InflowMoments, ProblemSpec};
use crate::quadrature::Half;

/// Partial scalar fluxes of one material.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialFluxField {
    pub phi_plus: LdField,
    pub phi_minus: LdField,
}

impl PartialFluxField {
    pub fn zeros(n_cells: usize) -> Self {
        Self { phi_plus: LdField::zeros(n_cells), phi_minus: LdField::zeros(n_cells) }
    }

    pub fn from_moments(moments: &MomentField) -> Self {
        Self {
            phi_plus: LdField::from_nodes(moments.iter().map(|m| [m[0].phi_plus, m[1].phi_plus]).collect()),
            phi_minus: LdField::from_nodes(moments.iter().map(|m| [m[0].phi_minus, m[1].phi_minus]).collect()),
        }
    }

    pub fn n_cells(&self) -> usize {
        self.phi_plus.n_cells()
    }

    pub fn scalar_flux(&self) -> LdField {
        self.phi_plus.zip_with(&self.phi_minus, |a, b| a + b)
    }

    pub fn get(&self, half: Half) -> &LdField {
        match half {
            Half::Positive => &self.phi_plus,
            Half::Negative => &self.phi_minus,
        }
    }

    /// Partial currents `C^± phi^±` for the given factors.
    pub fn currents(&self, factors: &MaterialFactors, half: Half) -> LdField {
        let phi = self.get(half);
        LdField::from_nodes(
            (0..self.n_cells())
                .map(|i| [factors[i][LEFT].c(half) * phi[i][LEFT], factors[i][RIGHT].c(half) * phi[i][RIGHT]])
                .collect(),
        )
    }

    fn from_solution(x: &[[f64; 4]]) -> Self {
        Self {
            phi_plus: LdField::from_nodes(x.iter().map(|v| [v[0], v[1]]).collect()),
            phi_minus: LdField::from_nodes(x.iter().map(|v| [v[2], v[3]]).collect()),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.phi_plus.is_finite() && self.phi_minus.is_finite()
    }
}

/// Ensemble data driving the decoupled (modified) equations, per node.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsemblePartials {
    pub j_plus: LdField,
    pub j_minus: LdField,
    pub phi_plus: LdField,
    pub phi_minus: LdField,
    /// `<<E^+>>`, `<<E^->>`.
    pub e_plus: LdField,
    pub e_minus: LdField,
}

fn unknown(half: Half, node: usize) -> usize {
    match half {
        Half::Positive => node,
        Half::Negative => 2 + node,
    }
}

const HALVES: [Half; 2] = [Half::Positive, Half::Negative];

/// Everything needed to assemble the system of one material.
#[derive(Debug, Clone)]
pub struct MaterialSystem<'a> {
    pub probability: f64,
    pub sigma_t: f64,
    pub sigma_a: f64,
    /// Transition rate multiplying `int |mu| psi` terms.
    pub transition_rate: f64,
    pub width: f64,
    pub factors: &'a MaterialFactors,
    pub inflow_left: InflowMoments,
    pub inflow_right: InflowMoments,
    /// Nodal right-hand sides of the zeroth and first moment equations.
    pub source_zeroth: LdField,
    pub source_first: LdField,
}

impl MaterialSystem<'_> {
    pub fn assemble(&self) -> BlockTridiagonal<4> {
        let n = self.factors.len();
        let p = self.probability;
        let h = self.width;
        let r = self.transition_rate;
        let mut sys = BlockTridiagonal::<4>::zeros(n);
        for i in 0..n {
            let f = &self.factors[i];
            for moment in 0..2 {
                let (row_l, row_r) = (2 * moment, 2 * moment + 1);
                let stream = |nf: &NodeFactors, half: Half| p * if moment == 0 { nf.c(half) } else { nf.e(half) };
                let collide = |nf: &NodeFactors, half: Half| {
                    let s = half.sign();
                    p * if moment == 0 {
                        self.sigma_a + s * r * nf.c(half)
                    } else {
                        self.sigma_t * nf.c(half) + s * r * nf.e(half)
                    }
                };
                for node in [LEFT, RIGHT] {
                    let (m_l, m_r) = if node == LEFT { (h / 3.0, h / 6.0) } else { (h / 6.0, h / 3.0) };
                    for half in HALVES {
                        let u = unknown(half, node);
                        let s = 0.5 * stream(&f[node], half);
                        sys.diag[i][row_l][u] += s + m_l * collide(&f[node], half);
                        sys.diag[i][row_r][u] += -s + m_r * collide(&f[node], half);
                    }
                }
                // upwind edge terms
                let inflow = |b: &InflowMoments| p * if moment == 0 { b.current } else { b.second };
                if i > 0 {
                    sys.lower[i][row_l][unknown(Half::Positive, RIGHT)] -= stream(&self.factors[i - 1][RIGHT], Half::Positive);
                } else {
                    sys.rhs[i][row_l] += inflow(&self.inflow_left);
                }
                sys.diag[i][row_l][unknown(Half::Negative, LEFT)] -= stream(&f[LEFT], Half::Negative);
                sys.diag[i][row_r][unknown(Half::Positive, RIGHT)] += stream(&f[RIGHT], Half::Positive);
                if i + 1 < n {
                    sys.upper[i][row_r][unknown(Half::Negative, LEFT)] += stream(&self.factors[i + 1][LEFT], Half::Negative);
                } else {
                    sys.rhs[i][row_r] -= inflow(&self.inflow_right);
                }
                let src = if moment == 0 { &self.source_zeroth } else { &self.source_first };
                let [sl, sr] = src[i];
                sys.rhs[i][row_l] += h * (2.0 * sl + sr) / 6.0;
                sys.rhs[i][row_r] += h * (sl + 2.0 * sr) / 6.0;
            }
        }
        sys
    }

    pub fn solve(&self) -> Result<PartialFluxField> {
        let x = self.assemble().solve("LOYM")?;
        Ok(PartialFluxField::from_solution(&x))
    }

    /// Max-norm residual of the assembled equations at `field`.
    pub fn residual(&self, field: &PartialFluxField) -> f64 {
        let x: Vec<[f64; 4]> = (0..field.n_cells())
            .map(|i| {
                let (pp, pm) = (field.phi_plus[i], field.phi_minus[i]);
                [pp[0], pp[1], pm[0], pm[1]]
            })
            .collect();
        self.assemble().residual(&x)
    }
}

fn check_shapes(problem: &ProblemSpec, factors: &[&MaterialFactors; 2]) -> Result<()> {
    for f in factors {
        if f.len() != problem.n_cells() {
            return Err(Error::invalid(format!(
                "factors cover {} cells, mesh has {}",
                f.len(),
                problem.n_cells()
            )));
        }
    }
    Ok(())
}

/// Zeroth and first moment coupling sources `(p_l'/lambda_l') (J'+ - J'-)`
/// and `(p_l'/lambda_l') (K'+ - K'-)` from the other material's partial
/// fluxes.
fn coupling_sources(
    problem: &ProblemSpec,
    l: usize,
    other_factors: &MaterialFactors,
    other: &PartialFluxField,
) -> (LdField, LdField) {
    let lo = 1 - l;
    let rate = problem.probability(lo) / problem.material(lo).lambda;
    let q = problem.probability(l) * problem.material(l).q;
    let n = problem.n_cells();
    let mut s0 = LdField::zeros(n);
    let mut s1 = LdField::zeros(n);
    for i in 0..n {
        for node in [LEFT, RIGHT] {
            let f = &other_factors[i][node];
            let pp = other.phi_plus[i][node];
            let pm = other.phi_minus[i][node];
            s0[i][node] = q + rate * (f.c_plus * pp - f.c_minus * pm);
            s1[i][node] = rate * (f.e_plus * pp - f.e_minus * pm);
        }
    }
    (s0, s1)
}

fn material_system<'a>(
    problem: &ProblemSpec,
    l: usize,
    factors: &'a MaterialFactors,
    transition_rate: f64,
    source_zeroth: LdField,
    source_first: LdField,
) -> MaterialSystem<'a> {
    let m = problem.material(l);
    MaterialSystem {
        probability: problem.probability(l),
        sigma_t: m.sigma_t,
        sigma_a: m.sigma_a(),
        transition_rate,
        width: problem.cell_width(),
        factors,
        inflow_left: problem.inflow_left(l),
        inflow_right: problem.inflow_right(l),
        source_zeroth,
        source_first,
    }
}

/// System of material `l` in the coupled equations, with the other
/// material's partial fluxes held fixed.
pub fn coupled_system<'a>(
    problem: &ProblemSpec,
    l: usize,
    factors: [&'a MaterialFactors; 2],
    other: &PartialFluxField,
) -> MaterialSystem<'a> {
    let (s0, s1) = coupling_sources(problem, l, factors[1 - l], other);
    let rate = 1.0 / problem.material(l).lambda;
    material_system(problem, l, factors[l], rate, s0, s1)
}

/// One Gauss-Seidel pass over the coupled material equations: material 1
/// against `initial[1]`, then material 2 against the fresh material-1
/// solution.
pub fn loym_gs_pass(
    problem: &ProblemSpec,
    factors: [&MaterialFactors; 2],
    initial: &[PartialFluxField; 2],
) -> Result<[PartialFluxField; 2]> {
    check_shapes(problem, &factors)?;
    let first = coupled_system(problem, 0, factors, &initial[1]).solve()?;
    let second = coupled_system(problem, 1, factors, &first).solve()?;
    Ok([first, second])
}

/// System of material `l` in the decoupled equations driven by ensemble
/// partial currents and Eddington fluxes.
pub fn modified_system<'a>(
    problem: &ProblemSpec,
    l: usize,
    factors: &'a MaterialFactors,
    ensemble: &EnsemblePartials,
) -> MaterialSystem<'a> {
    let lo = 1 - l;
    let inv_other = 1.0 / problem.material(lo).lambda;
    let q = problem.probability(l) * problem.material(l).q;
    let n = problem.n_cells();
    let mut s0 = LdField::zeros(n);
    let mut s1 = LdField::zeros(n);
    for i in 0..n {
        for node in [LEFT, RIGHT] {
            s0[i][node] = q + inv_other * (ensemble.j_plus[i][node] - ensemble.j_minus[i][node]);
            s1[i][node] = inv_other
                * (ensemble.e_plus[i][node] * ensemble.phi_plus[i][node]
                    - ensemble.e_minus[i][node] * ensemble.phi_minus[i][node]);
        }
    }
    let rate = 1.0 / problem.material(l).lambda + inv_other;
    material_system(problem, l, factors, rate, s0, s1)
}

/// Solves both decoupled material equations.
pub fn modified_loym_solve(
    problem: &ProblemSpec,
    factors: [&MaterialFactors; 2],
    ensemble: &EnsemblePartials,
) -> Result<[PartialFluxField; 2]> {
    check_shapes(problem, &factors)?;
    let a = modified_system(problem, 0, factors[0], ensemble).solve()?;
    let b = modified_system(problem, 1, factors[1], ensemble).solve()?;
    Ok([a, b])
}

/// Ensemble data built from material partial fluxes, as the quasidiffusion
/// level would hand it down if it reproduced them exactly.
pub fn ensemble_partials_from(
    problem: &ProblemSpec,
    factors: [&MaterialFactors; 2],
    fields: &[PartialFluxField; 2],
) -> EnsemblePartials {
    use crate::closures::{ensemble_half_eddington, NodeState};
    let n = problem.n_cells();
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
            let st = NodeState {
                p: problem.probabilities(),
                phi_plus: [fields[0].phi_plus[i][node], fields[1].phi_plus[i][node]],
                phi_minus: [fields[0].phi_minus[i][node], fields[1].phi_minus[i][node]],
                factors: [factors[0][i][node], factors[1][i][node]],
            };
            out.phi_plus[i][node] = st.ensemble_partial_phi(Half::Positive);
            out.phi_minus[i][node] = st.ensemble_partial_phi(Half::Negative);
            out.j_plus[i][node] = st.ensemble_partial_current(Half::Positive);
            out.j_minus[i][node] = st.ensemble_partial_current(Half::Negative);
            let (ep, em) = ensemble_half_eddington(&st);
            out.e_plus[i][node] = ep;
            out.e_minus[i][node] = em;
        }
    }
    out
}
