//! Low-order quasidiffusion equations for the ensemble scalar flux and
//! current.
//!
//! These are the material-summed moment equations of [`crate::loym`], so the
//! transition terms cancel. Per cell the unknowns are nodal
//! `[<phi>_L, <phi>_R, <J>_L, <J>_R]`:
//!
//! ```text
//! Jbar - J+_{i-1,R} - J-_{i,L} + h/6 (2 A_L + A_R) = h/6 (2 Q_L + Q_R)
//! Kbar - K+_{i-1,R} - K-_{i,L} + h/6 (2 T_L + T_R) = 0
//! A = <<sigma_a>> <phi>,  K = <<E>> <phi>,  T = <<sigma_t>> <J> + <<eta>> <phi>
//! ```
//!
//! plus the matching right-node rows. Edge partial currents and partial
//! second moments come from the neighbouring nodes through the prolongation
//! factors: `J^± = gamma^± (<J> - Ctilde^∓ <phi>)` and
//! `K^± = <<E^±>> beta^± (<J> - Ctilde^∓ <phi>)`. On the slab faces the
//! incoming half is the inflow, which is the discrete form of
//! `<J>(0) = <<C^->> (<phi>(0) - <phi^in,+>) + <J^in,+>` and its mirror at
//! `x = X`.

use crate::blocktri::BlockTridiagonal;
use crate::closures::{EnsembleCoefficients, ProlongationFactors};
use crate::error::{Error, Result};
use crate::field::{LdField, LEFT, RIGHT};
use crate::problem::{InflowMoments, ProblemSpec};
use crate::quadrature::Half;

/// Nodal coefficients of the quasidiffusion equations.
#[derive(Debug, Clone, PartialEq)]
pub struct QdCoefficients {
    pub ensemble: Vec<[EnsembleCoefficients; 2]>,
    pub prolongation: Vec<[ProlongationFactors; 2]>,
}

impl QdCoefficients {
    pub fn n_cells(&self) -> usize {
        self.ensemble.len()
    }
}

/// Ensemble inflow through both faces.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundaryData {
    pub left: InflowMoments,
    pub right: InflowMoments,
}

impl BoundaryData {
    /// `p`-weighted inflow moments of a problem.
    pub fn from_problem(problem: &ProblemSpec) -> Self {
        let mix = |f: &dyn Fn(usize) -> InflowMoments| {
            let (a, b) = (f(0), f(1));
            let (p1, p2) = (problem.probability(0), problem.probability(1));
            InflowMoments {
                phi: p1 * a.phi + p2 * b.phi,
                current: p1 * a.current + p2 * b.current,
                second: p1 * a.second + p2 * b.second,
            }
        };
        Self {
            left: mix(&|l| problem.inflow_left(l)),
            right: mix(&|l| problem.inflow_right(l)),
        }
    }
}

/// Ensemble scalar flux and current, both nodal.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleMoments {
    pub phi: LdField,
    pub current: LdField,
}

impl EnsembleMoments {
    pub fn n_cells(&self) -> usize {
        self.phi.n_cells()
    }
}

/// Problem-independent description of one quasidiffusion solve.
#[derive(Debug, Clone)]
pub struct QdSystem<'a> {
    pub width: f64,
    pub coefficients: &'a QdCoefficients,
    /// Nodal ensemble source `<q>`.
    pub source: &'a LdField,
    pub boundary: BoundaryData,
}

/// Slab face at `x = 0` or `x = X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Face {
    Left,
    Right,
}

const PHI: [usize; 2] = [0, 1];
const CUR: [usize; 2] = [2, 3];

impl QdSystem<'_> {
    pub fn assemble(&self) -> BlockTridiagonal<4> {
        let n = self.coefficients.n_cells();
        let h = self.width;
        let coef = &self.coefficients.ensemble;
        let prol = &self.coefficients.prolongation;
        let mut sys = BlockTridiagonal::<4>::zeros(n);
        for i in 0..n {
            for node in [LEFT, RIGHT] {
                let c = &coef[i][node];
                let (m_l, m_r) = if node == LEFT { (h / 3.0, h / 6.0) } else { (h / 6.0, h / 3.0) };
                // zeroth moment: cell-average current and absorption
                sys.diag[i][0][CUR[node]] += 0.5;
                sys.diag[i][1][CUR[node]] -= 0.5;
                sys.diag[i][0][PHI[node]] += m_l * c.sigma_a;
                sys.diag[i][1][PHI[node]] += m_r * c.sigma_a;
                // first moment: cell-average Eddington flux and collision term
                sys.diag[i][2][PHI[node]] += 0.5 * c.eddington + m_l * c.eta;
                sys.diag[i][3][PHI[node]] += -0.5 * c.eddington + m_r * c.eta;
                sys.diag[i][2][CUR[node]] += m_l * c.sigma_t;
                sys.diag[i][3][CUR[node]] += m_r * c.sigma_t;
            }
            // Edge half-range terms. `coeffs(node, half, moment)` gives the
            // (phi, J) coefficients of J^± (moment 0) or K^± (moment 1).
            let coeffs = |cell: usize, node: usize, half: Half, moment: usize| {
                let f = &prol[cell][node];
                if moment == 0 {
                    f.partial_current_coeffs(half)
                } else {
                    let (a, b) = f.partial_phi_coeffs(half);
                    (f.e(half) * a, f.e(half) * b)
                }
            };
            for moment in 0..2 {
                let (row_l, row_r) = (2 * moment, 2 * moment + 1);
                let inflow = |b: &InflowMoments| if moment == 0 { b.current } else { b.second };
                // left row: - X+_{i-1,R} - X-_{i,L}
                if i > 0 {
                    let (a, b) = coeffs(i - 1, RIGHT, Half::Positive, moment);
                    sys.lower[i][row_l][PHI[RIGHT]] -= a;
                    sys.lower[i][row_l][CUR[RIGHT]] -= b;
                } else {
                    sys.rhs[i][row_l] += inflow(&self.boundary.left);
                }
                let (a, b) = coeffs(i, LEFT, Half::Negative, moment);
                sys.diag[i][row_l][PHI[LEFT]] -= a;
                sys.diag[i][row_l][CUR[LEFT]] -= b;
                // right row: + X+_{i,R} + X-_{i+1,L}
                let (a, b) = coeffs(i, RIGHT, Half::Positive, moment);
                sys.diag[i][row_r][PHI[RIGHT]] += a;
                sys.diag[i][row_r][CUR[RIGHT]] += b;
                if i + 1 < n {
                    let (a, b) = coeffs(i + 1, LEFT, Half::Negative, moment);
                    sys.upper[i][row_r][PHI[LEFT]] += a;
                    sys.upper[i][row_r][CUR[LEFT]] += b;
                } else {
                    sys.rhs[i][row_r] -= inflow(&self.boundary.right);
                }
            }
            let [ql, qr] = self.source[i];
            sys.rhs[i][0] += h * (2.0 * ql + qr) / 6.0;
            sys.rhs[i][1] += h * (ql + 2.0 * qr) / 6.0;
        }
        sys
    }

    pub fn solve(&self) -> Result<EnsembleMoments> {
        if self.source.n_cells() != self.coefficients.n_cells()
            || self.coefficients.prolongation.len() != self.coefficients.n_cells()
        {
            return Err(Error::invalid("quasidiffusion coefficients and source disagree on the mesh"));
        }
        let x = self.assemble().solve("LOQD")?;
        Ok(EnsembleMoments {
            phi: LdField::from_nodes(x.iter().map(|v| [v[0], v[1]]).collect()),
            current: LdField::from_nodes(x.iter().map(|v| [v[2], v[3]]).collect()),
        })
    }

    pub fn residual(&self, m: &EnsembleMoments) -> f64 {
        let x: Vec<[f64; 4]> = (0..m.n_cells())
            .map(|i| [m.phi[i][0], m.phi[i][1], m.current[i][0], m.current[i][1]])
            .collect();
        self.assemble().residual(&x)
    }

    /// Net currents through the `n + 1` edges.
    pub fn edge_currents(&self, m: &EnsembleMoments) -> Vec<f64> {
        let n = m.n_cells();
        let prol = &self.coefficients.prolongation;
        let part = |cell: usize, node: usize, half: Half| {
            prol[cell][node].partial_current(half, m.phi[cell][node], m.current[cell][node])
        };
        (0..=n)
            .map(|e| {
                let from_left = if e == 0 { self.boundary.left.current } else { part(e - 1, RIGHT, Half::Positive) };
                let from_right = if e == n { self.boundary.right.current } else { part(e, LEFT, Half::Negative) };
                from_left + from_right
            })
            .collect()
    }

    /// Scalar flux on a slab face: inflow half plus the outgoing half.
    pub fn face_flux(&self, m: &EnsembleMoments, face: Face) -> f64 {
        let n = m.n_cells();
        let prol = &self.coefficients.prolongation;
        match face {
            Face::Left => self.boundary.left.phi + prol[0][LEFT].partial_phi(Half::Negative, m.phi[0][LEFT], m.current[0][LEFT]),
            Face::Right => {
                self.boundary.right.phi + prol[n - 1][RIGHT].partial_phi(Half::Positive, m.phi[n - 1][RIGHT], m.current[n - 1][RIGHT])
            }
        }
    }
}

/// Solves the quasidiffusion equations on the problem mesh.
pub fn solve_loqd(problem: &ProblemSpec, coefficients: &QdCoefficients) -> Result<EnsembleMoments> {
    if coefficients.n_cells() != problem.n_cells() {
        return Err(Error::invalid(format!(
            "coefficients cover {} cells, mesh has {}",
            coefficients.n_cells(),
            problem.n_cells()
        )));
    }
    let source = LdField::constant(problem.n_cells(), problem.ensemble_source());
    QdSystem {
        width: problem.cell_width(),
        coefficients,
        source: &source,
        boundary: BoundaryData::from_problem(problem),
    }
    .solve()
}
