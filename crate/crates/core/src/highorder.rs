//! Linear discontinuous discrete-ordinates sweeps for the material transport
//! equations.
//!
//! For material `l` and direction `mu`, the swept equation is
//!
//! ```text
//! mu dpsi_l/dx + (sigma_t,l + |mu|/lambda_l) psi_l
//!     = sigma_s,l phi_l / 2 + |mu| p_l' / (p_l lambda_l') psi_l' + q_l / 2
//! ```
//!
//! which is the mixture equation divided by `p_l`, with the material
//! transition loss folded into the removal cross section.
//!
//! Each cell carries left/right nodal values. The Galerkin equations are
//! tested against the two linear basis functions with consistent mass
//! matrices and upwind edge values, so the outflow edge value of a cell is its
//! outflow-side nodal value.

use crate::error::{Error, Result};
use crate::field::{LdField, LEFT, RIGHT};
use crate::problem::ProblemSpec;
use crate::quadrature::{AngularQuadrature, Half};

/// Nodal angular flux of one material: `[left, right]` for every
/// `(direction, cell)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialFlux {
    n_cells: usize,
    n_dirs: usize,
    values: Vec<[f64; 2]>,
}

impl MaterialFlux {
    pub fn zeros(n_cells: usize, n_dirs: usize) -> Self {
        Self { n_cells, n_dirs, values: vec![[0.0; 2]; n_cells * n_dirs] }
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_directions(&self) -> usize {
        self.n_dirs
    }

    pub fn get(&self, dir: usize, cell: usize) -> [f64; 2] {
        self.values[dir * self.n_cells + cell]
    }

    pub fn set(&mut self, dir: usize, cell: usize, v: [f64; 2]) {
        self.values[dir * self.n_cells + cell] = v;
    }

    pub fn get_mut(&mut self, dir: usize, cell: usize) -> &mut [f64; 2] {
        &mut self.values[dir * self.n_cells + cell]
    }

    /// Value on the upwind side of edge `edge` (`0..=n_cells`) for `dir`.
    /// Returns `None` on the inflow faces.
    pub fn edge_value(&self, quad: &AngularQuadrature, dir: usize, edge: usize) -> Option<f64> {
        match quad.half_of(dir) {
            Half::Positive => (edge > 0).then(|| self.get(dir, edge - 1)[RIGHT]),
            Half::Negative => (edge < self.n_cells).then(|| self.get(dir, edge)[LEFT]),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().flatten().all(|v| v.is_finite())
    }

    fn check_shape(&self, n_cells: usize, n_dirs: usize, what: &str) -> Result<()> {
        if self.n_cells != n_cells || self.n_dirs != n_dirs {
            return Err(Error::invalid(format!(
                "{what}: flux is {}x{} (cells x directions), expected {n_cells}x{n_dirs}",
                self.n_cells, self.n_dirs
            )));
        }
        Ok(())
    }
}

/// Angular fluxes of both materials.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularFluxField {
    pub materials: [MaterialFlux; 2],
}

impl AngularFluxField {
    pub fn zeros(problem: &ProblemSpec) -> Self {
        let z = MaterialFlux::zeros(problem.n_cells(), problem.quadrature().n_directions());
        Self { materials: [z.clone(), z] }
    }
}

/// Per-direction coefficients of the swept operator for one material.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportOperatorData {
    /// `sigma_t,l + |mu|/lambda_l`.
    pub removal: Vec<f64>,
    /// `|mu| p_l' / (p_l lambda_l')`, multiplying `psi_l'`.
    pub coupling: Vec<f64>,
    pub scattering: f64,
    pub source: f64,
}

impl TransportOperatorData {
    pub fn new(problem: &ProblemSpec, l: usize) -> Self {
        let quad = problem.quadrature();
        let lo = 1 - l;
        let m = problem.material(l);
        let other = problem.material(lo);
        let ratio = problem.probability(lo) / (problem.probability(l) * other.lambda);
        let dirs = 0..quad.n_directions();
        Self {
            removal: dirs.clone().map(|d| m.sigma_t + quad.mu(d).abs() / m.lambda).collect(),
            coupling: dirs.map(|d| quad.mu(d).abs() * ratio).collect(),
            scattering: m.sigma_s,
            source: m.q,
        }
    }
}

/// One transport sweep of material `l` over all directions.
///
/// `scalar_flux` feeds the isotropic scattering source and `coupling` is the
/// angular flux of the other material. Both are held fixed.
pub fn sweep_material(
    problem: &ProblemSpec,
    l: usize,
    scalar_flux: &LdField,
    coupling: &MaterialFlux,
) -> Result<MaterialFlux> {
    let quad = problem.quadrature();
    let n = problem.n_cells();
    let nd = quad.n_directions();
    if scalar_flux.n_cells() != n {
        return Err(Error::invalid(format!(
            "scalar flux has {} cells, mesh has {n}",
            scalar_flux.n_cells()
        )));
    }
    coupling.check_shape(n, nd, "coupling flux")?;

    let op = TransportOperatorData::new(problem, l);
    let h = problem.cell_width();
    let inflow = problem.inflow();
    let mut out = MaterialFlux::zeros(n, nd);

    for dir in 0..nd {
        let mu = quad.mu(dir);
        let m = mu.abs();
        let sig_h = op.removal[dir] * h;
        let node_source = |cell: usize, node: usize| {
            0.5 * op.scattering * scalar_flux[cell][node]
                + op.coupling[dir] * coupling.get(dir, cell)[node]
                + 0.5 * op.source
        };
        // Diagonal and off-diagonal entries of the 2x2 cell system; the
        // inflow node gets the edge term.
        let diag = 0.5 * m + sig_h / 3.0;
        let upper_in = 0.5 * m + sig_h / 6.0;
        let lower_out = -0.5 * m + sig_h / 6.0;
        let det = diag * diag - upper_in * lower_out;
        let node_idx = dir % quad.n_per_half();
        match quad.half_of(dir) {
            Half::Positive => {
                let mut psi_in = inflow.left[l][node_idx];
                for cell in 0..n {
                    let (sl, sr) = (node_source(cell, LEFT), node_source(cell, RIGHT));
                    let b_l = h * (2.0 * sl + sr) / 6.0 + m * psi_in;
                    let b_r = h * (sl + 2.0 * sr) / 6.0;
                    // [diag upper_in; lower_out diag] [L; R] = [b_l; b_r]
                    let left = (diag * b_l - upper_in * b_r) / det;
                    let right = (diag * b_r - lower_out * b_l) / det;
                    out.set(dir, cell, [left, right]);
                    psi_in = right;
                }
            }
            Half::Negative => {
                let mut psi_in = inflow.right[l][node_idx];
                for cell in (0..n).rev() {
                    let (sl, sr) = (node_source(cell, LEFT), node_source(cell, RIGHT));
                    let b_l = h * (2.0 * sl + sr) / 6.0;
                    let b_r = h * (sl + 2.0 * sr) / 6.0 + m * psi_in;
                    // [diag lower_out; upper_in diag] [L; R] = [b_l; b_r]
                    let left = (diag * b_l - lower_out * b_r) / det;
                    let right = (diag * b_r - upper_in * b_l) / det;
                    out.set(dir, cell, [left, right]);
                    psi_in = left;
                }
            }
        }
    }
    if !out.is_finite() {
        return Err(Error::NumericalFailure(format!("non-finite angular flux after sweep of material {}", l + 1)));
    }
    Ok(out)
}

/// `n_max` Gauss-Seidel cycles over the two materials: material 1 is swept
/// against the latest material-2 flux, then material 2 against the fresh
/// material-1 flux. Scattering sources stay fixed.
pub fn gauss_seidel_highorder(
    problem: &ProblemSpec,
    scalar_flux: [&LdField; 2],
    psi2_start: &MaterialFlux,
    n_max: usize,
) -> Result<[MaterialFlux; 2]> {
    if n_max == 0 {
        return Err(Error::invalid("n_max must be at least 1"));
    }
    let mut psi2 = psi2_start.clone();
    let mut psi1 = sweep_material(problem, 0, scalar_flux[0], &psi2)?;
    psi2 = sweep_material(problem, 1, scalar_flux[1], &psi1)?;
    for _ in 1..n_max {
        psi1 = sweep_material(problem, 0, scalar_flux[0], &psi2)?;
        psi2 = sweep_material(problem, 1, scalar_flux[1], &psi1)?;
    }
    Ok([psi1, psi2])
}

/// Half-range moments at one node, prefixed convention: `phi_minus >= 0`,
/// `j_minus <= 0` for nonnegative fluxes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HalfMoments {
    pub phi_plus: f64,
    pub phi_minus: f64,
    pub j_plus: f64,
    pub j_minus: f64,
    /// Second moments `int mu^2 psi` over each half.
    pub k_plus: f64,
    pub k_minus: f64,
}

impl HalfMoments {
    pub fn phi(&self) -> f64 {
        self.phi_plus + self.phi_minus
    }

    pub fn current(&self) -> f64 {
        self.j_plus + self.j_minus
    }

    pub fn partial(&self, half: Half) -> (f64, f64, f64) {
        match half {
            Half::Positive => (self.phi_plus, self.j_plus, self.k_plus),
            Half::Negative => (self.phi_minus, self.j_minus, self.k_minus),
        }
    }
}

/// Nodal half-range moments of one material.
pub type MomentField = Vec<[HalfMoments; 2]>;

/// Half-range moments of `psi` at every node.
pub fn angular_moments(quad: &AngularQuadrature, psi: &MaterialFlux) -> MomentField {
    let n = psi.n_cells();
    let mut out = vec![[HalfMoments::default(); 2]; n];
    for dir in 0..quad.n_directions() {
        let mu = quad.mu(dir);
        let w = quad.weight(dir);
        let positive = quad.half_of(dir) == Half::Positive;
        for (cell, nodes) in out.iter_mut().enumerate() {
            let v = psi.get(dir, cell);
            for (node, hm) in nodes.iter_mut().enumerate() {
                let f = w * v[node];
                if positive {
                    hm.phi_plus += f;
                    hm.j_plus += mu * f;
                    hm.k_plus += mu * mu * f;
                } else {
                    hm.phi_minus += f;
                    hm.j_minus += mu * f;
                    hm.k_minus += mu * mu * f;
                }
            }
        }
    }
    out
}

/// Nodal scalar flux `phi = phi^+ + phi^-`.
pub fn scalar_flux(moments: &MomentField) -> LdField {
    LdField::from_nodes(moments.iter().map(|m| [m[0].phi(), m[1].phi()]).collect())
}

/// Max-norm residual of the nodal LD equations of material `l`, scaled by the
/// cell width. Zero (to round-off) for a swept flux with the same sources.
pub fn sweep_residual(
    problem: &ProblemSpec,
    l: usize,
    scalar_flux: &LdField,
    coupling: &MaterialFlux,
    psi: &MaterialFlux,
) -> f64 {
    let quad = problem.quadrature();
    let op = TransportOperatorData::new(problem, l);
    let h = problem.cell_width();
    let n = problem.n_cells();
    let mut worst: f64 = 0.0;
    for dir in 0..quad.n_directions() {
        let mu = quad.mu(dir);
        let idx = dir % quad.n_per_half();
        for cell in 0..n {
            let [pl, pr] = psi.get(dir, cell);
            let avg = 0.5 * (pl + pr);
            let s = |node: usize| {
                0.5 * op.scattering * scalar_flux[cell][node]
                    + op.coupling[dir] * coupling.get(dir, cell)[node]
                    + 0.5 * op.source
            };
            let (sl, sr) = (s(LEFT), s(RIGHT));
            let sig = op.removal[dir];
            let (stream_l, stream_r) = if mu > 0.0 {
                let pin = if cell == 0 { problem.inflow().left[l][idx] } else { psi.get(dir, cell - 1)[RIGHT] };
                (mu * (avg - pin), mu * (pr - avg))
            } else {
                let pin = if cell + 1 == n { problem.inflow().right[l][idx] } else { psi.get(dir, cell + 1)[LEFT] };
                (mu * (avg - pl), mu * (pin - avg))
            };
            let rl = stream_l + sig * h * (2.0 * pl + pr) / 6.0 - h * (2.0 * sl + sr) / 6.0;
            let rr = stream_r + sig * h * (pl + 2.0 * pr) / 6.0 - h * (sl + 2.0 * sr) / 6.0;
            worst = worst.max(rl.abs()).max(rr.abs());
        }
    }
    worst / h
}
