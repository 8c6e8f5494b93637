//! Independent dense reference solvers.
//!
//! Each oracle assembles a global matrix from the discontinuous Galerkin weak
//! form edge by edge, using its own unknown numbering and its own quadrature
//! for the mass matrix, and solves it with a dense LU factorization. None of
//! them reuse the per-cell formulas of the library.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// Two-point Gauss rule on [0, 1], exact for the cubic integrands below.
const GAUSS: [(f64, f64); 2] = [(0.211_324_865_405_187_1, 0.5), (0.788_675_134_594_812_9, 0.5)];

fn basis(node: usize, xi: f64) -> f64 {
    if node == 0 {
        1.0 - xi
    } else {
        xi
    }
}

/// Element mass matrix `int b_j b_k dx` on a cell of width `h`.
pub fn mass(h: f64) -> [[f64; 2]; 2] {
    let mut m = [[0.0; 2]; 2];
    for (j, row) in m.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            *v = GAUSS.iter().map(|&(x, w)| w * h * basis(j, x) * basis(k, x)).sum();
        }
    }
    m
}

/// `int b_j' F dx` for a linear `F` with nodal values `f`, i.e. `-Fbar` for
/// the left basis function and `+Fbar` for the right one.
fn stiffness(j: usize, f: [f64; 2]) -> f64 {
    let slope_of_basis = if j == 0 { -1.0 } else { 1.0 };
    // b_j' = slope_of_basis / h and int F dx = h Fbar
    slope_of_basis * GAUSS.iter().map(|&(x, w)| w * (f[0] * basis(0, x) + f[1] * basis(1, x))).sum::<f64>()
}

pub fn solve_dense(a: DMatrix<f64>, b: DVector<f64>) -> DVector<f64> {
    a.lu().solve(&b).expect("oracle matrix is nonsingular")
}

/// One-direction transport data for [`transport_dense`].
pub struct Direction {
    pub mu: f64,
    /// Removal cross section for this direction.
    pub removal: f64,
    /// Inflow value on the upwind face.
    pub inflow: f64,
}

/// Solves `mu psi' + removal psi = S` for every direction with an LD
/// upwind discretization. `source[d][i]` holds nodal values of `S`.
/// Returns `psi[d][i] = [left, right]`.
pub fn transport_dense(h: f64, dirs: &[Direction], source: &[Vec<[f64; 2]>]) -> Vec<Vec<[f64; 2]>> {
    let n = source[0].len();
    let m = mass(h);
    dirs.iter()
        .zip(source)
        .map(|(d, src)| {
            let idx = |i: usize, node: usize| 2 * i + node;
            let mut a = DMatrix::zeros(2 * n, 2 * n);
            let mut b = DVector::zeros(2 * n);
            for i in 0..n {
                for j in 0..2 {
                    for k in 0..2 {
                        a[(idx(i, j), idx(i, k))] += d.removal * m[j][k];
                        b[idx(i, j)] += m[j][k] * src[i][k];
                        // -int b_j' mu psi
                        let mut f = [0.0; 2];
                        f[k] = d.mu;
                        a[(idx(i, j), idx(i, k))] -= stiffness(j, f);
                    }
                }
            }
            // Edge fluxes mu psi_hat: + on the right node of the cell to the
            // left of the edge, - on the left node of the cell to its right.
            for e in 0..=n {
                let upwind = if d.mu > 0.0 {
                    (e > 0).then(|| idx(e - 1, 1))
                } else {
                    (e < n).then(|| idx(e, 0))
                };
                let rows: Vec<(usize, f64)> = [
                    (e > 0).then(|| (idx(e - 1, 1), 1.0)),
                    (e < n).then(|| (idx(e, 0), -1.0)),
                ]
                .into_iter()
                .flatten()
                .collect();
                for (row, sign) in rows {
                    match upwind {
                        Some(col) => a[(row, col)] += sign * d.mu,
                        None => b[row] -= sign * d.mu * d.inflow,
                    }
                }
            }
            let x = solve_dense(a, b);
            (0..n).map(|i| [x[idx(i, 0)], x[idx(i, 1)]]).collect()
        })
        .collect()
}

/// Direct solve of the one-material LD discrete-ordinates problem
/// `mu psi' + sigma_t psi = sigma_s/2 phi + q/2` with vacuum boundaries.
/// All directions and the scattering coupling are assembled into one
/// matrix, so no iteration is involved. Returns nodal `phi`.
pub fn one_material_dense(
    sigma_t: f64,
    sigma_s: f64,
    q: f64,
    length: f64,
    n: usize,
    mus: &[f64],
    weights: &[f64],
) -> Vec<[f64; 2]> {
    let h = length / n as f64;
    let nd = mus.len();
    let m = mass(h);
    let size = nd * 2 * n;
    let idx = |d: usize, i: usize, node: usize| (d * n + i) * 2 + node;
    let mut a = DMatrix::zeros(size, size);
    let mut b = DVector::zeros(size);
    for d in 0..nd {
        let mu = mus[d];
        for i in 0..n {
            for j in 0..2 {
                for k in 0..2 {
                    a[(idx(d, i, j), idx(d, i, k))] += sigma_t * m[j][k];
                    let mut f = [0.0; 2];
                    f[k] = mu;
                    a[(idx(d, i, j), idx(d, i, k))] -= stiffness(j, f);
                    // scattering: (sigma_s / 2) sum_d' w_d' psi_d'
                    for dd in 0..nd {
                        a[(idx(d, i, j), idx(dd, i, k))] -= 0.5 * sigma_s * weights[dd] * m[j][k];
                    }
                    b[idx(d, i, j)] += m[j][k] * 0.5 * q;
                }
            }
        }
        for e in 0..=n {
            let upwind = if mu > 0.0 { (e > 0).then(|| idx(d, e - 1, 1)) } else { (e < n).then(|| idx(d, e, 0)) };
            let Some(col) = upwind else { continue };
            if e > 0 {
                a[(idx(d, e - 1, 1), col)] += mu;
            }
            if e < n {
                a[(idx(d, e, 0), col)] -= mu;
            }
        }
    }
    let x = solve_dense(a, b);
    (0..n)
        .map(|i| {
            let mut phi = [0.0; 2];
            for d in 0..nd {
                phi[0] += weights[d] * x[idx(d, i, 0)];
                phi[1] += weights[d] * x[idx(d, i, 1)];
            }
            phi
        })
        .collect()
}

/// Inputs of the isotropic double-P1 oracle for one material.
pub struct Dp1 {
    pub p: f64,
    pub sigma_t: f64,
    pub sigma_a: f64,
    pub rate: f64,
    pub h: f64,
    /// Incoming partial current and second moment at `x = 0`.
    pub left: (f64, f64),
    /// Incoming partial current (negative) and second moment at `x = X`.
    pub right: (f64, f64),
    pub s0: Vec<[f64; 2]>,
    pub s1: Vec<[f64; 2]>,
}

/// Double-P1 equations with `J^± = ±phi^±/2`, `K^± = phi^±/3`:
///
/// ```text
/// p d/dx (phi+/2 - phi-/2) + p (sigma_a phi + r (phi+ + phi-)/2) = S0
/// p d/dx (phi+/3 + phi-/3) + p (sigma_t (phi+ - phi-)/2 + r (phi+ - phi-)/3) = S1
/// ```
///
/// with each half-range flux upwinded from its own side. Returns
/// `(phi+, phi-)` nodal values.
pub fn dp1_dense(cfg: &Dp1) -> (Vec<[f64; 2]>, Vec<[f64; 2]>) {
    let n = cfg.s0.len();
    let m = mass(cfg.h);
    // unknown numbering: all phi+ nodes first, then all phi- nodes
    let plus = |i: usize, node: usize| 2 * i + node;
    let minus = |i: usize, node: usize| 2 * n + 2 * i + node;
    // equation numbering: moment-major
    let row = |moment: usize, i: usize, node: usize| moment * 2 * n + 2 * i + node;
    let mut a = DMatrix::zeros(4 * n, 4 * n);
    let mut b = DVector::zeros(4 * n);
    let p = cfg.p;
    // flux coefficients (phi+, phi-) and collision coefficients per moment
    let flux = [[0.5 * p, -0.5 * p], [p / 3.0, p / 3.0]];
    let coll = [
        [p * (cfg.sigma_a + 0.5 * cfg.rate), p * (cfg.sigma_a + 0.5 * cfg.rate)],
        [p * (0.5 * cfg.sigma_t + cfg.rate / 3.0), -p * (0.5 * cfg.sigma_t + cfg.rate / 3.0)],
    ];
    let src = [&cfg.s0, &cfg.s1];
    for moment in 0..2 {
        for i in 0..n {
            for j in 0..2 {
                let r = row(moment, i, j);
                for k in 0..2 {
                    for (half, col) in [(0, plus(i, k)), (1, minus(i, k))] {
                        a[(r, col)] += coll[moment][half] * m[j][k];
                        let mut f = [0.0; 2];
                        f[k] = flux[moment][half];
                        a[(r, col)] -= stiffness(j, f);
                    }
                    b[r] += m[j][k] * src[moment][i][k];
                }
            }
        }
        // edge fluxes: phi+ from the left cell, phi- from the right cell
        let inflow = |side: (f64, f64)| p * if moment == 0 { side.0 } else { side.1 };
        for e in 0..=n {
            let mut terms: Vec<(Option<usize>, f64)> = Vec::new();
            terms.push(if e > 0 { (Some(plus(e - 1, 1)), flux[moment][0]) } else { (None, inflow(cfg.left)) });
            terms.push(if e < n { (Some(minus(e, 0)), flux[moment][1]) } else { (None, inflow(cfg.right)) });
            let rows = [(e > 0).then(|| (row(moment, e - 1, 1), 1.0)), (e < n).then(|| (row(moment, e, 0), -1.0))];
            for (r, sign) in rows.into_iter().flatten() {
                for &(col, coef) in &terms {
                    match col {
                        Some(c) => a[(r, c)] += sign * coef,
                        None => b[r] -= sign * coef,
                    }
                }
            }
        }
    }
    let x = solve_dense(a, b);
    (
        (0..n).map(|i| [x[plus(i, 0)], x[plus(i, 1)]]).collect(),
        (0..n).map(|i| [x[minus(i, 0)], x[minus(i, 1)]]).collect(),
    )
}

/// Inputs of the P1 diffusion oracle.
pub struct Diffusion {
    pub h: f64,
    /// Nodal `sigma_a` and `sigma_t`.
    pub sigma_a: Vec<[f64; 2]>,
    pub sigma_t: Vec<[f64; 2]>,
    pub q: Vec<[f64; 2]>,
    /// Incoming partial current and second moment at each face.
    pub left: (f64, f64),
    pub right: (f64, f64),
}

/// `J' + sigma_a phi = q`, `phi'/3 + sigma_t J = 0` with Marshak edge
/// fluxes `J^± = phi/4 ± J/2`, `K^± = (phi/2 ± J)/3`. Returns `(phi, J)`.
pub fn diffusion_dense(cfg: &Diffusion) -> (Vec<[f64; 2]>, Vec<[f64; 2]>) {
    let n = cfg.q.len();
    let m = mass(cfg.h);
    let phi = |i: usize, node: usize| 4 * i + node;
    let cur = |i: usize, node: usize| 4 * i + 2 + node;
    let row = |moment: usize, i: usize, node: usize| 4 * i + 2 * moment + node;
    let mut a = DMatrix::zeros(4 * n, 4 * n);
    let mut b = DVector::zeros(4 * n);
    for i in 0..n {
        for j in 0..2 {
            for k in 0..2 {
                // zeroth moment: flux J, collision sigma_a phi
                a[(row(0, i, j), phi(i, k))] += m[j][k] * cfg.sigma_a[i][k];
                let mut f = [0.0; 2];
                f[k] = 1.0;
                a[(row(0, i, j), cur(i, k))] -= stiffness(j, f);
                b[row(0, i, j)] += m[j][k] * cfg.q[i][k];
                // first moment: flux phi/3, collision sigma_t J
                a[(row(1, i, j), cur(i, k))] += m[j][k] * cfg.sigma_t[i][k];
                f[k] = 1.0 / 3.0;
                a[(row(1, i, j), phi(i, k))] -= stiffness(j, f);
            }
        }
    }
    // (phi, J) coefficients of the outgoing partial moments
    let out_plus = [[0.25, 0.5], [1.0 / 6.0, 1.0 / 3.0]];
    let out_minus = [[-0.25, 0.5], [1.0 / 6.0, -1.0 / 3.0]];
    for moment in 0..2 {
        let inflow = |side: (f64, f64)| if moment == 0 { side.0 } else { side.1 };
        for e in 0..=n {
            let mut terms: Vec<(Option<usize>, f64)> = Vec::new();
            if e > 0 {
                terms.push((Some(phi(e - 1, 1)), out_plus[moment][0]));
                terms.push((Some(cur(e - 1, 1)), out_plus[moment][1]));
            } else {
                terms.push((None, inflow(cfg.left)));
            }
            if e < n {
                terms.push((Some(phi(e, 0)), out_minus[moment][0]));
                terms.push((Some(cur(e, 0)), out_minus[moment][1]));
            } else {
                terms.push((None, inflow(cfg.right)));
            }
            let rows = [(e > 0).then(|| (row(moment, e - 1, 1), 1.0)), (e < n).then(|| (row(moment, e, 0), -1.0))];
            for (r, sign) in rows.into_iter().flatten() {
                for &(col, coef) in &terms {
                    match col {
                        Some(c) => a[(r, c)] += sign * coef,
                        None => b[r] -= sign * coef,
                    }
                }
            }
        }
    }
    let x = solve_dense(a, b);
    (
        (0..n).map(|i| [x[phi(i, 0)], x[phi(i, 1)]]).collect(),
        (0..n).map(|i| [x[cur(i, 0)], x[cur(i, 1)]]).collect(),
    )
}

pub fn max_rel_diff(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    let scale = b.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    a.iter().flatten().zip(b.iter().flatten()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

use bsm_core::driver::MultilevelSolution;
use bsm_core::highorder::angular_moments;
use bsm_core::problem::ProblemSpec;

/// Largest relative mismatch between the low-order partial fluxes and the
/// half-range moments of the angular flux, and between `<phi>` and
/// `sum p (phi+ + phi-)`.
pub fn fixed_point_mismatch(problem: &ProblemSpec, sol: &MultilevelSolution) -> (f64, f64) {
    let quad = problem.quadrature();
    let p = problem.probabilities();
    let scale = sol.ensemble.phi.max_abs();
    let mut partial: f64 = 0.0;
    for l in 0..2 {
        let moments = angular_moments(quad, &sol.psi.materials[l]);
        for (i, m) in moments.iter().enumerate() {
            for node in 0..2 {
                partial = partial
                    .max((m[node].phi_plus - sol.partial[l].phi_plus[i][node]).abs())
                    .max((m[node].phi_minus - sol.partial[l].phi_minus[i][node]).abs());
            }
        }
    }
    let mut ensemble: f64 = 0.0;
    for i in 0..problem.n_cells() {
        for node in 0..2 {
            let sum: f64 = (0..2).map(|l| p[l] * (sol.partial[l].phi_plus[i][node] + sol.partial[l].phi_minus[i][node])).sum();
            ensemble = ensemble.max((sum - sol.ensemble.phi[i][node]).abs());
        }
    }
    (partial / scale, ensemble / scale)
}

/// `max |f(x) - f(X - x)| / max |f|` over cell averages.
pub fn reflection_asymmetry(averages: &[f64]) -> f64 {
    let n = averages.len();
    let scale = averages.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    (0..n).map(|i| (averages[i] - averages[n - 1 - i]).abs()).fold(0.0, f64::max) / scale
}

pub fn rel_inf_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

use bsm_core::closures::{EnsembleCoefficients, NodeFactors, ProlongationFactors};
use bsm_core::field::LdField;
use bsm_core::loqd::{BoundaryData, QdCoefficients, QdSystem};
use bsm_core::loym::MaterialSystem;
use bsm_core::problem::InflowMoments;

pub fn lcg(seed: u64) -> impl FnMut() -> f64 {
    let mut s = seed;
    move || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (s >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Isotropic-factor material system against the double-P1 oracle on a
/// 10-cell mesh with random sources. Returns the relative nodal error.
pub fn dp1_case_error(seed: u64) -> f64 {
    let n = 10;
    let mut rnd = lcg(seed);
    let s0: Vec<[f64; 2]> = (0..n).map(|_| [rnd(), rnd()]).collect();
    let s1: Vec<[f64; 2]> = (0..n).map(|_| [0.2 * rnd() - 0.1, 0.2 * rnd() - 0.1]).collect();
    let cfg = Dp1 {
        p: 0.1 + 0.8 * rnd(),
        sigma_t: 1.0 + rnd(),
        sigma_a: 0.5 * rnd(),
        rate: 0.5 + 2.0 * rnd(),
        h: 0.1 + 0.5 * rnd(),
        left: (0.25, 0.15),
        right: (-0.4, 0.3),
        s0: s0.clone(),
        s1: s1.clone(),
    };
    let factors = vec![[NodeFactors::ISOTROPIC; 2]; n];
    let system = MaterialSystem {
        probability: cfg.p,
        sigma_t: cfg.sigma_t,
        sigma_a: cfg.sigma_a,
        transition_rate: cfg.rate,
        width: cfg.h,
        factors: &factors,
        inflow_left: InflowMoments { phi: 0.5, current: cfg.left.0, second: cfg.left.1 },
        inflow_right: InflowMoments { phi: 0.8, current: cfg.right.0, second: cfg.right.1 },
        source_zeroth: LdField::from_nodes(s0),
        source_first: LdField::from_nodes(s1),
    };
    let got = system.solve().unwrap();
    let (plus, minus) = dp1_dense(&cfg);
    max_rel_diff(got.phi_plus.nodes(), &plus).max(max_rel_diff(got.phi_minus.nodes(), &minus))
}

/// Quasidiffusion coefficients with `E = 1/3`, `eta = 0` and isotropic
/// prolongation factors.
pub fn diffusion_coefficients(sigma_a: &[[f64; 2]], sigma_t: &[[f64; 2]]) -> QdCoefficients {
    let ensemble = sigma_a
        .iter()
        .zip(sigma_t)
        .map(|(a, t)| {
            [0, 1].map(|k| EnsembleCoefficients {
                sigma_a: a[k],
                sigma_t: t[k],
                eta: 0.0,
                eddington: 1.0 / 3.0,
                c_plus: 0.5,
                c_minus: -0.5,
            })
        })
        .collect();
    QdCoefficients { ensemble, prolongation: vec![[ProlongationFactors::ISOTROPIC; 2]; sigma_a.len()] }
}

/// Diffusion-limit quasidiffusion solve against the P1 oracle on a 10-cell
/// mesh with random nodal cross sections. Returns the relative nodal error.
pub fn diffusion_case_error(seed: u64) -> f64 {
    let n = 10;
    let mut rnd = lcg(seed);
    let sigma_a: Vec<[f64; 2]> = (0..n).map(|_| [0.1 + rnd(), 0.1 + rnd()]).collect();
    let sigma_t: Vec<[f64; 2]> = sigma_a.iter().map(|a| [a[0] + rnd(), a[1] + rnd()]).collect();
    let q: Vec<[f64; 2]> = (0..n).map(|_| [rnd(), rnd()]).collect();
    let cfg = Diffusion { h: 0.6, sigma_a: sigma_a.clone(), sigma_t: sigma_t.clone(), q: q.clone(), left: (0.3, 0.2), right: (-0.1, 0.05) };
    let coefficients = diffusion_coefficients(&sigma_a, &sigma_t);
    let source = LdField::from_nodes(q);
    let system = QdSystem {
        width: cfg.h,
        coefficients: &coefficients,
        source: &source,
        boundary: BoundaryData {
            left: InflowMoments { phi: 0.0, current: cfg.left.0, second: cfg.left.1 },
            right: InflowMoments { phi: 0.0, current: cfg.right.0, second: cfg.right.1 },
        },
    };
    let got = system.solve().unwrap();
    let (phi, cur) = diffusion_dense(&cfg);
    max_rel_diff(got.phi.nodes(), &phi).max(max_rel_diff(got.current.nodes(), &cur))
}
