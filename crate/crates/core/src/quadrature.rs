//! Double Gauss-Legendre angular quadrature.
//!
//! Each half-range, `(0, 1]` and `[-1, 0)`, carries its own Gauss-Legendre
//! rule. Half-range moments of polynomials up to degree `2n - 1` are exact.
//!
//! Directions are indexed `0..n` for the positive nodes `mu_m` (ascending)
//! and `n..2n` for their mirror images `-mu_m`.

use crate::error::{Error, Result};

/// One of the two half-ranges of the direction cosine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    Positive,
    Negative,
}

impl Half {
    pub fn sign(self) -> f64 {
        match self {
            Half::Positive => 1.0,
            Half::Negative => -1.0,
        }
    }
}

/// How a half-range moment is reported.
///
/// `Raw` is the literal integral from 0 to `+1` or `-1`. `Prefixed`
/// multiplies it by the sign of the half, giving the integral over the
/// half-interval in ascending orientation. Partial fluxes and partial
/// currents use the prefixed form (`phi^- >= 0`, `J^- <= 0`). Ratios of two
/// moments of the same half are identical under either convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentConvention {
    Raw,
    Prefixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngularQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_STEPS: usize = 100;

impl AngularQuadrature {
    /// Builds the `n_per_half`-point Gauss-Legendre rule mapped onto `[0, 1]`
    /// and mirrors it onto `[-1, 0]`.
    pub fn double_gauss_legendre(n_per_half: usize) -> Result<Self> {
        if n_per_half == 0 {
            return Err(Error::invalid("quadrature needs at least one node per half-range"));
        }
        let (x, w) = gauss_legendre(n_per_half);
        // [-1, 1] -> [0, 1]
        let mut pairs: Vec<(f64, f64)> = x
            .iter()
            .zip(&w)
            .map(|(&xi, &wi)| (0.5 * (xi + 1.0), 0.5 * wi))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Ok(Self { nodes, weights })
    }

    pub fn n_per_half(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_directions(&self) -> usize {
        2 * self.nodes.len()
    }

    /// Positive nodes `mu_m`, ascending.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights shared by `mu_m` and `-mu_m`. They sum to one per half.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Signed direction cosine of direction index `dir`.
    pub fn mu(&self, dir: usize) -> f64 {
        let n = self.n_per_half();
        if dir < n {
            self.nodes[dir]
        } else {
            -self.nodes[dir - n]
        }
    }

    pub fn weight(&self, dir: usize) -> f64 {
        self.weights[dir % self.n_per_half()]
    }

    pub fn half_of(&self, dir: usize) -> Half {
        if dir < self.n_per_half() {
            Half::Positive
        } else {
            Half::Negative
        }
    }

    /// Direction indices belonging to a half-range.
    pub fn directions(&self, half: Half) -> std::ops::Range<usize> {
        let n = self.n_per_half();
        match half {
            Half::Positive => 0..n,
            Half::Negative => n..2 * n,
        }
    }

    /// Discrete half-range moment of order `k` of values given at the nodes of
    /// `half` (ordered like [`Self::nodes`]).
    pub fn half_moment(
        &self,
        values: &[f64],
        k: u32,
        half: Half,
        convention: MomentConvention,
    ) -> Result<f64> {
        if values.len() != self.n_per_half() {
            return Err(Error::invalid(format!(
                "expected {} node values on the half-range, got {}",
                self.n_per_half(),
                values.len()
            )));
        }
        let s = half.sign();
        let oriented: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .zip(values)
            .map(|((&mu, &w), &v)| w * (s * mu).powi(k as i32) * v)
            .sum();
        Ok(match convention {
            MomentConvention::Prefixed => oriented,
            MomentConvention::Raw => s * oriented,
        })
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on
/// `P_n`, started from the Tricomi approximation of each root.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let theta = std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5);
        let mut z = theta.cos();
        let mut dp = 1.0;
        for _ in 0..NEWTON_MAX_STEPS {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= NEWTON_TOL {
                dp = legendre_with_derivative(n, z).1;
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}
