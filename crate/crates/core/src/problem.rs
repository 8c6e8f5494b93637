//! Two-material problem data and the built-in benchmark catalog.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quadrature::{AngularQuadrature, Half, MomentConvention};

/// Cross sections, mean chord length and source of one material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialSpec {
    /// Total cross section [1/cm].
    pub sigma_t: f64,
    /// Scattering cross section [1/cm].
    pub sigma_s: f64,
    /// Mean chord length [cm].
    pub lambda: f64,
    /// Isotropic source density.
    pub q: f64,
}

impl MaterialSpec {
    pub fn new(sigma_t: f64, sigma_s: f64, lambda: f64, q: f64) -> Result<Self> {
        let m = Self { sigma_t, sigma_s, lambda, q };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.sigma_t, self.sigma_s, self.lambda, self.q]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::invalid("material data must be finite"));
        }
        if self.sigma_t <= 0.0 {
            return Err(Error::invalid(format!("sigma_t must be positive, got {}", self.sigma_t)));
        }
        if self.sigma_s < 0.0 || self.sigma_s > self.sigma_t {
            return Err(Error::invalid(format!(
                "sigma_s must lie in [0, sigma_t], got {} with sigma_t {}",
                self.sigma_s, self.sigma_t
            )));
        }
        if self.lambda <= 0.0 {
            return Err(Error::invalid(format!("lambda must be positive, got {}", self.lambda)));
        }
        if self.q < 0.0 {
            return Err(Error::invalid(format!("source must be nonnegative, got {}", self.q)));
        }
        Ok(())
    }

    pub fn sigma_a(&self) -> f64 {
        self.sigma_t - self.sigma_s
    }
}

/// `p_l = lambda_l / (lambda_1 + lambda_2)`.
pub fn mixing_probabilities(lambda_1: f64, lambda_2: f64) -> Result<(f64, f64)> {
    if !(lambda_1 > 0.0 && lambda_2 > 0.0) || !lambda_1.is_finite() || !lambda_2.is_finite() {
        return Err(Error::invalid(format!(
            "chord lengths must be positive, got {lambda_1} and {lambda_2}"
        )));
    }
    let sum = lambda_1 + lambda_2;
    Ok((lambda_1 / sum, lambda_2 / sum))
}

/// Angular inflow at both slab faces, per material.
///
/// `left[l]` holds `psi_l` on the positive nodes entering at `x = 0`;
/// `right[l]` holds `psi_l` on the negative nodes `-mu_m` entering at
/// `x = X`, in the order of [`AngularQuadrature::nodes`].
#[derive(Debug, Clone, PartialEq)]
pub struct Inflow {
    pub left: [Vec<f64>; 2],
    pub right: [Vec<f64>; 2],
}

impl Inflow {
    pub fn vacuum(n_per_half: usize) -> Self {
        let z = vec![0.0; n_per_half];
        Self {
            left: [z.clone(), z.clone()],
            right: [z.clone(), z],
        }
    }

    /// Same angle-independent inflow on both faces for both materials.
    pub fn isotropic(n_per_half: usize, value: f64) -> Self {
        let v = vec![value; n_per_half];
        Self {
            left: [v.clone(), v.clone()],
            right: [v.clone(), v],
        }
    }

    pub fn is_vacuum(&self) -> bool {
        self.left.iter().chain(&self.right).flatten().all(|&v| v == 0.0)
    }
}

/// Moments of an inflow profile entering through one face.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InflowMoments {
    /// Partial scalar flux (nonnegative).
    pub phi: f64,
    /// Partial current with the sign of the half-range.
    pub current: f64,
    /// Second half-range moment (nonnegative).
    pub second: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    materials: [MaterialSpec; 2],
    length: f64,
    n_cells: usize,
    quadrature: AngularQuadrature,
    inflow: Inflow,
    probabilities: [f64; 2],
}

impl ProblemSpec {
    pub fn new(
        materials: [MaterialSpec; 2],
        length: f64,
        n_cells: usize,
        quadrature: AngularQuadrature,
        inflow: Inflow,
    ) -> Result<Self> {
        for m in &materials {
            m.validate()?;
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::invalid(format!("slab length must be positive, got {length}")));
        }
        if n_cells == 0 {
            return Err(Error::invalid("mesh needs at least one cell"));
        }
        let n = quadrature.n_per_half();
        for v in inflow.left.iter().chain(&inflow.right) {
            if v.len() != n {
                return Err(Error::invalid(format!(
                    "inflow profile has {} values, quadrature has {n} nodes per half",
                    v.len()
                )));
            }
            if v.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                return Err(Error::invalid("inflow values must be finite and nonnegative"));
            }
        }
        let (p1, p2) = mixing_probabilities(materials[0].lambda, materials[1].lambda)?;
        Ok(Self {
            materials,
            length,
            n_cells,
            quadrature,
            inflow,
            probabilities: [p1, p2],
        })
    }

    pub fn material(&self, l: usize) -> &MaterialSpec {
        &self.materials[l]
    }

    pub fn materials(&self) -> &[MaterialSpec; 2] {
        &self.materials
    }

    pub fn probability(&self, l: usize) -> f64 {
        self.probabilities[l]
    }

    pub fn probabilities(&self) -> [f64; 2] {
        self.probabilities
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn cell_width(&self) -> f64 {
        self.length / self.n_cells as f64
    }

    pub fn cell_center(&self, cell: usize) -> f64 {
        (cell as f64 + 0.5) * self.cell_width()
    }

    pub fn quadrature(&self) -> &AngularQuadrature {
        &self.quadrature
    }

    pub fn inflow(&self) -> &Inflow {
        &self.inflow
    }

    /// Ensemble source `<q> = p_1 q_1 + p_2 q_2`.
    pub fn ensemble_source(&self) -> f64 {
        self.probabilities[0] * self.materials[0].q + self.probabilities[1] * self.materials[1].q
    }

    /// Inflow moments of material `l` entering at `x = 0`.
    pub fn inflow_left(&self, l: usize) -> InflowMoments {
        self.inflow_moments(&self.inflow.left[l], Half::Positive)
    }

    /// Inflow moments of material `l` entering at `x = X`.
    pub fn inflow_right(&self, l: usize) -> InflowMoments {
        self.inflow_moments(&self.inflow.right[l], Half::Negative)
    }

    fn inflow_moments(&self, values: &[f64], half: Half) -> InflowMoments {
        let q = &self.quadrature;
        let m = |k| {
            q.half_moment(values, k, half, MomentConvention::Prefixed)
                .expect("inflow length validated at construction")
        };
        InflowMoments { phi: m(0), current: m(1), second: m(2) }
    }

    /// Copy of the problem with the two materials swapped.
    pub fn swapped(&self) -> Self {
        let inflow = Inflow {
            left: [self.inflow.left[1].clone(), self.inflow.left[0].clone()],
            right: [self.inflow.right[1].clone(), self.inflow.right[0].clone()],
        };
        Self::new(
            [self.materials[1], self.materials[0]],
            self.length,
            self.n_cells,
            self.quadrature.clone(),
            inflow,
        )
        .expect("swapping labels keeps a valid problem valid")
    }
}

/// Exact rational used to store the catalog data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: i64,
    pub den: i64,
}

impl Ratio {
    pub const fn new(num: i64, den: i64) -> Self {
        Self { num, den }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn reduced(self) -> Self {
        let g = gcd(self.num.unsigned_abs(), self.den.unsigned_abs()).max(1) as i64;
        let s = if self.den < 0 { -1 } else { 1 };
        Self::new(s * self.num / g, s * self.den / g)
    }
}

impl std::ops::Mul for Ratio {
    type Output = Ratio;

    fn mul(self, rhs: Ratio) -> Ratio {
        Ratio::new(self.num * rhs.num, self.den * rhs.den).reduced()
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The twelve benchmark problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TestId {
    A1,
    A2,
    A3,
    B1,
    B2,
    B3,
    C1,
    C2,
    C3,
    D1,
    D2,
    D3,
}

impl TestId {
    pub const ALL: [TestId; 12] = [
        TestId::A1,
        TestId::A2,
        TestId::A3,
        TestId::B1,
        TestId::B2,
        TestId::B3,
        TestId::C1,
        TestId::C2,
        TestId::C3,
        TestId::D1,
        TestId::D2,
        TestId::D3,
    ];

    /// Exact catalog data for both materials.
    pub fn data(self) -> [CatalogMaterial; 2] {
        use TestId::*;
        // (sigma_t1, lambda_1, sigma_t2, lambda_2) per family
        let (st1, l1, st2, l2) = match self {
            A1 | A2 | A3 => (
                Ratio::new(10, 99),
                Ratio::new(99, 100),
                Ratio::new(100, 11),
                Ratio::new(11, 100),
            ),
            B1 | B2 | B3 => (
                Ratio::new(10, 99),
                Ratio::new(99, 10),
                Ratio::new(100, 11),
                Ratio::new(11, 10),
            ),
            C1 | C2 | C3 => (
                Ratio::new(2, 101),
                Ratio::new(101, 20),
                Ratio::new(200, 101),
                Ratio::new(101, 20),
            ),
            D1 | D2 | D3 => (
                Ratio::new(1, 99),
                Ratio::new(99, 100),
                Ratio::new(10, 11),
                Ratio::new(11, 10),
            ),
        };
        let (c1, c2) = match self {
            A1 | B1 | C1 | D1 => (Ratio::new(0, 1), Ratio::new(1, 1)),
            A2 | B2 | C2 | D2 => (Ratio::new(1, 1), Ratio::new(0, 1)),
            A3 | B3 | C3 | D3 => (Ratio::new(9, 10), Ratio::new(9, 10)),
        };
        let one = Ratio::new(1, 1);
        [
            CatalogMaterial { sigma_t: st1, scattering_ratio: c1, lambda: l1, q: one },
            CatalogMaterial { sigma_t: st2, scattering_ratio: c2, lambda: l2, q: one },
        ]
    }

    pub fn name(self) -> &'static str {
        use TestId::*;
        match self {
            A1 => "A1",
            A2 => "A2",
            A3 => "A3",
            B1 => "B1",
            B2 => "B2",
            B3 => "B3",
            C1 => "C1",
            C2 => "C2",
            C3 => "C3",
            D1 => "D1",
            D2 => "D2",
            D3 => "D3",
        }
    }
}

impl fmt::Display for TestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TestId::ALL
            .iter()
            .copied()
            .find(|t| t.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::invalid(format!("unknown test id '{s}' (expected A1..D3)")))
    }
}

/// One material row of the catalog in exact arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogMaterial {
    pub sigma_t: Ratio,
    pub scattering_ratio: Ratio,
    pub lambda: Ratio,
    pub q: Ratio,
}

impl CatalogMaterial {
    pub fn to_spec(self) -> MaterialSpec {
        MaterialSpec {
            sigma_t: self.sigma_t.to_f64(),
            sigma_s: (self.sigma_t * self.scattering_ratio).to_f64(),
            lambda: self.lambda.to_f64(),
            q: self.q.to_f64(),
        }
    }
}

pub const CATALOG_LENGTH: f64 = 100.0;
pub const DEFAULT_CELLS: usize = 100;
pub const DEFAULT_NODES_PER_HALF: usize = 2;

/// Catalog problem on `0 <= x <= 100` with vacuum faces.
pub fn build_test(id: TestId, n_cells: usize, n_per_half: usize) -> Result<ProblemSpec> {
    let [m1, m2] = id.data();
    let quadrature = AngularQuadrature::double_gauss_legendre(n_per_half)?;
    ProblemSpec::new(
        [m1.to_spec(), m2.to_spec()],
        CATALOG_LENGTH,
        n_cells,
        quadrature,
        Inflow::vacuum(n_per_half),
    )
}

/// Catalog problem with the default 100 cells and double S4 quadrature.
pub fn build_default_test(id: TestId) -> ProblemSpec {
    build_test(id, DEFAULT_CELLS, DEFAULT_NODES_PER_HALF).expect("catalog data is valid")
}
