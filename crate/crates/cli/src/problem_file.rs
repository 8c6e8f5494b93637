//! TOML problem files.
//!
//! ```toml
//! [material.1]
//! sigma_t = 0.101
//! sigma_s = 0.0
//! lambda = 0.99
//! q = 1.0
//!
//! [material.2]
//! sigma_t = 9.09
//! sigma_s = 9.09
//! lambda = 0.11
//! q = 1.0
//!
//! [slab]
//! length = 100.0
//! cells = 100
//!
//! # optional; omitted sides are vacuum
//! [boundary]
//! left_1 = [1.0, 1.0]   # incoming psi_1 at x = 0, one value per node mu_m > 0
//! right_2 = [0.5, 0.5]  # incoming psi_2 at x = X, one value per node
//! ```
//!
//! Unknown keys are rejected.

use std::path::Path;

use anyhow::{Context, Result};
use bsm_core::problem::Inflow;
use bsm_core::{AngularQuadrature, MaterialSpec, ProblemSpec};
use serde::Deserialize;

use crate::invalid;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    material: Materials,
    slab: Slab,
    #[serde(default)]
    boundary: Boundary,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Materials {
    #[serde(rename = "1")]
    first: MaterialEntry,
    #[serde(rename = "2")]
    second: MaterialEntry,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialEntry {
    sigma_t: f64,
    sigma_s: f64,
    lambda: f64,
    q: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Slab {
    length: f64,
    cells: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Boundary {
    left_1: Option<Vec<f64>>,
    left_2: Option<Vec<f64>>,
    right_1: Option<Vec<f64>>,
    right_2: Option<Vec<f64>>,
}

fn side(values: Option<Vec<f64>>, n: usize, key: &str) -> Result<Vec<f64>> {
    match values {
        None => Ok(vec![0.0; n]),
        Some(v) if v.len() == n => Ok(v),
        Some(v) => Err(invalid(format!("boundary.{key} has {} values, quadrature has {n} nodes per half", v.len()))),
    }
}

fn material(m: &MaterialEntry, which: usize) -> Result<MaterialSpec> {
    MaterialSpec::new(m.sigma_t, m.sigma_s, m.lambda, m.q).map_err(|e| invalid(format!("material.{which}: {e}")))
}

/// Parses problem-file text. `cells` overrides the file's cell count.
pub fn parse(text: &str, cells: Option<usize>, quad_order: usize) -> Result<ProblemSpec> {
    let file: ProblemFile = toml::from_str(text).map_err(|e| invalid(format!("problem file: {e}")))?;
    let quad = AngularQuadrature::double_gauss_legendre(quad_order)?;
    let n = quad.n_per_half();
    let b = file.boundary;
    let inflow = Inflow {
        left: [side(b.left_1, n, "left_1")?, side(b.left_2, n, "left_2")?],
        right: [side(b.right_1, n, "right_1")?, side(b.right_2, n, "right_2")?],
    };
    let materials = [material(&file.material.first, 1)?, material(&file.material.second, 2)?];
    Ok(ProblemSpec::new(materials, file.slab.length, cells.unwrap_or(file.slab.cells), quad, inflow)?)
}

pub fn load(path: &Path, cells: Option<usize>, quad_order: usize) -> Result<ProblemSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read problem file {}: {e}", path.display())))?;
    parse(&text, cells, quad_order).with_context(|| format!("in {}", path.display()))
}
