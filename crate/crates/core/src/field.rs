//! Linear discontinuous scalar fields stored as nodal pairs.

use std::ops::{Index, IndexMut};

/// Left node of a cell.
pub const LEFT: usize = 0;
/// Right node of a cell.
pub const RIGHT: usize = 1;

/// Piecewise-linear, cell-wise discontinuous field: `[left, right]` nodal
/// values for every cell.
#[derive(Debug, Clone, PartialEq)]
pub struct LdField {
    nodes: Vec<[f64; 2]>,
}

impl LdField {
    pub fn zeros(n_cells: usize) -> Self {
        Self { nodes: vec![[0.0; 2]; n_cells] }
    }

    pub fn constant(n_cells: usize, value: f64) -> Self {
        Self { nodes: vec![[value; 2]; n_cells] }
    }

    pub fn from_nodes(nodes: Vec<[f64; 2]>) -> Self {
        Self { nodes }
    }

    pub fn n_cells(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn average(&self, cell: usize) -> f64 {
        let [l, r] = self.nodes[cell];
        0.5 * (l + r)
    }

    /// LD slope moment: half the right-left difference.
    pub fn slope(&self, cell: usize) -> f64 {
        let [l, r] = self.nodes[cell];
        0.5 * (r - l)
    }

    pub fn cell_averages(&self) -> Vec<f64> {
        (0..self.n_cells()).map(|i| self.average(i)).collect()
    }

    /// Pointwise map over nodal values.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            nodes: self.nodes.iter().map(|&[l, r]| [f(l), f(r)]).collect(),
        }
    }

    /// Pointwise combination of two fields on the same mesh.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.n_cells(), other.n_cells());
        Self {
            nodes: self
                .nodes
                .iter()
                .zip(&other.nodes)
                .map(|(a, b)| [f(a[0], b[0]), f(a[1], b[1])])
                .collect(),
        }
    }

    pub fn iter_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().flat_map(|n| n.iter().copied())
    }

    pub fn is_finite(&self) -> bool {
        self.iter_values().all(f64::is_finite)
    }

    pub fn max_abs(&self) -> f64 {
        self.iter_values().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Index<usize> for LdField {
    type Output = [f64; 2];

    fn index(&self, cell: usize) -> &[f64; 2] {
        &self.nodes[cell]
    }
}

impl IndexMut<usize> for LdField {
    fn index_mut(&mut self, cell: usize) -> &mut [f64; 2] {
        &mut self.nodes[cell]
    }
}

/// Infinity norm of the difference of two equally sized slices.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn average_and_slope() {
        let f = LdField::from_nodes(vec![[1.0, 3.0], [4.0, 2.0]]);
        assert_eq!(f.average(0), 2.0);
        assert_eq!(f.slope(0), 1.0);
        assert_eq!(f.slope(1), -1.0);
        assert_eq!(f.cell_averages(), vec![2.0, 3.0]);
        assert_eq!(f.max_abs(), 4.0);
    }
}
