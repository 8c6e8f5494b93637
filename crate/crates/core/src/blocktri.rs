//! Direct solver for block-tridiagonal systems with small dense blocks.
//!
//! Row `i` reads `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`;
//! `lower[0]` and `upper[n-1]` are ignored.

use crate::error::{Error, Result};

pub type Block<const B: usize> = [[f64; B]; B];

#[derive(Debug, Clone)]
pub struct BlockTridiagonal<const B: usize> {
    pub lower: Vec<Block<B>>,
    pub diag: Vec<Block<B>>,
    pub upper: Vec<Block<B>>,
    pub rhs: Vec<[f64; B]>,
}

impl<const B: usize> BlockTridiagonal<B> {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![[[0.0; B]; B]; n],
            diag: vec![[[0.0; B]; B]; n],
            upper: vec![[[0.0; B]; B]; n],
            rhs: vec![[0.0; B]; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Block Thomas elimination. `system` names the solver in errors.
    pub fn solve(&self, system: &'static str) -> Result<Vec<[f64; B]>> {
        let n = self.len();
        let mut g_mat: Vec<Block<B>> = vec![[[0.0; B]; B]; n];
        let mut g_vec: Vec<[f64; B]> = vec![[0.0; B]; n];
        for i in 0..n {
            let mut m = self.diag[i];
            let mut r = self.rhs[i];
            if i > 0 {
                let a = &self.lower[i];
                let gm = &g_mat[i - 1];
                let gv = &g_vec[i - 1];
                for row in 0..B {
                    for k in 0..B {
                        let aik = a[row][k];
                        if aik == 0.0 {
                            continue;
                        }
                        r[row] -= aik * gv[k];
                        for col in 0..B {
                            m[row][col] -= aik * gm[k][col];
                        }
                    }
                }
            }
            let lu = Lu::factor(m).ok_or(Error::SingularBlock { system, cell: i })?;
            g_vec[i] = lu.solve(r);
            if i + 1 < n {
                let c = &self.upper[i];
                for col in 0..B {
                    let column: [f64; B] = std::array::from_fn(|row| c[row][col]);
                    let sol = lu.solve(column);
                    for row in 0..B {
                        g_mat[i][row][col] = sol[row];
                    }
                }
            }
        }
        let mut x = g_vec;
        for i in (0..n.saturating_sub(1)).rev() {
            let next = x[i + 1];
            for row in 0..B {
                let corr: f64 = (0..B).map(|k| g_mat[i][row][k] * next[k]).sum();
                x[i][row] -= corr;
            }
        }
        if x.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NumericalFailure(format!("{system} solve produced non-finite values")));
        }
        Ok(x)
    }

    /// Max-norm of `A x - rhs`.
    pub fn residual(&self, x: &[[f64; B]]) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for row in 0..B {
                let mut s = -self.rhs[i][row];
                for k in 0..B {
                    s += self.diag[i][row][k] * x[i][k];
                    if i > 0 {
                        s += self.lower[i][row][k] * x[i - 1][k];
                    }
                    if i + 1 < n {
                        s += self.upper[i][row][k] * x[i + 1][k];
                    }
                }
                worst = worst.max(s.abs());
            }
        }
        worst
    }
}

/// LU factorization with partial pivoting of one block.
struct Lu<const B: usize> {
    a: Block<B>,
    perm: [usize; B],
}

impl<const B: usize> Lu<B> {
    fn factor(mut a: Block<B>) -> Option<Self> {
        let mut perm: [usize; B] = std::array::from_fn(|i| i);
        let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 || !scale.is_finite() {
            return None;
        }
        for k in 0..B {
            let p = (k..B).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
            if a[p][k].abs() <= 1e-14 * scale {
                return None;
            }
            a.swap(k, p);
            perm.swap(k, p);
            for i in k + 1..B {
                let f = a[i][k] / a[k][k];
                a[i][k] = f;
                for j in k + 1..B {
                    a[i][j] -= f * a[k][j];
                }
            }
        }
        Some(Self { a, perm })
    }

    fn solve(&self, b: [f64; B]) -> [f64; B] {
        let mut y: [f64; B] = std::array::from_fn(|i| b[self.perm[i]]);
        for i in 0..B {
            for j in 0..i {
                y[i] -= self.a[i][j] * y[j];
            }
        }
        for i in (0..B).rev() {
            for j in i + 1..B {
                y[i] -= self.a[i][j] * y[j];
            }
            y[i] /= self.a[i][i];
        }
        y
    }
}
