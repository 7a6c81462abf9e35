//! Dense linear algebra for small matrices: one-sided Jacobi SVD, rank,
//! null spaces, a least-squares solve and a two-phase simplex LP.

mod simplex;

pub use simplex::{solve_lp, LpOutcome};

use alloc::vec;
use alloc::vec::Vec;

use crate::math::sqrt;

/// Singular value decomposition `A = U diag(s) V^T` of an `m x n` matrix.
///
/// Columns are sorted by descending singular value. `v` always holds a full
/// orthonormal basis of `R^n`, so the trailing columns of `v` span the null
/// space; `u` columns belonging to zero singular values are zero.
#[derive(Debug, Clone)]
pub struct Svd {
    pub s: Vec<f64>,
    /// Left singular vectors, one `Vec` of length `m` per column.
    pub u: Vec<Vec<f64>>,
    /// Right singular vectors, one `Vec` of length `n` per column.
    pub v: Vec<Vec<f64>>,
}

const MAX_SWEEPS: usize = 80;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rotate(a: &mut [f64], b: &mut [f64], c: f64, s: f64) {
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let (p, q) = (*x, *y);
        *x = c * p - s * q;
        *y = s * p + c * q;
    }
}

/// One-sided Jacobi SVD of a row-major `m x n` matrix.
pub fn svd(a: &[Vec<f64>]) -> Svd {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    // work on columns
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.iter().map(|r| r[j]).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let eps = f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= eps * sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + sqrt(1.0 + zeta * zeta));
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = c * t;
                let (lo, hi) = cols.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], c, s);
                let (lo, hi) = v.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = cols.iter().map(|c| sqrt(dot(c, c))).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    let s: Vec<f64> = order.iter().map(|&i| norms[i]).collect();
    let u = order
        .iter()
        .map(|&i| {
            if norms[i] > 0.0 {
                cols[i].iter().map(|x| x / norms[i]).collect()
            } else {
                vec![0.0; m]
            }
        })
        .collect();
    let v = order.iter().map(|&i| v[i].clone()).collect();
    Svd { s, u, v }
}

/// Numerical rank: singular values strictly above `threshold`.
pub fn rank(a: &[Vec<f64>], threshold: f64) -> usize {
    svd(a).s.iter().filter(|&&s| s > threshold).count()
}

/// Orthonormal basis of `{w : A w = 0}` (singular values `<= threshold`).
pub fn null_space(a: &[Vec<f64>], threshold: f64) -> Vec<Vec<f64>> {
    let d = svd(a);
    d.s.iter()
        .zip(d.v)
        .filter(|(&s, _)| s <= threshold)
        .map(|(_, v)| v)
        .collect()
}

/// Solve the square system `A x = b` by Gaussian elimination with partial
/// pivoting; `None` if a pivot falls below `1e-13` times the largest entry.
pub fn solve_square(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(r, &bi)| {
            let mut row = r.clone();
            row.push(bi);
            row
        })
        .collect();
    let scale = a.iter().flatten().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if scale == 0.0 {
        return None;
    }
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))?;
        if m[piv][k].abs() <= 1e-13 * scale {
            return None;
        }
        m.swap(k, piv);
        for i in (k + 1)..n {
            let f = m[i][k] / m[k][k];
            if f != 0.0 {
                for j in k..=n {
                    m[i][j] -= f * m[k][j];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = ((k + 1)..n).map(|j| m[k][j] * x[j]).sum();
        x[k] = (m[k][n] - s) / m[k][k];
    }
    Some(x)
}
