//! Dense two-phase simplex for `min c^T x  s.t.  A x = b, x >= 0`.
//!
//! Sized for the perfect-privacy vertex LP: tens of rows, up to a few
//! thousand columns. Bland's rule prevents cycling.

use alloc::vec;
use alloc::vec::Vec;

const PIVOT_TOL: f64 = 1e-11;
const MAX_PIVOTS: usize = 50_000;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
    IterationLimit,
}

struct Tableau {
    // rows: constraints, last column is the rhs
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (v, &pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Minimize `cost` over the current basis. `allowed[j]` gates entering columns.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> Option<bool> {
        for _ in 0..MAX_PIVOTS {
            // reduced costs
            let mut entering = None;
            for j in 0..self.ncols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut rc = cost[j];
                for (i, &b) in self.basis.iter().enumerate() {
                    rc -= cost[b] * self.t[i][j];
                }
                if rc < -1e-12 {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else { return Some(true) };
            let rhs = self.ncols;
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.t.len() {
                let a = self.t[i][col];
                if a > PIVOT_TOL {
                    let ratio = self.t[i][rhs] / a;
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-14
                                || (ratio <= lr + 1e-14 && self.basis[i] < self.basis[li])
                            {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((row, _)) = leave else { return Some(false) };
            self.pivot(row, col);
        }
        None
    }
}

/// Solve `min c^T x` subject to `A x = b`, `x >= 0`.
pub fn solve_lp(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> LpOutcome {
    let m = b.len();
    let n = c.len();
    let total = n + m;
    let mut t = Vec::with_capacity(m);
    for (row, &bi) in a.iter().zip(b) {
        let sign = if bi < 0.0 { -1.0 } else { 1.0 };
        let mut r = vec![0.0; total + 1];
        for (j, &v) in row.iter().enumerate() {
            r[j] = sign * v;
        }
        r[total] = sign * bi;
        t.push(r);
    }
    for (i, r) in t.iter_mut().enumerate() {
        r[n + i] = 1.0;
    }
    let mut tab = Tableau { t, basis: (n..total).collect(), ncols: total };

    // phase 1: drive the artificials out
    let mut cost1 = vec![0.0; total];
    for c1 in cost1.iter_mut().skip(n) {
        *c1 = 1.0;
    }
    let all = vec![true; total];
    match tab.optimize(&cost1, &all) {
        None => return LpOutcome::IterationLimit,
        Some(false) => return LpOutcome::Unbounded,
        Some(true) => {}
    }
    let infeas: f64 = tab
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &bj)| bj >= n)
        .map(|(i, _)| tab.t[i][total])
        .sum();
    let scale = 1.0 + b.iter().map(|v| v.abs()).sum::<f64>();
    if infeas > 1e-9 * scale {
        return LpOutcome::Infeasible;
    }
    // pivot remaining zero-level artificials out, dropping redundant rows
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| tab.t[i][j].abs() > PIVOT_TOL) {
                tab.pivot(i, j);
                i += 1;
            } else {
                tab.t.remove(i);
                tab.basis.remove(i);
            }
        } else {
            i += 1;
        }
    }

    // phase 2
    let mut cost2 = vec![0.0; total];
    cost2[..n].copy_from_slice(c);
    let mut allowed = vec![true; total];
    for a in allowed.iter_mut().skip(n) {
        *a = false;
    }
    match tab.optimize(&cost2, &allowed) {
        None => LpOutcome::IterationLimit,
        Some(false) => LpOutcome::Unbounded,
        Some(true) => {
            let mut x = vec![0.0; n];
            for (i, &bj) in tab.basis.iter().enumerate() {
                if bj < n {
                    x[bj] = tab.t[i][total].max(0.0);
                }
            }
            let objective = x.iter().zip(c).map(|(a, b)| a * b).sum();
            LpOutcome::Optimal { x, objective }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lp() {
        // min -x - y  s.t. x + s1 = 2, y + s2 = 3
        let a = vec![vec![1.0, 0.0, 1.0, 0.0], vec![0.0, 1.0, 0.0, 1.0]];
        match solve_lp(&a, &[2.0, 3.0], &[-1.0, -1.0, 0.0, 0.0]) {
            LpOutcome::Optimal { x, objective } => {
                assert!((objective + 5.0).abs() < 1e-12);
                assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] - 3.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn redundant_rows_and_infeasibility() {
        // x + y = 1 twice, min x
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        match solve_lp(&a, &[1.0, 1.0], &[1.0, 0.0]) {
            LpOutcome::Optimal { x, objective } => {
                assert!(objective.abs() < 1e-12);
                assert!((x[1] - 1.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(solve_lp(&[vec![1.0, 1.0]], &[-1.0], &[0.0, 0.0]), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded() {
        // min -x s.t. x - y = 0
        assert_eq!(solve_lp(&[vec![1.0, -1.0]], &[0.0], &[-1.0, 0.0]), LpOutcome::Unbounded);
    }
}
