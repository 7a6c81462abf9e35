use alloc::vec;
use alloc::vec::Vec;

use crate::dependence::weak_independence_with;
use crate::exec::ParallelMap;
use crate::filters::audit_filter;
use crate::linalg::{rank, solve_square};
use crate::prob::{Channel, JointDistribution};
use crate::Result;

use super::solver::{Problem, RatePrivacySolver};
use super::structure::erasure_layout;
use super::SolverConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum G0Method {
    /// `X` and `Y` are independent; the identity filter is private.
    Independent,
    /// The rows of `P_{X|Y}` are independent, so `g_0 = 0`.
    NotWeaklyIndependent,
    /// Erasure observation channel: mix all unerased symbols uniformly.
    Erasure,
    /// Exact linear program over the vertices of the private-posterior polytope.
    VertexLp,
    /// Numeric solve at a tiny leakage budget (vertex enumeration too large).
    Numeric,
}

/// Largest `I(Y;Z)` with `Z` independent of `X`, with its certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct PerfectPrivacy {
    pub value: f64,
    pub filter: Channel,
    /// Audited `I(X;Z)` of `filter`; zero up to rounding except on the numeric path.
    pub leakage: f64,
    pub method: G0Method,
}

/// Perfect-privacy rate `g_0(X;Y)`.
pub fn g0(joint: &JointDistribution, cfg: &SolverConfig) -> Result<PerfectPrivacy> {
    Ok(RatePrivacySolver::new(joint, cfg)?.g0().clone())
}

pub(crate) fn compute<P: ParallelMap>(s: &RatePrivacySolver, exec: &P) -> Result<PerfectPrivacy> {
    let joint = s.joint();
    let cfg = s.config();
    let p = s.problem();
    let y = joint.y_labels();
    let (filter, method) = if p.mi <= 1e-15 {
        (Channel::identity(y), G0Method::Independent)
    } else if !weak_independence_with(joint, cfg.rank_threshold).weakly_independent {
        (Channel::constant(y, "z0"), G0Method::NotWeaklyIndependent)
    } else if let Some((_, Some(e), hits)) = erasure_layout(&joint.marginals().y_given_x) {
        let m = hits.len() as f64;
        let rows = (0..p.ny)
            .map(|col| {
                if col == e {
                    let mut r = vec![0.0; p.ny];
                    r[e] = 1.0;
                    r
                } else {
                    (0..p.ny).map(|z| if hits.contains(&z) { 1.0 / m } else { 0.0 }).collect()
                }
            })
            .collect();
        (Channel::new(y.to_vec(), y.to_vec(), rows)?, G0Method::Erasure)
    } else if let Some(verts) = vertices(p, cfg) {
        let cols: Vec<_> = verts
            .into_iter()
            .map(|q| {
                let mut c = p.column(q);
                c.dx = 0.0;
                c
            })
            .collect();
        match p.mix(&cols, 0.0) {
            Some(mix) => {
                let (w, nz) = p.filter_from_mixture(&cols, &mix);
                (p.channel(y, &w, nz)?, G0Method::VertexLp)
            }
            None => (Channel::constant(y, "z0"), G0Method::VertexLp),
        }
    } else {
        match s.optimize_mi(cfg.g0_tolerance, None, exec) {
            Some((w, nz)) => (p.channel(y, &w, nz)?, G0Method::Numeric),
            None => (Channel::constant(y, "z0"), G0Method::Numeric),
        }
    };
    let r = audit_filter(joint, &filter, 0.0, 0.0)?;
    Ok(PerfectPrivacy { value: r.i_yz, filter, leakage: r.i_xz, method })
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    let mut c: usize = 1;
    for i in 0..k {
        c = c.saturating_mul(n - i) / (i + 1);
    }
    c
}

/// Vertices of `{q in simplex(Y) : sum_y q(y) P_{X|Y}(.|y) = P_X}`, or `None`
/// when there are too many candidate supports to enumerate.
fn vertices(p: &Problem, cfg: &SolverConfig) -> Option<Vec<Vec<f64>>> {
    let m: Vec<Vec<f64>> = (0..p.nx).map(|x| (0..p.ny).map(|y| p.x_given_y[y][x]).collect()).collect();
    let r = rank(&m, cfg.rank_threshold);
    if r == 0 || binomial(p.ny, r) > cfg.max_vertex_subsets {
        return None;
    }
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        if let Some(q) = basic_solution(p, &m, &idx) {
            let dup = out
                .iter()
                .any(|v| v.iter().zip(&q).all(|(a, b)| (a - b).abs() < 1e-10));
            if !dup {
                out.push(q);
            }
        }
        // next combination in lexicographic order
        let mut i = r;
        loop {
            if i == 0 {
                return Some(out);
            }
            i -= 1;
            if idx[i] < p.ny - r + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn basic_solution(p: &Problem, m: &[Vec<f64>], support: &[usize]) -> Option<Vec<f64>> {
    let r = support.len();
    let mut n = vec![vec![0.0; r]; r];
    let mut rhs = vec![0.0; r];
    for (a, &i) in support.iter().enumerate() {
        for (b, &j) in support.iter().enumerate() {
            n[a][b] = (0..p.nx).map(|x| m[x][i] * m[x][j]).sum();
        }
        rhs[a] = (0..p.nx).map(|x| m[x][i] * p.px[x]).sum();
    }
    let sol = solve_square(&n, &rhs)?;
    if sol.iter().any(|&v| v < -1e-10) {
        return None;
    }
    let mut q = vec![0.0; p.ny];
    for (&i, &v) in support.iter().zip(&sol) {
        q[i] = v.max(0.0);
    }
    let resid = (0..p.nx)
        .map(|x| ((0..p.ny).map(|y| m[x][y] * q[y]).sum::<f64>() - p.px[x]).abs())
        .fold(0.0, f64::max);
    if resid > 1e-9 {
        return None;
    }
    let s: f64 = q.iter().sum();
    Some(q.into_iter().map(|v| v / s).collect())
}
