use alloc::vec::Vec;

use crate::exec::{ParallelMap, Sequential};
use crate::prob::JointDistribution;
use crate::{Error, Result};

use super::{RatePrivacyPoint, RatePrivacySolver, SolverConfig};

const FUNNEL_TOL: f64 = 1e-4;

/// Solve `g_eps` along a sorted grid, warm-starting each point from the
/// previous certificate. Reported values are made non-decreasing by carrying
/// a better earlier certificate forward, which stays feasible for larger `eps`.
pub fn curve_g(joint: &JointDistribution, grid: &[f64], cfg: &SolverConfig) -> Result<Vec<RatePrivacyPoint>> {
    curve_g_in(&RatePrivacySolver::new(joint, cfg)?, grid, &Sequential)
}

pub fn curve_g_in<P: ParallelMap>(
    solver: &RatePrivacySolver,
    grid: &[f64],
    exec: &P,
) -> Result<Vec<RatePrivacyPoint>> {
    let mi = solver.joint().mutual_information();
    for (i, &e) in grid.iter().enumerate() {
        if !e.is_finite() || e < 0.0 || e > mi * (1.0 + 1e-9) + 1e-12 {
            return Err(Error::EpsilonOutOfRange { epsilon: e, max: mi });
        }
        if i > 0 && e < grid[i - 1] {
            return Err(Error::InvalidConfig("epsilon grid must be sorted".into()));
        }
    }
    let mut out: Vec<RatePrivacyPoint> = Vec::with_capacity(grid.len());
    for &eps in grid {
        let warm = out.last().map(|p| &p.filter);
        let mut p = solver.solve_g_in(eps, warm, exec)?;
        if let Some(prev) = out.last() {
            if prev.value > p.value {
                p.value = prev.value;
                p.filter = prev.filter.clone();
                p.achieved_leakage = prev.achieved_leakage;
            }
        }
        out.push(p);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunnelResult {
    /// Smallest leakage found that releases at least `rate` bits; an upper
    /// bound on the privacy-funnel value `t_R`.
    pub t_r: f64,
    pub rate: f64,
    pub point: RatePrivacyPoint,
}

/// Privacy funnel `t_R = min I(X;Z)` subject to `I(Y;Z) >= R`, by bisection on
/// `eps` over the certified solver values.
pub fn funnel_dual(joint: &JointDistribution, rate: f64, cfg: &SolverConfig) -> Result<FunnelResult> {
    funnel_dual_in(&RatePrivacySolver::new(joint, cfg)?, rate, &Sequential)
}

pub fn funnel_dual_in<P: ParallelMap>(
    solver: &RatePrivacySolver,
    rate: f64,
    exec: &P,
) -> Result<FunnelResult> {
    let joint = solver.joint();
    let hy = joint.entropy_y();
    if !rate.is_finite() || rate < 0.0 {
        return Err(Error::OutOfRange { what: "rate", value: rate });
    }
    if rate > hy + 1e-12 {
        return Err(Error::RateUnachievable { rate, max: hy });
    }
    let mi = joint.mutual_information();
    let g0 = solver.g0();
    if rate <= 0.0 || mi <= 1e-15 || (g0.value >= rate && g0.leakage <= 1e-12) {
        let point = solver.solve_g_in(0.0, None, exec)?;
        return Ok(FunnelResult { t_r: 0.0, rate, point });
    }
    let (mut lo, mut hi) = (0.0, mi);
    let mut best = solver.solve_g_in(mi, None, exec)?;
    while hi - lo > FUNNEL_TOL {
        let mid = 0.5 * (lo + hi);
        let p = solver.solve_g_in(mid, Some(&best.filter), exec)?;
        if p.value >= rate {
            hi = mid;
            best = p;
        } else {
            lo = mid;
        }
    }
    Ok(FunnelResult { t_r: hi, rate, point: best })
}

/// Privacy corner of the dependence-dilution outer bound: the least masking
/// leakage compatible with amplification `delta_a` about `Y`, which is `t_{delta_a}`.
pub fn dilution_outer(joint: &JointDistribution, delta_a: f64, cfg: &SolverConfig) -> Result<FunnelResult> {
    funnel_dual(joint, delta_a, cfg)
}
