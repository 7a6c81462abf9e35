use crate::dependence::maximal_correlation;
use crate::math::log2;
use crate::prob::JointDistribution;
use crate::{Error, Result};

use super::perfect::PerfectPrivacy;
use super::structure::{biso_capacity, detect_biso};
use super::{check_epsilon, RatePrivacySolver, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

pub(crate) fn bounds_from(
    joint: &JointDistribution,
    g0: Option<&PerfectPrivacy>,
    eps: f64,
) -> Result<Bounds> {
    check_epsilon(eps)?;
    let mi = joint.mutual_information();
    if mi <= 1e-15 {
        return Err(Error::IndependentSources);
    }
    let hy = joint.entropy_y();
    if eps >= mi {
        return Ok(Bounds { lower: hy, upper: hy });
    }
    let mut lower = eps * hy / mi;
    if let Some(g0) = g0 {
        // chord from the certified perfect-privacy point to (I, H(Y))
        let i0 = g0.leakage;
        if i0 <= eps && i0 < mi {
            let l = (eps - i0) / (mi - i0);
            lower = lower.max(l * hy + (1.0 - l) * g0.value);
        }
    }
    let mut upper = (joint.conditional_entropy() + eps).min(hy);
    let reverse = joint.marginals().x_given_y;
    if joint.ny() == 2 && detect_biso(&reverse)? {
        let c = biso_capacity(&reverse);
        if c > 0.0 {
            upper = upper.min(hy - (mi - eps) / c);
        }
    }
    Ok(Bounds { lower, upper: upper.max(lower) })
}

/// Lower and upper bounds on `g_eps(X;Y)`.
///
/// The lower bound is the better of the straight line to `(I, H(Y))` and the
/// chord from the certified `g_0` point; the upper bound combines
/// `H(Y|X) + eps`, `H(Y)` and, for a BISO reverse channel, the capacity bound.
pub fn bounds_g(joint: &JointDistribution, eps: f64) -> Result<Bounds> {
    check_epsilon(eps)?;
    if joint.mutual_information() <= 1e-15 {
        return Err(Error::IndependentSources);
    }
    RatePrivacySolver::new(joint, &SolverConfig::default())?.bounds_g(eps)
}

pub(crate) fn bounds_hat_from(joint: &JointDistribution, eps: f64) -> Result<Bounds> {
    if !eps.is_finite() || !(0.0..=1.0).contains(&eps) {
        return Err(Error::EpsilonOutOfRange { epsilon: eps, max: 1.0 });
    }
    let hy = joint.entropy_y();
    let r = maximal_correlation(joint);
    let rho2 = r * r;
    if rho2 <= 1e-15 || eps >= rho2 {
        return Ok(Bounds { lower: hy, upper: hy });
    }
    let lower = eps * hy / rho2;
    let k = (joint.nx() - 1) as f64;
    let upper = (log2(k * eps + 1.0) + joint.conditional_entropy()).min(hy);
    Ok(Bounds { lower, upper })
}

/// Lower and upper bounds on `g_hat_eps(X;Y)`.
pub fn bounds_g_hat(joint: &JointDistribution, eps: f64) -> Result<Bounds> {
    bounds_hat_from(joint, eps)
}
