//! Explicit privacy filters `P_{Z|Y}` and the leakage auditor.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dependence::maximal_correlation;
use crate::math::{binary_convolution, binary_entropy, bisect_increasing};
use crate::prob::{erasure_label, push_joint, Channel, JointDistribution};
use crate::{Error, Result};

/// Slack allowed when comparing an audited leakage against its threshold.
pub const FEASIBILITY_SLACK: f64 = 1e-9;

/// Leakage of a filter applied to `Y`, with feasibility against two thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct LeakageReport {
    /// `I(X;Z)` in bits.
    pub i_xz: f64,
    /// `I(Y;Z)` in bits.
    pub i_yz: f64,
    /// `rho_m^2(X;Z)`.
    pub rho2_xz: f64,
    pub feasible_mi: bool,
    pub feasible_mc: bool,
}

/// Exact `I(X;Z)`, `I(Y;Z)` and `rho_m^2(X;Z)` of `filter`, and whether they
/// meet `I(X;Z) <= eps_mi` and `rho_m^2(X;Z) <= eps_mc`.
pub fn audit_filter(
    joint: &JointDistribution,
    filter: &Channel,
    eps_mi: f64,
    eps_mc: f64,
) -> Result<LeakageReport> {
    let (xz, yz) = push_joint(joint, filter)?;
    let i_xz = xz.mutual_information();
    let i_yz = yz.mutual_information();
    let r = maximal_correlation(&xz);
    let rho2_xz = r * r;
    Ok(LeakageReport {
        i_xz,
        i_yz,
        rho2_xz,
        feasible_mi: i_xz <= eps_mi + FEASIBILITY_SLACK,
        feasible_mc: rho2_xz <= eps_mc + FEASIBILITY_SLACK,
    })
}

fn check_epsilon(eps: f64, max: f64) -> Result<f64> {
    if !eps.is_finite() || eps < 0.0 || eps > max * (1.0 + 1e-12) + 1e-15 {
        return Err(Error::EpsilonOutOfRange { epsilon: eps, max });
    }
    Ok(eps.min(max))
}

/// Erasure filter `Y -> Y ∪ {e}` with erasure probability `1 - eps / I(X;Y)`.
///
/// Leaks exactly `eps` about `X` and releases `eps H(Y) / I(X;Y)` about `Y`.
pub fn erasure_filter(joint: &JointDistribution, eps: f64) -> Result<Channel> {
    let mi = joint.mutual_information();
    if mi <= 1e-15 {
        return Err(Error::IndependentSources);
    }
    let eps = check_epsilon(eps, mi)?;
    Channel::erasure(joint.y_labels(), 1.0 - eps / mi)
}

/// Post-compose `filter` with an erasure: emit `e` w.p. `delta`, else pass the
/// original output through. Scales `I(Y;Z)`, `I(X;Z)` and `rho_m^2(X;Z)` by
/// `1 - delta`.
pub fn erasure_wrapper(filter: &Channel, delta: f64) -> Result<Channel> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    let mut out = filter.out_labels().to_vec();
    out.push(erasure_label(filter.out_labels()));
    let rows = filter
        .rows()
        .iter()
        .map(|r| {
            let mut row: Vec<f64> = r.iter().map(|&v| (1.0 - delta) * v).collect();
            row.push(delta);
            row
        })
        .collect();
    Ok(Channel::from_parts_unchecked(filter.in_labels().to_vec(), out, rows))
}

/// Probe filter `Y -> {k, e}` that reveals `Y = k` with probability `delta`
/// and erases everything else.
pub fn singleton_probe_filter(joint: &JointDistribution, k: &str, delta: f64) -> Result<Channel> {
    let idx = joint
        .y_labels()
        .iter()
        .position(|l| l == k)
        .ok_or_else(|| Error::UnknownSymbol(String::from(k)))?;
    probe_filter_at(joint.y_labels(), idx, delta)
}

pub(crate) fn probe_filter_at(y_labels: &[String], k: usize, delta: f64) -> Result<Channel> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    let out = vec![y_labels[k].clone(), erasure_label(y_labels)];
    let rows = (0..y_labels.len())
        .map(|y| if y == k { vec![delta, 1.0 - delta] } else { vec![0.0, 1.0] })
        .collect();
    Ok(Channel::from_parts_unchecked(y_labels.to_vec(), out, rows))
}

/// `I(X;Z)` of the BSC(`alpha`) filter on a BEC(`delta`) observation of `X ~ Ber(p)`.
pub fn bec_bsc_leakage(alpha: f64, delta: f64, p: f64) -> f64 {
    let h = |a: f64| binary_entropy(a.clamp(0.0, 1.0)).unwrap_or(0.0);
    (1.0 - delta) * (h(binary_convolution(alpha, p)) - h(alpha))
}

/// Crossover `alpha` in `[0, 1/2]` of the optimal filter for a BEC(`delta`)
/// observation of `X ~ Ber(p)`: the unique root of
/// `(1 - delta) [h_b(alpha * p) - h_b(alpha)] = eps`.
pub fn bec_bsc_filter_alpha(eps: f64, delta: f64, p: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    if !(p > 0.0 && p <= 0.5) {
        return Err(Error::OutOfRange { what: "p", value: p });
    }
    let max = (1.0 - delta) * binary_entropy(p)?;
    let eps = check_epsilon(eps, max)?;
    if eps == 0.0 {
        return Ok(0.5);
    }
    // leakage is decreasing in alpha, so eps - leakage is increasing
    Ok(bisect_increasing(|a| eps - bec_bsc_leakage(a, delta, p), 0.0, 0.5, 1e-15, 200))
}

/// The assembled filter on `{0, 1, e}`: BSC(`alpha`) on the unerased symbols,
/// identity on `e`.
pub fn bec_bsc_filter(eps: f64, delta: f64, p: f64) -> Result<Channel> {
    let a = bec_bsc_filter_alpha(eps, delta, p)?;
    let labels: Vec<String> = ["0", "1", "e"].iter().map(|s| String::from(*s)).collect();
    Channel::new(
        labels.clone(),
        labels,
        vec![vec![1.0 - a, a, 0.0], vec![a, 1.0 - a, 0.0], vec![0.0, 0.0, 1.0]],
    )
}
