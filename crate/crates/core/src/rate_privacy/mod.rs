//! Rate-privacy functions over finite alphabets.
//!
//! `g_eps(X;Y)` is the largest `I(Y;Z)` over filters `P_{Z|Y}` with
//! `I(X;Z) <= eps`; `g_hat_eps(X;Y)` replaces the constraint with
//! `rho_m^2(X;Z) <= eps`. Solver output is always a certified lower bound:
//! the returned filter is audited feasible and its `I(Y;Z)` is the value.

mod bounds;
mod curve;
mod perfect;
mod solver;
mod structure;

use alloc::vec::Vec;

use crate::prob::{Channel, JointDistribution};
use crate::{Error, Result};

pub use bounds::{bounds_g, bounds_g_hat, Bounds};
pub use curve::{curve_g, curve_g_in, dilution_outer, funnel_dual, funnel_dual_in, FunnelResult};
pub use perfect::{g0, G0Method, PerfectPrivacy};
pub use solver::{solve_g, solve_g_hat, RatePrivacySolver};
pub use structure::{
    closed_form, detect_biso, detect_erasure, linearity_test, mirrored_divergence_ratio,
    slope_bound_at_zero, ClosedForm, ClosedFormKind, Linearity, LinearityReport, Slope,
    SlopeBound,
};

/// Which leakage measure bounds the filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrivacyMeasure {
    /// `I(X;Z) <= eps`, in bits.
    MutualInformation,
    /// `rho_m^2(X;Z) <= eps`.
    MaximalCorrelation,
}

/// One solved point of a rate-privacy function together with its certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct RatePrivacyPoint {
    pub epsilon: f64,
    pub lower: f64,
    /// `I(Y;Z)` of `filter`, a lower bound on the true function value.
    pub value: f64,
    pub upper: f64,
    pub filter: Channel,
    /// Audited `I(X;Z)` (or `rho_m^2(X;Z)`) of `filter`.
    pub achieved_leakage: f64,
    pub measure: PrivacyMeasure,
}

/// Knobs of the multi-start penalty solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Number of ascent starts, construction seeds included.
    pub restarts: usize,
    /// Filter output alphabet size; `None` means `|Y| + 1`.
    pub z_cardinality: Option<usize>,
    /// Projected-gradient iterations per start, split evenly over the penalty stages.
    pub max_iters: usize,
    pub penalty_start: f64,
    pub penalty_growth: f64,
    pub penalty_stages: usize,
    pub master_seed: u64,
    /// Stop a stage once the penalized objective improves by less than this.
    pub tolerance: f64,
    /// Leakage standing in for zero on the numeric perfect-privacy path.
    pub g0_tolerance: f64,
    /// Add a regular grid of posteriors to the mixing stage for `|Y| <= 4`.
    pub posterior_grid: bool,
    /// Singular-value threshold of the weak-independence rank test.
    pub rank_threshold: f64,
    /// Cap on the support sets examined by the exact perfect-privacy LP.
    pub max_vertex_subsets: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            restarts: 50,
            z_cardinality: None,
            max_iters: 300,
            penalty_start: 10.0,
            penalty_growth: 10.0,
            penalty_stages: 6,
            master_seed: 0,
            tolerance: 1e-12,
            g0_tolerance: 1e-6,
            posterior_grid: true,
            rank_threshold: crate::dependence::RANK_THRESHOLD,
            max_vertex_subsets: 20_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.restarts < 1 {
            return bad("restarts must be at least 1");
        }
        if matches!(self.z_cardinality, Some(n) if n < 2) {
            return bad("z_cardinality must be at least 2");
        }
        if self.penalty_stages < 1 || self.max_iters < 1 {
            return bad("max_iters and penalty_stages must be positive");
        }
        if !(self.penalty_start > 0.0 && self.penalty_growth >= 1.0) {
            return bad("penalty schedule must be positive and non-decreasing");
        }
        if !(self.g0_tolerance > 0.0 && self.tolerance >= 0.0 && self.rank_threshold > 0.0) {
            return bad("tolerances must be positive");
        }
        Ok(())
    }
}

pub(crate) fn check_epsilon(eps: f64) -> Result<()> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(Error::EpsilonOutOfRange { epsilon: eps, max: f64::INFINITY });
    }
    Ok(())
}

pub(crate) fn z_labels(n: usize) -> Vec<alloc::string::String> {
    (0..n).map(|i| alloc::format!("z{i}")).collect()
}

pub(crate) fn uniform_y(joint: &JointDistribution) -> bool {
    let py = joint.py();
    py.iter().all(|&p| (p - 1.0 / py.len() as f64).abs() <= 1e-9)
}
