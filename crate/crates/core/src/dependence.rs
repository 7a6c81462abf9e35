//! Dependence measures beyond mutual information.
//!
//! Maximal correlation is computed spectrally: it is the second singular
//! value of `B[x, y] = P(x, y) / sqrt(P(x) P(y))`, whose top singular value
//! is always 1 (constant functions).

use alloc::vec::Vec;

use crate::linalg::svd;
use crate::math::sqrt;
use crate::prob::JointDistribution;
use crate::{Error, Result};

/// Default singular-value threshold for the weak-independence rank test.
pub const RANK_THRESHOLD: f64 = 1e-9;

/// Spectrum of the normalized joint matrix.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Descending, in `[0, 1]`; the first is 1 up to rounding.
    pub singular_values: Vec<f64>,
    /// Left singular vectors over the X alphabet.
    pub left: Vec<Vec<f64>>,
    /// Right singular vectors over the Y alphabet.
    pub right: Vec<Vec<f64>>,
}

impl SpectralDecomposition {
    pub fn of(joint: &JointDistribution) -> Self {
        let d = svd(&normalized_matrix(joint.matrix()));
        let singular_values = d.s.iter().map(|&s| s.clamp(0.0, 1.0)).collect();
        Self { singular_values, left: d.u, right: d.v }
    }

    /// `rho_m`, the second singular value (0 when there is none).
    pub fn maximal_correlation(&self) -> f64 {
        self.singular_values.get(1).copied().unwrap_or(0.0)
    }
}

pub(crate) fn normalized_matrix(pxy: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let ny = pxy.first().map_or(0, Vec::len);
    let px: Vec<f64> = pxy.iter().map(|r| r.iter().sum()).collect();
    let mut py = alloc::vec![0.0; ny];
    for r in pxy {
        for (o, &v) in py.iter_mut().zip(r) {
            *o += v;
        }
    }
    pxy.iter()
        .zip(&px)
        .map(|(r, &a)| {
            r.iter()
                .zip(&py)
                .map(|(&v, &b)| if a > 0.0 && b > 0.0 { v / sqrt(a * b) } else { 0.0 })
                .collect()
        })
        .collect()
}

/// `rho_m^2` of a raw joint matrix; zero-mass rows and columns are harmless.
pub(crate) fn maximal_correlation_sq_of(pxy: &[Vec<f64>]) -> f64 {
    let d = svd(&normalized_matrix(pxy));
    let r = d.s.get(1).copied().unwrap_or(0.0).clamp(0.0, 1.0);
    r * r
}

/// Hirschfeld-Gebelein-Rényi maximal correlation `rho_m(X;Y)` in `[0, 1]`.
///
/// Returns 0 when either marginal is degenerate.
pub fn maximal_correlation(joint: &JointDistribution) -> f64 {
    if joint.nx() < 2 || joint.ny() < 2 {
        return 0.0;
    }
    SpectralDecomposition::of(joint).maximal_correlation()
}

/// Verdict of the weak-independence test.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakIndependence {
    pub weakly_independent: bool,
    /// Rank of the `|Y| x |X|` matrix whose rows are `P_{X|Y}(.|y)`.
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

/// `X` is weakly independent of `Y` iff the rows `P_{X|Y}(.|y)` are linearly
/// dependent, which is exactly when perfect privacy leaves something to release.
pub fn weak_independence(joint: &JointDistribution) -> WeakIndependence {
    weak_independence_with(joint, RANK_THRESHOLD)
}

pub fn weak_independence_with(joint: &JointDistribution, threshold: f64) -> WeakIndependence {
    let rows = joint.marginals().x_given_y.rows().to_vec();
    let d = svd(&rows);
    let rank = d.s.iter().filter(|&&s| s > threshold).count();
    WeakIndependence { weakly_independent: rank < joint.ny(), rank, singular_values: d.s }
}

/// Poincaré constant `1 - rho_m^2`.
pub fn poincare_constant(joint: &JointDistribution) -> f64 {
    let r = maximal_correlation(joint);
    1.0 - r * r
}

/// `mmse(f(X) | Z) = E[var(f(X) | Z)]`, exact by enumeration.
///
/// `joint` is the pairing of `X` (rows) with the conditioning variable `Z`
/// (columns); `f` gives one real value per X symbol.
pub fn mmse_discrete(f: &[f64], joint: &JointDistribution) -> Result<f64> {
    if f.len() != joint.nx() {
        return Err(Error::ShapeMismatch(alloc::format!(
            "{} function values for {} symbols",
            f.len(),
            joint.nx()
        )));
    }
    let px = joint.px();
    let mean: f64 = px.iter().zip(f).map(|(p, v)| p * v).sum();
    let var: f64 = px.iter().zip(f).map(|(p, v)| p * (v - mean) * (v - mean)).sum();
    let scale = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if var <= 1e-14 * (1.0 + scale * scale) {
        return Err(Error::ConstantFunction);
    }
    let m = joint.matrix();
    let mut explained = 0.0;
    for z in 0..joint.ny() {
        let pz: f64 = m.iter().map(|r| r[z]).sum();
        let cond: f64 = m.iter().zip(f).map(|(r, v)| r[z] * (v - mean)).sum::<f64>() / pz;
        explained += pz * cond * cond;
    }
    Ok((var - explained).clamp(0.0, var))
}

/// Whether `mmse(f(X)|Z) >= (1 - eps) var(f(X))` for every non-constant `f`,
/// i.e. `rho_m^2(X;Z) <= eps`.
pub fn mmse_privacy_band(joint_xz: &JointDistribution, eps: f64) -> Result<bool> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::OutOfRange { what: "epsilon", value: eps });
    }
    let r = maximal_correlation(joint_xz);
    Ok(r * r <= eps + 1e-12)
}

/// Pearson correlation of numeric values attached to the two alphabets.
pub fn pearson_correlation(joint: &JointDistribution, x_values: &[f64], y_values: &[f64]) -> f64 {
    let px = joint.px();
    let py = joint.py();
    let mx: f64 = px.iter().zip(x_values).map(|(p, v)| p * v).sum();
    let my: f64 = py.iter().zip(y_values).map(|(p, v)| p * v).sum();
    let vx: f64 = px.iter().zip(x_values).map(|(p, v)| p * (v - mx) * (v - mx)).sum();
    let vy: f64 = py.iter().zip(y_values).map(|(p, v)| p * (v - my) * (v - my)).sum();
    if vx <= 0.0 || vy <= 0.0 {
        return 0.0;
    }
    let mut cov = 0.0;
    for (r, xv) in joint.matrix().iter().zip(x_values) {
        for (&p, yv) in r.iter().zip(y_values) {
            cov += p * (xv - mx) * (yv - my);
        }
    }
    cov / sqrt(vx * vy)
}
