//! Finite distributions, channels and the information measures built on them.
//!
//! Matrices are stored row-major as `Vec<Vec<f64>>`; alphabets here are small
//! (tens of symbols), so clarity wins over layout tricks. The hot loops of the
//! solver work on flat buffers of their own.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::math::{log2, neg_plogp, ZERO_PROB};
use crate::{Error, Result};

/// Largest deviation of a total mass from 1 that is silently renormalized.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Default labels `"0", "1", ...`.
pub fn index_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn normalize_row(row: &mut [f64], row_idx: usize) -> Result<()> {
    let mut sum = 0.0;
    for (col, &v) in row.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteEntry { row: row_idx, col });
        }
        if v < 0.0 {
            return Err(Error::NegativeEntry { row: row_idx, col, value: v });
        }
        sum += v;
    }
    if sum == 0.0 {
        return Err(Error::ZeroTotalMass);
    }
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { sum });
    }
    for v in row.iter_mut() {
        *v /= sum;
    }
    Ok(())
}

/// A probability distribution over a labelled finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector {
    labels: Vec<String>,
    p: Vec<f64>,
}

impl ProbVector {
    pub fn new(labels: Vec<String>, p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::ShapeMismatch("empty distribution".into()));
        }
        if labels.len() != p.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} labels for {} probabilities",
                labels.len(),
                p.len()
            )));
        }
        let mut p = p;
        normalize_row(&mut p, 0)?;
        Ok(Self { labels, p })
    }

    /// Distribution with index labels.
    pub fn from_probs(p: Vec<f64>) -> Result<Self> {
        let labels = index_labels(p.len());
        Self::new(labels, p)
    }

    pub fn uniform(n: usize) -> Self {
        Self { labels: index_labels(n), p: vec![1.0 / n as f64; n] }
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::from_probs(vec![1.0 - p, p])
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

/// Shannon entropy in bits.
pub fn entropy(p: &ProbVector) -> f64 {
    entropy_of(&p.p)
}

pub(crate) fn entropy_of(p: &[f64]) -> f64 {
    p.iter().map(|&v| neg_plogp(v)).sum()
}

/// Result of a KL divergence: finite, or infinite when absolute continuity fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Divergence {
    Finite(f64),
    Infinite,
}

impl Divergence {
    pub fn finite(self) -> Option<f64> {
        match self {
            Divergence::Finite(v) => Some(v),
            Divergence::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Divergence::Infinite)
    }
}

/// `D(p || q)` in bits.
pub fn kl_divergence(p: &ProbVector, q: &ProbVector) -> Result<Divergence> {
    if p.labels != q.labels {
        return Err(Error::AlphabetMismatch("divergence operands differ in alphabet".into()));
    }
    Ok(kl_of(&p.p, &q.p))
}

pub(crate) fn kl_of(p: &[f64], q: &[f64]) -> Divergence {
    let mut d = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= ZERO_PROB {
            continue;
        }
        if qi <= 0.0 {
            return Divergence::Infinite;
        }
        d += pi * log2(pi / qi);
    }
    Divergence::Finite(d.max(0.0))
}

/// A row-stochastic matrix; row `i` is the output distribution for input `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    in_labels: Vec<String>,
    out_labels: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Channel {
    pub fn new(in_labels: Vec<String>, out_labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != in_labels.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} rows for {} input labels",
                rows.len(),
                in_labels.len()
            )));
        }
        if out_labels.is_empty() {
            return Err(Error::ShapeMismatch("channel has no outputs".into()));
        }
        let mut rows = rows;
        for (i, row) in rows.iter_mut().enumerate() {
            if row.len() != out_labels.len() {
                return Err(Error::ShapeMismatch(format!(
                    "row {i} has {} entries for {} output labels",
                    row.len(),
                    out_labels.len()
                )));
            }
            normalize_row(row, i)?;
        }
        Ok(Self { in_labels, out_labels, rows })
    }

    /// Channel with index labels on both sides.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_out = rows.first().map_or(0, Vec::len);
        Self::new(index_labels(rows.len()), index_labels(n_out), rows)
    }

    /// Skips validation; callers guarantee rows are stochastic up to rounding.
    pub(crate) fn from_parts_unchecked(
        in_labels: Vec<String>,
        out_labels: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Self {
        Self { in_labels, out_labels, rows }
    }

    pub fn identity(labels: &[String]) -> Self {
        let n = labels.len();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { in_labels: labels.to_vec(), out_labels: labels.to_vec(), rows }
    }

    /// Every input is mapped to the single output `out_label`.
    pub fn constant(in_labels: &[String], out_label: &str) -> Self {
        let rows = vec![vec![1.0]; in_labels.len()];
        Self { in_labels: in_labels.to_vec(), out_labels: vec![out_label.into()], rows }
    }

    /// Binary symmetric channel with crossover `alpha` on `{0, 1}`.
    pub fn bsc(alpha: f64) -> Result<Self> {
        Self::from_rows(vec![vec![1.0 - alpha, alpha], vec![alpha, 1.0 - alpha]])
    }

    /// Binary erasure channel `{0,1} -> {0,1,e}`.
    pub fn bec(delta: f64) -> Result<Self> {
        Self::erasure(&index_labels(2), delta)
    }

    /// `m`-ary erasure channel: keep the input w.p. `1-delta`, else emit `e`.
    pub fn erasure(labels: &[String], delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::DeltaOutOfRange(delta));
        }
        let n = labels.len();
        let mut out = labels.to_vec();
        out.push(erasure_label(labels));
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![0.0; n + 1];
                r[i] = 1.0 - delta;
                r[n] = delta;
                r
            })
            .collect();
        Ok(Self { in_labels: labels.to_vec(), out_labels: out, rows })
    }

    pub fn in_labels(&self) -> &[String] {
        &self.in_labels
    }

    pub fn out_labels(&self) -> &[String] {
        &self.out_labels
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn n_in(&self) -> usize {
        self.in_labels.len()
    }

    pub fn n_out(&self) -> usize {
        self.out_labels.len()
    }

    /// Output distribution when the input is drawn from `input`.
    pub fn output_distribution(&self, input: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_out()];
        for (row, &w) in self.rows.iter().zip(input) {
            for (o, &v) in out.iter_mut().zip(row) {
                *o += w * v;
            }
        }
        out
    }

    /// Largest absolute entry difference against another channel of the same shape.
    pub fn max_abs_diff(&self, other: &Channel) -> f64 {
        self.rows
            .iter()
            .zip(&other.rows)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

/// The reserved erasure label `"e"`, or `"e#"` if the alphabet already uses `"e"`.
pub fn erasure_label(labels: &[String]) -> String {
    let mut label = String::from("e");
    while labels.iter().any(|l| *l == label) {
        label.push('#');
    }
    label
}

/// Cascade `first` then `second`: the end-to-end channel `second ∘ first`.
pub fn compose(first: &Channel, second: &Channel) -> Result<Channel> {
    if first.out_labels != second.in_labels {
        return Err(Error::AlphabetMismatch(
            "output alphabet of the first channel is not the input alphabet of the second".into(),
        ));
    }
    let rows = first
        .rows
        .iter()
        .map(|r| second.output_distribution(r))
        .collect();
    Ok(Channel {
        in_labels: first.in_labels.clone(),
        out_labels: second.out_labels.clone(),
        rows,
    })
}

/// Symbols removed from a joint distribution because they carry no mass.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StrippedSymbols {
    pub x: Vec<String>,
    pub y: Vec<String>,
}

impl StrippedSymbols {
    pub fn is_empty(&self) -> bool {
        self.x.is_empty() && self.y.is_empty()
    }
}

/// A joint pmf `P_{XY}`; row index is `x`, column index is `y`.
///
/// Zero-mass rows and columns are stripped on construction, so both
/// marginals have full support.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    x_labels: Vec<String>,
    y_labels: Vec<String>,
    pxy: Vec<Vec<f64>>,
    stripped: StrippedSymbols,
}

/// Validate and normalize a raw labelled matrix into a [`JointDistribution`].
pub fn validate_joint(
    x_labels: Vec<String>,
    y_labels: Vec<String>,
    matrix: Vec<Vec<f64>>,
) -> Result<JointDistribution> {
    if matrix.len() != x_labels.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} rows for {} x labels",
            matrix.len(),
            x_labels.len()
        )));
    }
    if x_labels.is_empty() || y_labels.is_empty() {
        return Err(Error::ShapeMismatch("empty alphabet".into()));
    }
    let mut total = 0.0;
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != y_labels.len() {
            return Err(Error::ShapeMismatch(format!(
                "row {i} has {} entries for {} y labels",
                row.len(),
                y_labels.len()
            )));
        }
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteEntry { row: i, col: j });
            }
            if v < 0.0 {
                return Err(Error::NegativeEntry { row: i, col: j, value: v });
            }
            total += v;
        }
    }
    if total == 0.0 {
        return Err(Error::ZeroTotalMass);
    }
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { sum: total });
    }

    let keep_x: Vec<bool> = matrix.iter().map(|r| r.iter().any(|&v| v > 0.0)).collect();
    let keep_y: Vec<bool> = (0..y_labels.len())
        .map(|j| matrix.iter().any(|r| r[j] > 0.0))
        .collect();
    let mut stripped = StrippedSymbols::default();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (l, &k) in x_labels.iter().zip(&keep_x) {
        if k { xs.push(l.clone()) } else { stripped.x.push(l.clone()) }
    }
    for (l, &k) in y_labels.iter().zip(&keep_y) {
        if k { ys.push(l.clone()) } else { stripped.y.push(l.clone()) }
    }
    let pxy = matrix
        .iter()
        .zip(&keep_x)
        .filter(|(_, &k)| k)
        .map(|(r, _)| {
            r.iter()
                .zip(&keep_y)
                .filter(|(_, &k)| k)
                .map(|(&v, _)| v / total)
                .collect()
        })
        .collect();
    Ok(JointDistribution { x_labels: xs, y_labels: ys, pxy, stripped })
}

/// Marginals and both conditional channels of a joint distribution.
#[derive(Debug, Clone)]
pub struct Marginals {
    pub px: ProbVector,
    pub py: ProbVector,
    pub y_given_x: Channel,
    pub x_given_y: Channel,
}

impl JointDistribution {
    /// Joint of an input distribution and a channel, `P_X(x) P_{Y|X}(y|x)`.
    pub fn from_input_and_channel(px: &ProbVector, channel: &Channel) -> Result<Self> {
        if px.labels() != channel.in_labels() {
            return Err(Error::AlphabetMismatch(
                "input distribution and channel inputs differ".into(),
            ));
        }
        let matrix = channel
            .rows()
            .iter()
            .zip(px.probs())
            .map(|(r, &p)| r.iter().map(|&v| p * v).collect())
            .collect();
        validate_joint(px.labels().to_vec(), channel.out_labels().to_vec(), matrix)
    }

    /// Joint with index labels.
    pub fn from_matrix(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let nx = matrix.len();
        let ny = matrix.first().map_or(0, Vec::len);
        validate_joint(index_labels(nx), index_labels(ny), matrix)
    }

    pub fn x_labels(&self) -> &[String] {
        &self.x_labels
    }

    pub fn y_labels(&self) -> &[String] {
        &self.y_labels
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.pxy
    }

    pub fn stripped(&self) -> &StrippedSymbols {
        &self.stripped
    }

    pub fn nx(&self) -> usize {
        self.x_labels.len()
    }

    pub fn ny(&self) -> usize {
        self.y_labels.len()
    }

    pub fn px(&self) -> Vec<f64> {
        self.pxy.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn py(&self) -> Vec<f64> {
        let mut py = vec![0.0; self.ny()];
        for r in &self.pxy {
            for (o, &v) in py.iter_mut().zip(r) {
                *o += v;
            }
        }
        py
    }

    /// `(P_X, P_Y, P_{Y|X}, P_{X|Y})`.
    pub fn marginals(&self) -> Marginals {
        let px = self.px();
        let py = self.py();
        let y_given_x = self
            .pxy
            .iter()
            .zip(&px)
            .map(|(r, &p)| r.iter().map(|&v| v / p).collect())
            .collect();
        let x_given_y = (0..self.ny())
            .map(|j| self.pxy.iter().map(|r| r[j] / py[j]).collect())
            .collect();
        Marginals {
            px: ProbVector { labels: self.x_labels.clone(), p: px },
            py: ProbVector { labels: self.y_labels.clone(), p: py },
            y_given_x: Channel::from_parts_unchecked(
                self.x_labels.clone(),
                self.y_labels.clone(),
                y_given_x,
            ),
            x_given_y: Channel::from_parts_unchecked(
                self.y_labels.clone(),
                self.x_labels.clone(),
                x_given_y,
            ),
        }
    }

    /// The joint of `(Y, X)`.
    pub fn transpose(&self) -> JointDistribution {
        let pyx = (0..self.ny())
            .map(|j| self.pxy.iter().map(|r| r[j]).collect())
            .collect();
        JointDistribution {
            x_labels: self.y_labels.clone(),
            y_labels: self.x_labels.clone(),
            pxy: pyx,
            stripped: StrippedSymbols { x: self.stripped.y.clone(), y: self.stripped.x.clone() },
        }
    }

    pub fn entropy_x(&self) -> f64 {
        entropy_of(&self.px())
    }

    pub fn entropy_y(&self) -> f64 {
        entropy_of(&self.py())
    }

    pub fn joint_entropy(&self) -> f64 {
        self.pxy.iter().flatten().map(|&v| neg_plogp(v)).sum()
    }

    /// `H(Y|X) = H(X,Y) - H(X)`.
    pub fn conditional_entropy(&self) -> f64 {
        (self.joint_entropy() - self.entropy_x()).max(0.0)
    }

    /// `I(X;Y) = H(X) + H(Y) - H(X,Y)`.
    pub fn mutual_information(&self) -> f64 {
        mutual_information_of(&self.pxy)
    }

    /// `true` when `P_{XY} = P_X P_Y` within `tol` entrywise.
    pub fn is_product(&self, tol: f64) -> bool {
        let px = self.px();
        let py = self.py();
        self.pxy
            .iter()
            .zip(&px)
            .all(|(r, &a)| r.iter().zip(&py).all(|(&v, &b)| (v - a * b).abs() <= tol))
    }
}

/// `I` of an unnormalized-safe joint matrix (rows x, columns y), in bits.
pub(crate) fn mutual_information_of(pxy: &[Vec<f64>]) -> f64 {
    let ny = pxy.first().map_or(0, Vec::len);
    let px: Vec<f64> = pxy.iter().map(|r| r.iter().sum()).collect();
    let mut py = vec![0.0; ny];
    for r in pxy {
        for (o, &v) in py.iter_mut().zip(r) {
            *o += v;
        }
    }
    let mut i = 0.0;
    for (r, &a) in pxy.iter().zip(&px) {
        for (&v, &b) in r.iter().zip(&py) {
            if v > ZERO_PROB {
                i += v * log2(v / (a * b));
            }
        }
    }
    i.max(0.0)
}

/// Joint matrix of `(X, Z)` from `P_{XY}` and a filter `P_{Z|Y}`, no validation.
pub(crate) fn push_matrix(pxy: &[Vec<f64>], filter: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let nz = filter.first().map_or(0, Vec::len);
    pxy.iter()
        .map(|r| {
            let mut out = vec![0.0; nz];
            for (&p, frow) in r.iter().zip(filter) {
                if p == 0.0 {
                    continue;
                }
                for (o, &w) in out.iter_mut().zip(frow) {
                    *o += p * w;
                }
            }
            out
        })
        .collect()
}

/// Materialize the Markov chain `X - Y - Z`: returns the joints of `(X, Z)` and `(Y, Z)`.
pub fn push_joint(
    joint: &JointDistribution,
    filter: &Channel,
) -> Result<(JointDistribution, JointDistribution)> {
    if filter.in_labels() != joint.y_labels() {
        return Err(Error::AlphabetMismatch(
            "filter input alphabet differs from the Y alphabet".into(),
        ));
    }
    let pxz = push_matrix(&joint.pxy, filter.rows());
    let py = joint.py();
    let pyz = filter
        .rows()
        .iter()
        .zip(&py)
        .map(|(r, &p)| r.iter().map(|&w| p * w).collect())
        .collect();
    let xz = validate_joint(joint.x_labels.clone(), filter.out_labels().to_vec(), renorm(pxz))?;
    let yz = validate_joint(joint.y_labels.clone(), filter.out_labels().to_vec(), renorm(pyz))?;
    Ok((xz, yz))
}

// Rounding in long products can drift the total by a few ulps.
fn renorm(mut m: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let total: f64 = m.iter().flatten().sum();
    for v in m.iter_mut().flatten() {
        *v /= total;
    }
    m
}
