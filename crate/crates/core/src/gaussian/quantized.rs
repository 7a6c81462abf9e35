//! The quantized additive-noise filter family `Z = Q_M(Y + gamma N)`, where
//! `Q_M(u) = 2^{-M} floor(2^M u)`.
//!
//! Entropies of quantized Gaussians are evaluated in one of two ways. When
//! the standard deviation spans at least two cells, the cell sum is replaced
//! by its Poisson-summation limit `(1/d) int -q log q`, with
//! `q(v) = Phi(v + d) - Phi(v)` and `d` the cell width in units of the
//! standard deviation; the neglected periodic part is of order
//! `exp(-2 pi^2 / d^2)`. The integral is done by Gauss–Hermite after pulling
//! out the normal density. Narrower Gaussians are summed cell by cell, and
//! averages over a Gaussian mean are folded onto a single cell and
//! integrated with graded Gauss–Legendre panels.

use alloc::vec::Vec;

use crate::exec::{ParallelMap, Sequential};
use crate::math::{exp, exp2, floor, ln, log2, sqrt};
use crate::{Error, Result};

use super::quadrature::{gauss_hermite, gauss_legendre, Rule};
use super::{g_gaussian, GaussianPair};

const LOG2_E: f64 = core::f64::consts::LOG2_E;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
/// Cells are summed out to this many standard deviations either side.
const DIRECT_SPAN: f64 = 13.0;
/// Standard deviation, in cells, above which the Poisson limit is used.
const SMOOTH_RATIO: f64 = 2.0;

/// Log-spaced noise levels, as multiples of `sqrt(var_y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaGrid {
    pub points: usize,
    pub lo: f64,
    pub hi: f64,
    /// Points inserted between the neighbours of the best grid point.
    pub refine: usize,
}

impl Default for GammaGrid {
    fn default() -> Self {
        Self { points: 200, lo: 1e-3, hi: 1e3, refine: 20 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizerConfig {
    /// Bits of accuracy `M`.
    pub m: u32,
    /// Fixed truncation radius in cells around the cell holding the mean.
    /// `None` picks the smallest radius whose tail mass is below
    /// `tail_tolerance`.
    pub k_trunc: Option<u64>,
    pub tail_tolerance: f64,
    pub max_cells: u64,
    pub hermite_nodes: usize,
    pub legendre_nodes: usize,
    /// Largest change allowed when the quadrature nodes are doubled.
    pub quadrature_tolerance: f64,
    pub gamma_grid: GammaGrid,
}

impl Default for QuantizerConfig {
    fn default() -> Self {
        Self {
            m: 8,
            k_trunc: None,
            tail_tolerance: 1e-10,
            max_cells: 1 << 24,
            hermite_nodes: 64,
            legendre_nodes: 16,
            quadrature_tolerance: 1e-6,
            gamma_grid: GammaGrid::default(),
        }
    }
}

impl QuantizerConfig {
    pub fn with_m(m: u32) -> Self {
        Self { m, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(Error::InvalidConfig(s.into()));
        if !(1..=40).contains(&self.m) {
            return bad("M must lie in 1..=40");
        }
        if !(2..=128).contains(&self.hermite_nodes) {
            return bad("hermite_nodes must lie in 2..=128");
        }
        if !(2..=64).contains(&self.legendre_nodes) {
            return bad("legendre_nodes must lie in 2..=64");
        }
        if !(self.tail_tolerance > 0.0 && self.tail_tolerance < 1.0) {
            return bad("tail_tolerance must lie in (0, 1)");
        }
        if !(self.quadrature_tolerance > 0.0) {
            return bad("quadrature_tolerance must be positive");
        }
        let g = &self.gamma_grid;
        if g.points < 2 || !(g.lo > 0.0 && g.hi > g.lo && g.hi.is_finite()) {
            return bad("gamma grid needs at least two points and 0 < lo < hi");
        }
        Ok(())
    }

    fn width(&self) -> f64 {
        exp2(-(self.m as f64))
    }
}

/// What the quantized output is conditioned on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Conditioning {
    None,
    /// `Y = y`.
    Y(f64),
    /// Standardized `X = x`.
    X(f64),
}

/// Cell probabilities `p_k = Pr(Z = k 2^{-M})` for `k` in `first..first + probs.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellProbs {
    pub first: i64,
    pub probs: Vec<f64>,
    /// Exact normal mass outside the retained cells.
    pub tail: f64,
    /// Tail-sum bound on the discarded mass from the density-decay estimate,
    /// for the unconditioned output only.
    pub bound_tail: Option<f64>,
}

impl CellProbs {
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs.iter().enumerate().map(move |(i, &p)| (self.first + i as i64, p))
    }
}

fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * core::f64::consts::FRAC_1_SQRT_2)
}

fn normal_cdf(x: f64) -> f64 {
    normal_sf(-x)
}

/// `Phi(b) - Phi(a)` without cancellation in either tail.
fn normal_mass(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        normal_sf(a) - normal_sf(b)
    } else if b <= 0.0 {
        normal_cdf(b) - normal_cdf(a)
    } else {
        1.0 - normal_sf(b) - normal_cdf(a)
    }
    .max(0.0)
}

fn conditional_law(pair: &GaussianPair, gamma: f64, cond: Conditioning) -> (f64, f64) {
    let (r2, v, g2) = (pair.rho2(), pair.var_y(), gamma * gamma);
    match cond {
        Conditioning::None => (0.0, sqrt(v + g2)),
        Conditioning::Y(y) => (y, gamma),
        Conditioning::X(x) => (sqrt(r2 * v) * x, sqrt((1.0 - r2) * v + g2)),
    }
}

/// Bound on the mass of `Q_M(Y + gamma N)` in cells `|k| > k_trunc`, from
/// `p_k <= C 2^{(p-1)M+p} / k^p + gamma 2^{M+1} / (k sqrt(2 pi)) exp(-k^2 / (2^{2M+3} gamma^2))`
/// with `f_Y(y) <= C |y|^{-p}`. For a Gaussian `Y` every `p > 1` is admissible
/// with `C_p = (p var_y / e)^{p/2} / sqrt(2 pi var_y)`; the best integer `p` up to 64 is used.
pub fn analytic_tail_bound(pair: &GaussianPair, gamma: f64, m: u32, k_trunc: u64) -> f64 {
    let k0 = (k_trunc + 1) as f64;
    let mf = m as f64;
    let var = pair.var_y();
    let ln2 = core::f64::consts::LN_2;
    let mut best = f64::INFINITY;
    for p in 2..=64u32 {
        let pf = p as f64;
        let ln_c = 0.5 * pf * (ln(pf * var) - 1.0) - 0.5 * ln(var) - LN_SQRT_2PI;
        let ln_scale = ln_c + ((pf - 1.0) * mf + pf) * ln2;
        // sum_{k >= k0} k^{-p} <= k0^{-p} + k0^{1-p} / (p - 1)
        let poly = exp(ln_scale - pf * ln(k0)) + exp(ln_scale + (1.0 - pf) * ln(k0)) / (pf - 1.0);
        best = best.min(poly);
    }
    let mut gauss = 0.0;
    if gamma > 0.0 {
        let a = 1.0 / (exp2(2.0 * mf + 3.0) * gamma * gamma);
        let lead = gamma * exp2(mf + 1.0) / (k0 * sqrt(2.0 * core::f64::consts::PI));
        let integral = 0.5 * sqrt(core::f64::consts::PI / a) * libm::erfc(k0 * sqrt(a));
        gauss = lead * (exp(-a * k0 * k0) + integral);
    }
    2.0 * (best + gauss)
}

/// Cell probabilities of the quantized filter output, truncated to a window
/// whose exact tail mass is below the configured tolerance.
pub fn quantized_cell_probs(
    pair: &GaussianPair,
    gamma: f64,
    cond: Conditioning,
    cfg: &QuantizerConfig,
) -> Result<CellProbs> {
    cfg.validate()?;
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::OutOfRange { what: "gamma", value: gamma });
    }
    match cond {
        Conditioning::X(v) | Conditioning::Y(v) if !v.is_finite() => {
            return Err(Error::OutOfRange { what: "conditioning value", value: v });
        }
        _ => {}
    }
    let w = cfg.width();
    let (mean, s) = conditional_law(pair, gamma, cond);
    let centre = floor(mean / w) as i64;
    if s == 0.0 {
        return Ok(CellProbs { first: centre, probs: alloc::vec![1.0], tail: 0.0, bound_tail: None });
    }
    let tail_at = |k: u64| {
        let lo = ((centre - k as i64) as f64 * w - mean) / s;
        let hi = ((centre + k as i64 + 1) as f64 * w - mean) / s;
        normal_cdf(lo) + normal_sf(hi)
    };
    let radius = match cfg.k_trunc {
        Some(k) => k,
        None => {
            let mut k = (6.0 * s / w) as u64 + 1;
            while tail_at(k) >= cfg.tail_tolerance && k <= cfg.max_cells {
                k = k + k / 4 + 1;
            }
            k
        }
    };
    let tail = tail_at(radius);
    if tail >= cfg.tail_tolerance || 2 * radius + 1 > cfg.max_cells {
        return Err(Error::TruncationInsufficient { tail });
    }
    let first = centre - radius as i64;
    let probs = (0..=2 * radius)
        .map(|i| {
            let k = (first + i as i64) as f64;
            normal_mass((k * w - mean) / s, ((k + 1.0) * w - mean) / s)
        })
        .collect();
    let bound_tail =
        matches!(cond, Conditioning::None).then(|| analytic_tail_bound(pair, gamma, cfg.m, radius));
    Ok(CellProbs { first, probs, tail, bound_tail })
}

struct Rules {
    hermite: Rule,
    legendre: Rule,
}

impl Rules {
    fn new(hermite: usize, legendre: usize) -> Self {
        Self { hermite: gauss_hermite(hermite), legendre: gauss_legendre(legendre) }
    }
}

/// Entropy of a cell-width-`d` quantized standard normal in the Poisson limit:
/// `(1/d) int phi(v) * (-r log2(phi r))` with `r(v) = int_0^d exp(-u v - u^2/2) du`.
fn smooth_entropy(d: f64, rules: &Rules) -> f64 {
    let h = rules.hermite.apply(|v| {
        let r = rules.legendre.integrate(0.0, d, |u| exp(-u * v - 0.5 * u * u));
        let log2_phi = (-0.5 * v * v - LN_SQRT_2PI) * LOG2_E;
        -r * (log2_phi + log2(r))
    });
    h / d
}

/// Entropy of `Q(N(mean, s^2))` with cell width `w`, summed cell by cell.
fn direct_entropy(mean: f64, s: f64, w: f64) -> f64 {
    let lo = floor((mean - DIRECT_SPAN * s) / w) as i64;
    let hi = floor((mean + DIRECT_SPAN * s) / w) as i64;
    (lo..=hi)
        .map(|k| {
            let p = normal_mass((k as f64 * w - mean) / s, ((k + 1) as f64 * w - mean) / s);
            if p > 0.0 {
                -p * log2(p)
            } else {
                0.0
            }
        })
        .sum()
}

fn cell_entropy(mean: f64, s: f64, w: f64, rules: &Rules) -> f64 {
    if s >= SMOOTH_RATIO * w {
        smooth_entropy(w / s, rules)
    } else {
        direct_entropy(mean, s, w)
    }
}

/// `E H(Q(N(m, s^2)))` over `m ~ N(0, sm^2)`.
fn expected_cell_entropy(s: f64, sm: f64, w: f64, rules: &Rules) -> f64 {
    if s >= SMOOTH_RATIO * w {
        return smooth_entropy(w / s, rules);
    }
    if sm == 0.0 {
        return direct_entropy(0.0, s, w);
    }
    // fold the mean onto [0, w): both the entropy and the wrapped density are
    // symmetric about w/2
    let uniform = sm >= SMOOTH_RATIO * w;
    let jmax = (DIRECT_SPAN * sm / w) as i64 + 2;
    let wrapped = |t: f64| -> f64 {
        if uniform {
            1.0 / w
        } else {
            (-jmax..=jmax)
                .map(|j| {
                    let z = (t + j as f64 * w) / sm;
                    exp(-0.5 * z * z - LN_SQRT_2PI) / sm
                })
                .sum()
        }
    };
    let half = 0.5 * w;
    let mut cuts = alloc::vec![0.0];
    let mut c = s / 16.0;
    while c < half {
        cuts.push(c);
        c *= 2.0;
    }
    cuts.push(half);
    let hmax = if uniform { f64::INFINITY } else { 0.5 * sm };
    let mut total = 0.0;
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let pieces = libm::ceil((b - a) / hmax).max(1.0) as usize;
        let step = (b - a) / pieces as f64;
        for i in 0..pieces {
            let (lo, hi) = (a + i as f64 * step, a + (i + 1) as f64 * step);
            total += rules.legendre.integrate(lo, hi, |t| direct_entropy(t, s, w) * wrapped(t));
        }
    }
    2.0 * total
}

/// Mutual information of the quantized filter output with `X` and with `Y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizedInfo {
    pub i_xz: f64,
    pub i_yz: f64,
}

struct Engine {
    w: f64,
    base: Rules,
    fine: Rules,
    tol: f64,
}

impl Engine {
    fn new(cfg: &QuantizerConfig) -> Self {
        Self {
            w: cfg.width(),
            base: Rules::new(cfg.hermite_nodes, cfg.legendre_nodes),
            fine: Rules::new(2 * cfg.hermite_nodes, 2 * cfg.legendre_nodes),
            tol: cfg.quadrature_tolerance,
        }
    }

    fn pass(&self, pair: &GaussianPair, gamma: f64, rules: &Rules) -> QuantizedInfo {
        let (r2, v, g2) = (pair.rho2(), pair.var_y(), gamma * gamma);
        let w = self.w;
        let hz = cell_entropy(0.0, sqrt(v + g2), w, rules);
        let hz_x = expected_cell_entropy(sqrt((1.0 - r2) * v + g2), sqrt(r2 * v), w, rules);
        let hz_y = expected_cell_entropy(gamma, sqrt(v), w, rules);
        QuantizedInfo { i_xz: hz - hz_x, i_yz: hz - hz_y }
    }

    fn info(&self, pair: &GaussianPair, gamma: f64) -> Result<QuantizedInfo> {
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::OutOfRange { what: "gamma", value: gamma });
        }
        let a = self.pass(pair, gamma, &self.base);
        let b = self.pass(pair, gamma, &self.fine);
        let change = (a.i_xz - b.i_xz).abs().max((a.i_yz - b.i_yz).abs());
        if !(change <= self.tol) {
            return Err(Error::QuadratureNotConverged { change });
        }
        Ok(QuantizedInfo { i_xz: b.i_xz.max(0.0), i_yz: b.i_yz.max(0.0) })
    }

    /// `H(Q_M(Y + gamma N))`.
    fn output_entropy(&self, pair: &GaussianPair, gamma: f64) -> f64 {
        cell_entropy(0.0, sqrt(pair.var_y() + gamma * gamma), self.w, &self.fine)
    }
}

/// `I(X; Z)` and `I(Y; Z)` for `Z = Q_M(Y + gamma N)`, with `M` from the
/// configuration. Every quadrature is repeated with doubled nodes and the
/// refined value is returned.
pub fn mutual_info_quantized(
    pair: &GaussianPair,
    gamma: f64,
    cfg: &QuantizerConfig,
) -> Result<QuantizedInfo> {
    cfg.validate()?;
    Engine::new(cfg).info(pair, gamma)
}

/// The configured noise grid for `pair`, in absolute units.
pub fn gamma_grid(pair: &GaussianPair, grid: &GammaGrid) -> Vec<f64> {
    log_space(grid.lo * sqrt(pair.var_y()), grid.hi * sqrt(pair.var_y()), grid.points)
}

fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (ln(a), ln(b));
    (0..n).map(|i| exp(la + (lb - la) * i as f64 / (n - 1) as f64)).collect()
}

/// `(gamma, I(X;Z), I(Y;Z))` along a list of noise levels.
pub fn sweep_gamma<P: ParallelMap>(
    pair: &GaussianPair,
    gammas: &[f64],
    cfg: &QuantizerConfig,
    exec: &P,
) -> Result<Vec<(f64, QuantizedInfo)>> {
    cfg.validate()?;
    let engine = Engine::new(cfg);
    exec.map(gammas, |&g| engine.info(pair, g).map(|i| (g, i))).into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizedOptimum {
    pub value: f64,
    pub gamma: f64,
    pub i_xz: f64,
    pub evaluations: usize,
}

/// `g_{eps,M}`: the best `I(Y;Z)` over the quantized family subject to
/// `I(X;Z) <= eps`.
pub fn g_eps_m(pair: &GaussianPair, eps: f64, cfg: &QuantizerConfig) -> Result<QuantizedOptimum> {
    g_eps_m_in(pair, eps, cfg, &Sequential)
}

/// [`g_eps_m`] with the grid evaluated by `exec`.
///
/// The grid maximum is refined once between its neighbours, then the
/// feasibility boundary just below the incumbent is located by bisection in
/// `log gamma`, since the optimum usually sits on it.
pub fn g_eps_m_in<P: ParallelMap>(
    pair: &GaussianPair,
    eps: f64,
    cfg: &QuantizerConfig,
    exec: &P,
) -> Result<QuantizedOptimum> {
    cfg.validate()?;
    let mi = pair.mutual_information();
    if !eps.is_finite() || eps <= 0.0 || eps >= mi {
        return Err(Error::EpsilonOutOfRange { epsilon: eps, max: mi });
    }
    let engine = Engine::new(cfg);
    let eval = |gs: &[f64]| -> Result<Vec<(f64, QuantizedInfo)>> {
        exec.map(gs, |&g| engine.info(pair, g).map(|i| (g, i))).into_iter().collect()
    };
    let mut pts = eval(&gamma_grid(pair, &cfg.gamma_grid))?;
    let best_idx = |pts: &[(f64, QuantizedInfo)]| {
        pts.iter()
            .enumerate()
            .filter(|(_, (_, i))| i.i_xz <= eps)
            .max_by(|a, b| a.1 .1.i_yz.total_cmp(&b.1 .1.i_yz).then(b.0.cmp(&a.0)))
            .map(|(k, _)| k)
    };
    let b = best_idx(&pts).ok_or(Error::NoFeasibleGamma)?;
    if cfg.gamma_grid.refine > 0 {
        let lo = pts[b.saturating_sub(1)].0;
        let hi = pts[(b + 1).min(pts.len() - 1)].0;
        if hi > lo {
            let inner = log_space(lo, hi, cfg.gamma_grid.refine + 2);
            pts.extend(eval(&inner[1..inner.len() - 1])?);
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let b = best_idx(&pts).ok_or(Error::NoFeasibleGamma)?;
    let mut best = pts[b];
    let mut evaluations = pts.len();
    if b > 0 && pts[b - 1].1.i_xz > eps {
        let (mut lo, mut hi) = (ln(pts[b - 1].0), ln(pts[b].0));
        let mut edge = best;
        for _ in 0..60 {
            if hi - lo <= 1e-13 {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let info = engine.info(pair, exp(mid))?;
            evaluations += 1;
            if info.i_xz <= eps {
                hi = mid;
                edge = (exp(mid), info);
            } else {
                lo = mid;
            }
        }
        if edge.1.i_yz > best.1.i_yz {
            best = edge;
        }
    }
    Ok(QuantizedOptimum { value: best.1.i_yz, gamma: best.0, i_xz: best.1.i_xz, evaluations })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub m: u32,
    pub value: f64,
    pub gamma: f64,
    /// `g_eps - g_{eps,M}`.
    pub gap: f64,
    /// `H(Q_M(Y + gamma N)) - M` at the noise level chosen for the largest `M`.
    pub entropy_excess: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub epsilon: f64,
    pub g_closed: f64,
    pub rows: Vec<ConvergenceRow>,
    /// `H(Q_M) - M` never increases along the rows, within 1e-8.
    pub entropy_excess_monotone: bool,
    /// `|gap|` of the last row is below that of the first.
    pub gaps_shrinking: bool,
}

/// `g_{eps,M}` for each `M` in an ascending list, with the gaps to the
/// closed-form `g_eps` and the quantizer-refinement diagnostic.
pub fn convergence_report<P: ParallelMap>(
    pair: &GaussianPair,
    eps: f64,
    ms: &[u32],
    cfg: &QuantizerConfig,
    exec: &P,
) -> Result<ConvergenceReport> {
    if ms.is_empty() || ms.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("M list must be non-empty and strictly ascending".into()));
    }
    let g_closed = g_gaussian(pair, eps)?;
    let mut opts = Vec::with_capacity(ms.len());
    for &m in ms {
        let c = QuantizerConfig { m, ..cfg.clone() };
        opts.push(g_eps_m_in(pair, eps, &c, exec)?);
    }
    let gamma_ref = opts.last().map(|o| o.gamma).unwrap_or(1.0);
    let rows: Vec<ConvergenceRow> = ms
        .iter()
        .zip(&opts)
        .map(|(&m, o)| {
            let engine = Engine::new(&QuantizerConfig { m, ..cfg.clone() });
            ConvergenceRow {
                m,
                value: o.value,
                gamma: o.gamma,
                gap: g_closed - o.value,
                entropy_excess: engine.output_entropy(pair, gamma_ref) - m as f64,
            }
        })
        .collect();
    let entropy_excess_monotone =
        rows.windows(2).all(|w| w[1].entropy_excess <= w[0].entropy_excess + 1e-8);
    let gaps_shrinking = rows.len() == 1 || rows[rows.len() - 1].gap.abs() < rows[0].gap.abs();
    Ok(ConvergenceReport { epsilon: eps, g_closed, rows, entropy_excess_monotone, gaps_shrinking })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::additive_filter;

    fn pair(r: f64, v: f64) -> GaussianPair {
        GaussianPair::new(r, v).unwrap()
    }

    /// Plain cell sum of `-p log2 p` for `Q(N(mean, s^2))`, out to 40 sd.
    fn brute_entropy(mean: f64, s: f64, w: f64) -> f64 {
        let lo = ((mean - 40.0 * s) / w).floor() as i64;
        let hi = ((mean + 40.0 * s) / w).floor() as i64;
        let cdf = |x: f64| 0.5 * libm::erfc(-x / core::f64::consts::SQRT_2);
        (lo..=hi)
            .map(|k| {
                let a = (k as f64 * w - mean) / s;
                let b = ((k + 1) as f64 * w - mean) / s;
                let p = if a > 0.0 { cdf(-a) - cdf(-b) } else { cdf(b) - cdf(a) };
                if p > 0.0 {
                    -p * p.log2()
                } else {
                    0.0
                }
            })
            .sum()
    }

    #[test]
    fn smooth_entropy_matches_cell_sums() {
        let rules = Rules::new(64, 16);
        for &(s, w) in &[(1.0, 0.5), (1.0, 0.25), (0.7, 1.0 / 64.0), (3.0, 1.0 / 256.0), (1.0, 1e-5)] {
            let smooth = smooth_entropy(w / s, &rules);
            for mean in [0.0, 0.3 * w, 0.77 * w] {
                let b = brute_entropy(mean, s, w);
                assert!((smooth - b).abs() < 1e-10, "s={s} w={w}: {smooth} vs {b}");
            }
        }
    }

    #[test]
    fn direct_entropy_matches_brute_force() {
        for &(m, s, w) in &[(0.1, 0.3, 0.25), (0.0, 1e-3, 0.25), (-0.6, 0.05, 0.5)] {
            assert!((direct_entropy(m, s, w) - brute_entropy(m, s, w)).abs() < 1e-12);
        }
    }

    /// Oracle for the Gaussian average of the cell entropy: dense midpoint rule over the mean.
    fn brute_expected(s: f64, sm: f64, w: f64) -> f64 {
        let n = 200_000;
        let span = 9.0 * sm;
        let h = 2.0 * span / n as f64;
        (0..n)
            .map(|i| {
                let m = -span + (i as f64 + 0.5) * h;
                let dens = (-0.5 * (m / sm).powi(2)).exp() / (sm * (2.0 * core::f64::consts::PI).sqrt());
                h * dens * brute_entropy(m, s, w)
            })
            .sum()
    }

    #[test]
    fn folded_average_matches_dense_oracle() {
        let rules = Rules::new(64, 16);
        for &(s, sm, w) in &[(0.1, 1.0, 0.25), (0.02, 0.3, 0.5), (0.3, 0.4, 0.5), (0.001, 1.0, 0.0625)] {
            let f = expected_cell_entropy(s, sm, w, &rules);
            let b = brute_expected(s, sm, w);
            assert!((f - b).abs() < 2e-6, "s={s} sm={sm} w={w}: {f} vs {b}");
        }
    }

    #[test]
    fn cell_probs() {
        let p = pair(0.5, 1.0);
        let cfg = QuantizerConfig::with_m(3);
        let c = quantized_cell_probs(&p, 0.0, Conditioning::Y(0.3), &cfg).unwrap();
        assert_eq!((c.first, c.probs.clone()), (2, alloc::vec![1.0]));
        for cond in [Conditioning::None, Conditioning::Y(0.3), Conditioning::X(-1.2)] {
            let c = quantized_cell_probs(&p, 0.4, cond, &cfg).unwrap();
            assert!((c.total() - 1.0).abs() < 1e-10);
            assert!(c.tail < 1e-10);
            assert_eq!(c.bound_tail.is_some(), cond == Conditioning::None);
        }
        // large noise, one bit: flat over many cells, each below w times the peak density
        let cfg1 = QuantizerConfig::with_m(1);
        let g = 20.0;
        let c = quantized_cell_probs(&p, g, Conditioning::None, &cfg1).unwrap();
        let peak = 0.5 / (2.0 * core::f64::consts::PI * (1.0 + g * g)).sqrt();
        assert!(c.probs.len() > 200);
        assert!(c.probs.iter().all(|&q| q < peak));
        assert!((c.total() - 1.0).abs() < 1e-10);
        // X conditioning shifts the mean by rho x
        let c = quantized_cell_probs(&p, 0.1, Conditioning::X(2.0), &cfg).unwrap();
        let mean: f64 = c.iter().map(|(k, q)| q * (k as f64 + 0.5) / 8.0).sum();
        assert!((mean - 0.5f64.sqrt() * 2.0).abs() < 1e-3);
    }

    #[test]
    fn truncation_failures_are_reported() {
        let p = pair(0.5, 1.0);
        let cfg = QuantizerConfig { k_trunc: Some(3), ..QuantizerConfig::with_m(4) };
        assert!(matches!(
            quantized_cell_probs(&p, 1.0, Conditioning::None, &cfg),
            Err(Error::TruncationInsufficient { .. })
        ));
        let cfg = QuantizerConfig { max_cells: 100, ..QuantizerConfig::with_m(8) };
        assert!(quantized_cell_probs(&p, 1.0, Conditioning::None, &cfg).is_err());
    }

    #[test]
    fn tail_bound_dominates_exact_tail() {
        let p = pair(0.5, 1.0);
        for (m, g) in [(2u32, 0.5f64), (4, 2.0), (6, 0.1)] {
            let w = exp2(-(m as f64));
            for k in [8u64, 64, 512] {
                let sd: f64 = (1.0f64 + g * g).sqrt();
                let exact = normal_sf((k + 1) as f64 * w / sd) + normal_sf(k as f64 * w / sd);
                let bound = analytic_tail_bound(&p, g, m, k);
                assert!(bound >= exact, "M={m} k={k}: {bound} < {exact}");
            }
        }
        // far enough out the bound itself certifies the truncation
        assert!(analytic_tail_bound(&p, 1.0, 4, 16 * 40) < 1e-10);
    }

    #[test]
    fn fine_quantization_approaches_the_gaussian_channel() {
        let p = pair(0.5, 1.0);
        let cfg = QuantizerConfig::with_m(8);
        let i = mutual_info_quantized(&p, 1.0, &cfg).unwrap();
        let a = additive_filter(&p, 1.0).unwrap();
        assert!((i.i_yz - 0.5).abs() < 0.01);
        assert!(i.i_yz <= a.i_yz + 1e-9 && i.i_xz <= a.i_xz + 1e-9);
        assert!(i.i_xz <= i.i_yz);
        let coarse = mutual_info_quantized(&p, 1.0, &QuantizerConfig::with_m(2)).unwrap();
        assert!((a.i_yz - coarse.i_yz) > (a.i_yz - i.i_yz));
        let huge = mutual_info_quantized(&p, 1e3, &cfg).unwrap();
        assert!(huge.i_yz < 1e-5 && huge.i_xz < 1e-5);
    }

    #[test]
    fn quantized_information_oracle_for_coarse_cells() {
        // direct double sum over cells for M = 1, against a dense midpoint oracle
        let p = pair(0.6, 1.0);
        let g = 0.2;
        let w = 0.5;
        let i = mutual_info_quantized(&p, g, &QuantizerConfig::with_m(1)).unwrap();
        let hz = brute_entropy(0.0, (1.0f64 + g * g).sqrt(), w);
        let hzy = brute_expected(g, 1.0, w);
        let hzx = brute_expected((0.4f64 + g * g).sqrt(), 0.6f64.sqrt(), w);
        assert!((i.i_yz - (hz - hzy)).abs() < 1e-6, "{} vs {}", i.i_yz, hz - hzy);
        assert!((i.i_xz - (hz - hzx)).abs() < 1e-6);
    }

    #[test]
    fn informations_fall_with_noise() {
        let p = pair(0.5, 1.0);
        let cfg = QuantizerConfig::with_m(4);
        let gs = log_space(0.01, 50.0, 40);
        let s = sweep_gamma(&p, &gs, &cfg, &Sequential).unwrap();
        for w in s.windows(2) {
            assert!(w[1].1.i_yz <= w[0].1.i_yz + 1e-9);
            assert!(w[1].1.i_xz <= w[0].1.i_xz + 1e-9);
        }
    }

    #[test]
    fn g_eps_m_respects_the_closed_form() {
        let p = pair(0.5, 1.0);
        let cfg = QuantizerConfig { gamma_grid: GammaGrid { points: 60, ..GammaGrid::default() }, ..QuantizerConfig::with_m(6) };
        for eps in [0.05, 0.2, 0.4] {
            let o = g_eps_m(&p, eps, &cfg).unwrap();
            assert!(o.i_xz <= eps);
            let g = g_gaussian(&p, eps).unwrap();
            assert!(o.value <= g + 1e-9, "{} > {g}", o.value);
            assert!(g - o.value < 0.05);
            // the chosen noise sits on the feasibility boundary
            assert!(eps - o.i_xz < 1e-9);
        }
        assert!(g_eps_m(&p, 0.5, &cfg).is_err());
        let narrow = QuantizerConfig { gamma_grid: GammaGrid { points: 5, lo: 1e-3, hi: 1e-2, refine: 0 }, ..cfg };
        assert_eq!(g_eps_m(&p, 0.05, &narrow), Err(Error::NoFeasibleGamma));
    }

    #[test]
    fn convergence_report_shape() {
        let p = pair(0.5, 1.0);
        let cfg = QuantizerConfig { gamma_grid: GammaGrid { points: 40, ..GammaGrid::default() }, ..QuantizerConfig::default() };
        let r = convergence_report(&p, 0.2, &[2, 4, 6], &cfg, &Sequential).unwrap();
        assert_eq!(r.rows.len(), 3);
        // 40-digit reference: at M = 2 the quantized filter edges past the
        // additive-Gaussian optimum, g_eps - g_{eps,2} = -1.25553522e-11
        assert!((r.rows[0].gap + 1.255_535_22e-11).abs() < 1e-12, "{}", r.rows[0].gap);
        assert!(r.rows.iter().all(|row| row.gap.abs() < 1e-10));
        assert!(r.entropy_excess_monotone);
        assert!(r.rows.windows(2).all(|w| w[1].entropy_excess < w[0].entropy_excess));
        let one = convergence_report(&p, 0.2, &[3], &cfg, &Sequential).unwrap();
        assert!(one.gaps_shrinking && one.entropy_excess_monotone);
        assert!(convergence_report(&p, 0.2, &[4, 2], &cfg, &Sequential).is_err());
    }
}
