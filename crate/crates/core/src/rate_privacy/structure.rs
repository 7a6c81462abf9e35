use alloc::vec;
use alloc::vec::Vec;

use crate::dependence::weak_independence;
use crate::math::{ln, log2};
use crate::prob::{kl_of, mutual_information_of, Channel, Divergence, JointDistribution};
use crate::{Error, Result};

use super::uniform_y;

const STRUCT_TOL: f64 = 1e-9;

fn eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= STRUCT_TOL
}

/// Involution `x -> -x` on the output alphabet under which the second row of
/// a binary-input channel is the first row reflected, if one exists.
///
/// Fixed points play the role of the split zero symbol and need equal mass in
/// both rows.
pub(crate) fn biso_pairing(reverse: &Channel) -> Result<Option<Vec<usize>>> {
    if reverse.n_in() != 2 {
        return Err(Error::NotBinaryInput(reverse.n_in()));
    }
    let (r0, r1) = (reverse.row(0), reverse.row(1));
    let n = r0.len();
    let mut pair = vec![usize::MAX; n];
    fn search(x: usize, r0: &[f64], r1: &[f64], pair: &mut [usize]) -> bool {
        let n = r0.len();
        let Some(x) = (x..n).find(|&i| pair[i] == usize::MAX) else {
            return true;
        };
        if eq(r0[x], r1[x]) {
            pair[x] = x;
            if search(x + 1, r0, r1, pair) {
                return true;
            }
            pair[x] = usize::MAX;
        }
        for y in x + 1..n {
            if pair[y] == usize::MAX && eq(r1[x], r0[y]) && eq(r1[y], r0[x]) {
                pair[x] = y;
                pair[y] = x;
                if search(x + 1, r0, r1, pair) {
                    return true;
                }
                pair[x] = usize::MAX;
                pair[y] = usize::MAX;
            }
        }
        false
    }
    Ok(search(0, r0, r1, &mut pair).then_some(pair))
}

/// Whether a binary-input reverse channel `P_{X|Y}` is binary-input
/// symmetric-output: `P(x|1) = P(-x|0)` for some involution on the outputs.
pub fn detect_biso(reverse_channel: &Channel) -> Result<bool> {
    Ok(biso_pairing(reverse_channel)?.is_some())
}

/// Erasure layout of a forward channel: `(delta, erasure column, column hit by each input)`.
pub(crate) fn erasure_layout(ch: &Channel) -> Option<(f64, Option<usize>, Vec<usize>)> {
    let (m, n) = (ch.n_in(), ch.n_out());
    let hits = |skip: Option<usize>, keep: f64| -> Option<Vec<usize>> {
        let mut used = vec![false; n];
        let mut hit = Vec::with_capacity(m);
        for r in ch.rows() {
            let mut found = None;
            for (j, &v) in r.iter().enumerate() {
                if Some(j) == skip {
                    continue;
                }
                if eq(v, keep) && found.is_none() && !used[j] {
                    found = Some(j);
                } else if !eq(v, 0.0) {
                    return None;
                }
            }
            let j = found?;
            used[j] = true;
            hit.push(j);
        }
        Some(hit)
    };
    if n == m {
        return hits(None, 1.0).map(|h| (0.0, None, h));
    }
    if n != m + 1 {
        return None;
    }
    for c in 0..n {
        let delta = ch.row(0)[c];
        if !(delta > STRUCT_TOL && delta < 1.0 - STRUCT_TOL) {
            continue;
        }
        if ch.rows().iter().any(|r| !eq(r[c], delta)) {
            continue;
        }
        if let Some(h) = hits(Some(c), 1.0 - delta) {
            return Some((delta, Some(c), h));
        }
    }
    None
}

/// Erasure probability `delta` when `P_{Y|X}` passes each input through
/// w.p. `1 - delta` and otherwise emits a common erasure symbol. A
/// permutation channel reports `0`.
pub fn detect_erasure(forward_channel: &Channel) -> Option<f64> {
    erasure_layout(forward_channel).map(|(d, _, _)| d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormKind {
    /// BISO reverse channel with uniform binary `Y`: `g = min(eps, I) / I`.
    BisoUniform,
    /// Erasure observation channel: `g = H(Y|X) + min(eps, I)`.
    Erasure,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    pub value: f64,
    pub kind: ClosedFormKind,
}

/// Exact `g_eps` for the families where it is known in closed form.
pub fn closed_form(joint: &JointDistribution, eps: f64) -> Option<ClosedForm> {
    if !eps.is_finite() || eps < 0.0 {
        return None;
    }
    let mi = joint.mutual_information();
    let m = joint.marginals();
    if joint.ny() == 2 && mi > 0.0 && uniform_y(joint) && detect_biso(&m.x_given_y).ok()? {
        return Some(ClosedForm {
            value: eps.min(mi) / mi * joint.entropy_y(),
            kind: ClosedFormKind::BisoUniform,
        });
    }
    detect_erasure(&m.y_given_x).map(|_| ClosedForm {
        value: joint.conditional_entropy() + eps.min(mi),
        kind: ClosedFormKind::Erasure,
    })
}

/// `D(P_{X|Y}(.|y) || P_X)` for every `y`.
pub(crate) fn posterior_divergences(joint: &JointDistribution) -> Vec<Divergence> {
    let m = joint.marginals();
    let px = m.px.probs();
    m.x_given_y.rows().iter().map(|r| kl_of(r, px)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slope {
    Finite(f64),
    Infinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeBound {
    pub bound: Slope,
    /// Index into the `Y` alphabet of the maximizing symbol.
    pub argmax: usize,
    /// `-log2 P_Y(y) / D(P_{X|Y}(.|y) || P_X)` per `y`.
    pub ratios: Vec<Slope>,
}

fn ratios(joint: &JointDistribution) -> Result<Vec<Slope>> {
    if weak_independence(joint).weakly_independent {
        return Err(Error::WeaklyIndependent);
    }
    let py = joint.py();
    Ok(posterior_divergences(joint)
        .into_iter()
        .zip(&py)
        .map(|(d, &p)| match d {
            Divergence::Finite(d) if d > 0.0 => Slope::Finite(-log2(p) / d),
            _ => Slope::Infinite,
        })
        .collect())
}

/// Lower bound on the slope of `g_eps` at `eps = 0` when `g_0 = 0`, from the
/// singleton probe filters.
pub fn slope_bound_at_zero(joint: &JointDistribution) -> Result<SlopeBound> {
    let ratios = ratios(joint)?;
    let mut argmax = 0;
    for (i, r) in ratios.iter().enumerate() {
        let better = match (*r, ratios[argmax]) {
            (Slope::Infinite, Slope::Finite(_)) => true,
            (Slope::Finite(a), Slope::Finite(b)) => a > b,
            _ => false,
        };
        if better {
            argmax = i;
        }
    }
    Ok(SlopeBound { bound: ratios[argmax], argmax, ratios })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Linearity {
    /// `g_eps = eps H(Y) / I(X;Y)` on `[0, I]`.
    Linear,
    /// The slope test cannot rule linearity out.
    LinearPossible,
    /// `g_eps > eps H(Y) / I(X;Y)` strictly for interior `eps`.
    NotLinear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearityReport {
    pub verdict: Linearity,
    pub ratios: Vec<Slope>,
}

/// Whether `g_eps` can be the straight line from the origin to `(I, H(Y))`.
///
/// Needs `g_0 = 0`. Linearity forces all probe slopes to coincide; for a BISO
/// reverse channel it holds exactly when `Y` is uniform.
pub fn linearity_test(joint: &JointDistribution) -> Result<LinearityReport> {
    let ratios = ratios(joint)?;
    let finite: Option<Vec<f64>> = ratios
        .iter()
        .map(|r| match r {
            Slope::Finite(v) => Some(*v),
            Slope::Infinite => None,
        })
        .collect();
    let constant = finite.is_some_and(|v| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo <= STRUCT_TOL * hi.max(1.0)
    });
    let mut verdict = if constant { Linearity::LinearPossible } else { Linearity::NotLinear };
    if verdict == Linearity::LinearPossible
        && joint.ny() == 2
        && detect_biso(&joint.marginals().x_given_y)?
        && uniform_y(joint)
    {
        verdict = Linearity::Linear;
    }
    Ok(LinearityReport { verdict, ratios })
}

/// Capacity of a BISO reverse channel, attained by the uniform input.
pub(crate) fn biso_capacity(reverse: &Channel) -> f64 {
    let m: Vec<Vec<f64>> =
        reverse.rows().iter().map(|r| r.iter().map(|v| 0.5 * v).collect()).collect();
    mutual_information_of(&m)
}

/// Both sides of the reflected-mixture divergence inequality
/// `D(P || R_{1-l}) / D(P || R_l) < log(1-l) / log(l)`, where
/// `R_l = l P + (1-l) Q` and `Q(x) = P(pairing[x])`.
///
/// Returns `(lhs, rhs)`; `lhs` is `None` when `P = Q`, making both divergences vanish.
pub fn mirrored_divergence_ratio(p: &[f64], pairing: &[usize], lambda: f64) -> Result<(Option<f64>, f64)> {
    if !(lambda > 0.0 && lambda < 0.5) {
        return Err(Error::OutOfRange { what: "lambda", value: lambda });
    }
    if pairing.len() != p.len() || pairing.iter().enumerate().any(|(i, &j)| j >= p.len() || pairing[j] != i) {
        return Err(Error::ShapeMismatch("pairing must be an involution on the alphabet".into()));
    }
    let q: Vec<f64> = pairing.iter().map(|&j| p[j]).collect();
    let mix = |l: f64| -> Vec<f64> { p.iter().zip(&q).map(|(a, b)| l * a + (1.0 - l) * b).collect() };
    let d = |r: &[f64]| kl_of(p, r).finite().unwrap_or(f64::INFINITY);
    let (num, den) = (d(&mix(1.0 - lambda)), d(&mix(lambda)));
    let rhs = ln(1.0 - lambda) / ln(lambda);
    Ok(((den > 0.0).then(|| num / den), rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::binary_entropy;
    use crate::prob::ProbVector;
    use crate::testutil::{bsc_joint, erasure_joint, random_joint, Rng};

    #[test]
    fn biso_examples() {
        assert!(detect_biso(&Channel::bsc(0.2).unwrap()).unwrap());
        assert!(detect_biso(&Channel::bec(0.3).unwrap()).unwrap());
        let ch = Channel::from_rows(vec![vec![0.7, 0.2, 0.1], vec![0.6, 0.3, 0.1]]).unwrap();
        assert!(!detect_biso(&ch).unwrap());
        let ch = Channel::from_rows(vec![vec![0.5, 0.5], vec![0.5, 0.5], vec![1.0, 0.0]]).unwrap();
        assert_eq!(detect_biso(&ch), Err(Error::NotBinaryInput(3)));
        // reflected rows over a 5-letter alphabet with a zero symbol in the middle
        let r0 = vec![0.4, 0.1, 0.2, 0.25, 0.05];
        let r1: Vec<f64> = r0.iter().rev().copied().collect();
        assert!(detect_biso(&Channel::from_rows(vec![r0, r1]).unwrap()).unwrap());
    }

    #[test]
    fn erasure_detection() {
        assert_eq!(detect_erasure(&Channel::bec(0.3).unwrap()), Some(0.3));
        assert_eq!(detect_erasure(&Channel::identity(&crate::testutil::labels(3))), Some(0.0));
        assert_eq!(detect_erasure(&Channel::bsc(0.1).unwrap()), None);
        let j = erasure_joint(&[0.2, 0.5, 0.3], 0.4);
        let d = detect_erasure(&j.marginals().y_given_x).unwrap();
        assert!((d - 0.4).abs() < 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        let j = bsc_joint(0.5, 0.25);
        let c = closed_form(&j, 0.1).unwrap();
        assert_eq!(c.kind, ClosedFormKind::BisoUniform);
        assert!((c.value - 0.1 / (1.0 - binary_entropy(0.25).unwrap())).abs() < 1e-12);
        assert!((c.value - 0.529_880_278_7).abs() < 1e-9);

        let px = ProbVector::bernoulli(0.4).unwrap();
        let j = JointDistribution::from_input_and_channel(&px, &Channel::bec(0.3).unwrap()).unwrap();
        let c = closed_form(&j, 0.2).unwrap();
        assert_eq!(c.kind, ClosedFormKind::Erasure);
        assert!((c.value - (binary_entropy(0.3).unwrap() + 0.2)).abs() < 1e-12);

        let mut rng = Rng::new(4);
        assert!(closed_form(&random_joint(&mut rng, 3, 3), 0.1).is_none());
        assert!(closed_form(&bsc_joint(0.3, 0.2), 0.1).is_none());
    }

    #[test]
    fn slope_bound_for_uniform_bsc_is_h_over_i() {
        for a in [0.05, 0.1, 0.25, 0.4] {
            let j = bsc_joint(0.5, a);
            let s = slope_bound_at_zero(&j).unwrap();
            let expected = 1.0 / (1.0 - binary_entropy(a).unwrap());
            match s.bound {
                Slope::Finite(v) => assert!((v - expected).abs() < 1e-9),
                Slope::Infinite => panic!(),
            }
            assert_eq!(s.argmax, 0);
        }
    }

    #[test]
    fn slope_bound_asymmetric_bsc_takes_the_max() {
        let j = bsc_joint(0.3, 0.2);
        let s = slope_bound_at_zero(&j).unwrap();
        let m = j.marginals();
        let r: Vec<f64> = (0..2)
            .map(|y| {
                -log2(m.py.probs()[y]) / kl_of(m.x_given_y.row(y), m.px.probs()).finite().unwrap()
            })
            .collect();
        assert!((r[0] - r[1]).abs() > 1e-3);
        let best = r[0].max(r[1]);
        assert_eq!(s.bound, Slope::Finite(best));
        assert_eq!(s.argmax, if r[0] >= r[1] { 0 } else { 1 });
    }

    #[test]
    fn slope_and_linearity_reject_weak_independence() {
        let j = erasure_joint(&[0.5, 0.5], 0.3);
        assert_eq!(slope_bound_at_zero(&j), Err(Error::WeaklyIndependent));
        assert_eq!(linearity_test(&j), Err(Error::WeaklyIndependent));
    }

    #[test]
    fn linearity_verdicts() {
        let lin = linearity_test(&bsc_joint(0.5, 0.1)).unwrap();
        assert_eq!(lin.verdict, Linearity::Linear);
        assert_eq!(linearity_test(&bsc_joint(0.3, 0.1)).unwrap().verdict, Linearity::NotLinear);
        // reverse channel BSC(a0) with non-uniform Y
        let (a0, p) = (0.2, 0.3);
        let m = vec![vec![(1.0 - p) * (1.0 - a0), p * a0], vec![(1.0 - p) * a0, p * (1.0 - a0)]];
        let j = JointDistribution::from_matrix(m).unwrap();
        assert_eq!(linearity_test(&j).unwrap().verdict, Linearity::NotLinear);
    }

    #[test]
    fn linear_implies_slope_equals_h_over_i() {
        for a in [0.1, 0.3] {
            let j = bsc_joint(0.5, a);
            assert_eq!(linearity_test(&j).unwrap().verdict, Linearity::Linear);
            let Slope::Finite(s) = slope_bound_at_zero(&j).unwrap().bound else { panic!() };
            assert!((s - j.entropy_y() / j.mutual_information()).abs() < 1e-9);
        }
    }

    #[test]
    fn mirrored_inequality_on_random_instances() {
        let mut rng = Rng::new(12);
        for _ in 0..100 {
            let n = 2 + rng.below(5);
            let p = rng.dirichlet(n);
            let pairing: Vec<usize> = (0..n).rev().collect();
            for l in [0.1, 0.3] {
                let (lhs, rhs) = mirrored_divergence_ratio(&p, &pairing, l).unwrap();
                if let Some(lhs) = lhs {
                    assert!(lhs < rhs, "{lhs} >= {rhs}");
                }
            }
        }
        assert!(mirrored_divergence_ratio(&[0.5, 0.5], &[0, 1], 0.6).is_err());
        assert!(mirrored_divergence_ratio(&[0.5, 0.5], &[1, 1], 0.1).is_err());
    }

    #[test]
    fn biso_capacity_matches_uniform_mi() {
        let j = bsc_joint(0.5, 0.25);
        let c = biso_capacity(&j.marginals().x_given_y);
        assert!((c - j.mutual_information()).abs() < 1e-12);
    }
}
