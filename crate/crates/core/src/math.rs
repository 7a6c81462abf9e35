//! Scalar helpers: logarithms, the binary entropy function and bisection.

use crate::{Error, Result};

/// Probabilities below this are treated as exact zeros inside entropy sums.
pub const ZERO_PROB: f64 = 1e-15;

#[inline]
pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn exp2(x: f64) -> f64 {
    libm::exp2(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

/// `-p log2 p`, zero below [`ZERO_PROB`].
#[inline]
pub fn neg_plogp(p: f64) -> f64 {
    if p <= ZERO_PROB {
        0.0
    } else {
        -p * log2(p)
    }
}

/// `a * b = a(1-b) + b(1-a)`, the crossover probability of two cascaded BSCs.
#[inline]
pub fn binary_convolution(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}

/// `h_b(a) = -a log2 a - (1-a) log2 (1-a)`.
pub fn binary_entropy(a: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::OutOfRange { what: "probability", value: a });
    }
    Ok(neg_plogp(a) + neg_plogp(1.0 - a))
}

/// Inverse of `h_b` on the increasing branch, mapping `[0, 1]` to `[0, 1/2]`.
pub fn binary_entropy_inv(h: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&h) {
        return Err(Error::OutOfRange { what: "binary entropy", value: h });
    }
    if h == 0.0 {
        return Ok(0.0);
    }
    if h == 1.0 {
        return Ok(0.5);
    }
    Ok(bisect_increasing(|a| neg_plogp(a) + neg_plogp(1.0 - a) - h, 0.0, 0.5, 1e-15, 200))
}

/// Root of an increasing function on `[lo, hi]` by bisection.
///
/// Assumes `f(lo) <= 0 <= f(hi)`; returns the midpoint of the final bracket.
pub fn bisect_increasing<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: usize,
) -> f64 {
    for _ in 0..max_iter {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
