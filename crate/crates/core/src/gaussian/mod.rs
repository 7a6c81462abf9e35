//! Jointly Gaussian sources.
//!
//! `(X, Y)` is a centered Gaussian pair with squared correlation `rho2` and
//! `var(Y) = var_y`; `X` is taken standardized wherever a value of `X` is
//! needed. Maximal correlation of a Gaussian pair equals the absolute Pearson
//! correlation, which is what makes the `g_hat` closed form available.

pub mod quadrature;
pub mod quantized;

use crate::math::{exp2, log2, sqrt};
use crate::{Error, Result};

pub use quantized::{
    convergence_report, g_eps_m, g_eps_m_in, gamma_grid, mutual_info_quantized,
    analytic_tail_bound, quantized_cell_probs, sweep_gamma, CellProbs, Conditioning,
    ConvergenceReport, ConvergenceRow, GammaGrid, QuantizedInfo, QuantizedOptimum,
    QuantizerConfig,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPair {
    rho2: f64,
    var_y: f64,
}

impl GaussianPair {
    pub fn new(rho2: f64, var_y: f64) -> Result<Self> {
        if !rho2.is_finite() || rho2 <= 0.0 || rho2 >= 1.0 {
            return Err(Error::InvalidGaussianPair(alloc::format!(
                "rho2 = {rho2} must lie strictly between 0 and 1"
            )));
        }
        if !var_y.is_finite() || var_y <= 0.0 {
            return Err(Error::InvalidGaussianPair(alloc::format!(
                "var_y = {var_y} must be positive"
            )));
        }
        Ok(Self { rho2, var_y })
    }

    /// Unit-variance `Y`.
    pub fn standard(rho2: f64) -> Result<Self> {
        Self::new(rho2, 1.0)
    }

    pub fn rho2(&self) -> f64 {
        self.rho2
    }

    pub fn var_y(&self) -> f64 {
        self.var_y
    }

    /// `I(X;Y) = -1/2 log2(1 - rho2)`.
    pub fn mutual_information(&self) -> f64 {
        -0.5 * log2(1.0 - self.rho2)
    }
}

fn check_below_mi(pair: &GaussianPair, eps: f64) -> Result<f64> {
    let mi = pair.mutual_information();
    if !eps.is_finite() || eps < 0.0 {
        return Err(Error::EpsilonOutOfRange { epsilon: eps, max: mi });
    }
    let slack = exp2(-2.0 * eps) + pair.rho2 - 1.0;
    if eps >= mi || slack <= 0.0 {
        return Err(Error::EpsilonAtOrAboveMI { epsilon: eps, mi });
    }
    Ok(slack)
}

/// `g_eps(X;Y) = 1/2 log2(rho2 / (2^{-2 eps} + rho2 - 1))`, attained by
/// additive Gaussian noise. Diverges as `eps` approaches `I(X;Y)`.
pub fn g_gaussian(pair: &GaussianPair, eps: f64) -> Result<f64> {
    let slack = check_below_mi(pair, eps)?;
    Ok((0.5 * log2(pair.rho2 / slack)).max(0.0))
}

/// `g_hat_eps(X;Y) = 1/2 log2(rho2 / (rho2 - eps))`.
pub fn g_hat_gaussian(pair: &GaussianPair, eps: f64) -> Result<f64> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(Error::EpsilonOutOfRange { epsilon: eps, max: pair.rho2 });
    }
    if eps >= pair.rho2 {
        return Err(Error::EpsilonAtOrAboveRho2 { epsilon: eps, rho2: pair.rho2 });
    }
    Ok(0.5 * log2(pair.rho2 / (pair.rho2 - eps)))
}

/// Smallest noise standard deviation `gamma` for which `Y + gamma N` leaks at
/// most `eps` bits about `X`.
pub fn gamma_star(pair: &GaussianPair, eps: f64) -> Result<f64> {
    let mi = pair.mutual_information();
    if !eps.is_finite() || eps <= 0.0 || eps >= mi {
        return Err(Error::EpsilonOutOfRange { epsilon: eps, max: mi });
    }
    let t = exp2(-2.0 * eps);
    Ok(sqrt((t + pair.rho2 - 1.0) / (1.0 - t) * pair.var_y))
}

/// Smallest noise standard deviation meeting `rho_m^2(X; Y + gamma N) <= eps`.
pub fn gamma_hat(pair: &GaussianPair, eps: f64) -> Result<f64> {
    if !eps.is_finite() || eps <= 0.0 || eps >= pair.rho2 {
        return Err(Error::EpsilonOutOfRange { epsilon: eps, max: pair.rho2 });
    }
    Ok(sqrt((pair.rho2 - eps) * pair.var_y / eps))
}

/// `var_y 2^{-2 g_eps}`: no filter within the leakage budget estimates `Y`
/// with smaller mean squared error.
pub fn mmse_lower_bound(pair: &GaussianPair, eps: f64) -> Result<f64> {
    let g = g_gaussian(pair, eps)?;
    Ok(pair.var_y * exp2(-2.0 * g))
}

/// The additive filter `Z = Y + gamma N` with independent standard normal `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdditiveFilter {
    pub i_xz: f64,
    pub i_yz: f64,
    pub rho2_xz: f64,
    /// `mmse(Y | Z)`.
    pub mmse: f64,
}

pub fn additive_filter(pair: &GaussianPair, gamma: f64) -> Result<AdditiveFilter> {
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::OutOfRange { what: "gamma", value: gamma });
    }
    let (v, g2) = (pair.var_y, gamma * gamma);
    if g2 == 0.0 {
        return Ok(AdditiveFilter {
            i_xz: pair.mutual_information(),
            i_yz: f64::INFINITY,
            rho2_xz: pair.rho2,
            mmse: 0.0,
        });
    }
    let rho2_xz = pair.rho2 * v / (v + g2);
    Ok(AdditiveFilter {
        i_xz: -0.5 * log2(1.0 - rho2_xz),
        i_yz: 0.5 * log2(1.0 + v / g2),
        rho2_xz,
        mmse: v * g2 / (v + g2),
    })
}
