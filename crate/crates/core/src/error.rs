use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Every failure the library reports.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    NegativeEntry { row: usize, col: usize, value: f64 },
    NonFiniteEntry { row: usize, col: usize },
    ZeroTotalMass,
    /// Total mass is off by more than the renormalization tolerance.
    NotNormalized { sum: f64 },
    ShapeMismatch(String),
    AlphabetMismatch(String),
    OutOfRange { what: &'static str, value: f64 },
    EpsilonOutOfRange { epsilon: f64, max: f64 },
    DeltaOutOfRange(f64),
    IndependentSources,
    UnknownSymbol(String),
    NotBinaryInput(usize),
    WeaklyIndependent,
    RateUnachievable { rate: f64, max: f64 },
    ConstantFunction,
    EpsilonAtOrAboveMI { epsilon: f64, mi: f64 },
    EpsilonAtOrAboveRho2 { epsilon: f64, rho2: f64 },
    InvalidGaussianPair(String),
    TruncationInsufficient { tail: f64 },
    QuadratureNotConverged { change: f64 },
    NoFeasibleGamma,
    InvalidConfig(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NegativeEntry { row, col, value } => {
                write!(f, "negative probability {value} at ({row}, {col})")
            }
            Error::NonFiniteEntry { row, col } => write!(f, "non-finite entry at ({row}, {col})"),
            Error::ZeroTotalMass => f.write_str("distribution has zero total mass"),
            Error::NotNormalized { sum } => write!(f, "probabilities sum to {sum}, expected 1"),
            Error::ShapeMismatch(msg) => write!(f, "shape mismatch: {msg}"),
            Error::AlphabetMismatch(msg) => write!(f, "alphabet mismatch: {msg}"),
            Error::OutOfRange { what, value } => write!(f, "{what} = {value} is out of range"),
            Error::EpsilonOutOfRange { epsilon, max } => {
                write!(f, "epsilon {epsilon} outside [0, {max}]")
            }
            Error::DeltaOutOfRange(d) => write!(f, "delta {d} outside [0, 1]"),
            Error::IndependentSources => f.write_str("X and Y are independent (I(X;Y) = 0)"),
            Error::UnknownSymbol(s) => write!(f, "unknown symbol {s:?}"),
            Error::NotBinaryInput(n) => write!(f, "channel has {n} inputs, expected 2"),
            Error::WeaklyIndependent => {
                f.write_str("X is weakly independent of Y (perfect privacy is achievable)")
            }
            Error::RateUnachievable { rate, max } => {
                write!(f, "rate {rate} exceeds H(Y) = {max}")
            }
            Error::ConstantFunction => f.write_str("function has zero variance"),
            Error::EpsilonAtOrAboveMI { epsilon, mi } => {
                write!(f, "epsilon {epsilon} must be below I(X;Y) = {mi}")
            }
            Error::EpsilonAtOrAboveRho2 { epsilon, rho2 } => {
                write!(f, "epsilon {epsilon} must be below rho^2 = {rho2}")
            }
            Error::InvalidGaussianPair(msg) => write!(f, "invalid Gaussian pair: {msg}"),
            Error::TruncationInsufficient { tail } => {
                write!(f, "quantizer truncation leaves tail mass {tail:e}")
            }
            Error::QuadratureNotConverged { change } => {
                write!(f, "quadrature changed by {change:e} when doubling nodes")
            }
            Error::NoFeasibleGamma => f.write_str("no noise level on the grid meets the privacy constraint"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
