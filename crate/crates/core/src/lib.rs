//! Privacy-constrained information extraction over finite alphabets.
//!
//! The crate computes rate-privacy functions: the largest amount of
//! information `I(Y;Z)` a randomized filter `P_{Z|Y}` can release about
//! observable data `Y` while the leakage about correlated private data `X`
//! stays below a threshold, measured either by mutual information or by the
//! squared maximal correlation. Alongside the numerical solver it provides
//! the bounds and closed forms that certify solver output, explicit filter
//! constructions, dependence measures (maximal correlation, Poincaré
//! constant, MMSE) and the jointly Gaussian variants including the
//! quantized additive-noise filter family.
//!
//! Everything here is `no_std` + `alloc`; file formats, the command-line
//! front end and thread-level parallelism live in the `privex` crate.
//!
//! All information quantities are in bits.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod math;
pub mod prob;
pub mod linalg;
pub mod dependence;
pub mod exec;
pub mod filters;
pub mod rate_privacy;
pub mod gaussian;
pub mod rng;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use prob::{
    compose, entropy, kl_divergence, push_joint, validate_joint, Channel, Divergence,
    JointDistribution, Marginals, ProbVector,
};
