use alloc::string::String;
use alloc::vec::Vec;

use crate::prob::{index_labels, Channel, JointDistribution, ProbVector};
pub use crate::rng::SeededRng as Rng;

pub fn labels(n: usize) -> Vec<String> {
    index_labels(n)
}

/// Random joint with every entry bounded away from zero.
pub fn random_joint(rng: &mut Rng, nx: usize, ny: usize) -> JointDistribution {
    let m: Vec<Vec<f64>> = (0..nx)
        .map(|_| (0..ny).map(|_| 0.05 + rng.uniform()).collect())
        .collect();
    let total: f64 = m.iter().flatten().sum();
    let m = m.into_iter().map(|r| r.into_iter().map(|v| v / total).collect()).collect();
    JointDistribution::from_matrix(m).unwrap()
}

pub fn random_channel(rng: &mut Rng, n_in: usize, n_out: usize) -> Channel {
    Channel::from_rows((0..n_in).map(|_| rng.dirichlet(n_out)).collect()).unwrap()
}

pub fn bsc_joint(p: f64, alpha: f64) -> JointDistribution {
    JointDistribution::from_input_and_channel(
        &ProbVector::bernoulli(p).unwrap(),
        &Channel::bsc(alpha).unwrap(),
    )
    .unwrap()
}

pub fn erasure_joint(px: &[f64], delta: f64) -> JointDistribution {
    let px = ProbVector::from_probs(px.to_vec()).unwrap();
    let ch = Channel::erasure(px.labels(), delta).unwrap();
    JointDistribution::from_input_and_channel(&px, &ch).unwrap()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
