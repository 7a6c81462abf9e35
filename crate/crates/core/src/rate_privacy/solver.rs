use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dependence::{maximal_correlation, maximal_correlation_sq_of};
use crate::exec::{ParallelMap, Sequential};
use crate::filters::{audit_filter, erasure_wrapper, FEASIBILITY_SLACK};
use crate::linalg::{solve_lp, LpOutcome};
use crate::math::log2;
use crate::prob::{kl_of, Channel, JointDistribution};
use crate::rng::{derive_seed, SeededRng};
use crate::{Error, Result};

use super::bounds::{bounds_from, Bounds};
use super::perfect::{self, PerfectPrivacy};
use super::{check_epsilon, z_labels, PrivacyMeasure, RatePrivacyPoint, SolverConfig};

const TINY: f64 = 1e-300;
const SMOOTHING: f64 = 0.03;
const MAX_STEP: f64 = 1e3;

/// A posterior `P_{Y|Z=z}` with its two divergences: `D(P_{X|Z=z} || P_X)`
/// and `D(P_{Y|Z=z} || P_Y)`. Mixing posteriors with weights `P_Z` gives
/// `I(X;Z)` and `I(Y;Z)` as the weighted sums.
#[derive(Debug, Clone)]
pub(crate) struct Column {
    pub q: Vec<f64>,
    pub dx: f64,
    pub dy: f64,
}

/// Dense copy of the joint used by the inner loops.
#[derive(Debug, Clone)]
pub(crate) struct Problem {
    pub nx: usize,
    pub ny: usize,
    pub pxy: Vec<Vec<f64>>,
    pub px: Vec<f64>,
    pub py: Vec<f64>,
    /// `[y][x]`
    pub x_given_y: Vec<Vec<f64>>,
    pub hy: f64,
    pub mi: f64,
}

pub(crate) struct Eval {
    pub iyz: f64,
    pub ixz: f64,
    pub g_yz: Vec<f64>,
    pub g_xz: Vec<f64>,
}

impl Problem {
    pub fn new(joint: &JointDistribution) -> Self {
        let m = joint.marginals();
        Problem {
            nx: joint.nx(),
            ny: joint.ny(),
            pxy: joint.matrix().to_vec(),
            px: m.px.probs().to_vec(),
            py: m.py.probs().to_vec(),
            x_given_y: m.x_given_y.rows().to_vec(),
            hy: joint.entropy_y(),
            mi: joint.mutual_information(),
        }
    }

    pub fn column(&self, mut q: Vec<f64>) -> Column {
        let s: f64 = q.iter().sum();
        for v in &mut q {
            *v = (*v / s).max(0.0);
        }
        let mut mix = vec![0.0; self.nx];
        for (qy, row) in q.iter().zip(&self.x_given_y) {
            for (m, &p) in mix.iter_mut().zip(row) {
                *m += qy * p;
            }
        }
        let dx = kl_of(&mix, &self.px).finite().unwrap_or(f64::INFINITY);
        let dy = kl_of(&q, &self.py).finite().unwrap_or(f64::INFINITY);
        Column { q, dx: if dx < 1e-14 { 0.0 } else { dx }, dy }
    }

    pub fn point_masses(&self) -> Vec<Column> {
        (0..self.ny)
            .map(|y| {
                let mut q = vec![0.0; self.ny];
                q[y] = 1.0;
                self.column(q)
            })
            .collect()
    }

    /// Posteriors of the non-empty outputs of a flat `|Y| x nz` filter.
    pub fn posteriors(&self, w: &[f64], nz: usize) -> Vec<Column> {
        (0..nz)
            .filter_map(|z| {
                let q: Vec<f64> = (0..self.ny).map(|y| self.py[y] * w[y * nz + z]).collect();
                let pz: f64 = q.iter().sum();
                (pz > 1e-13).then(|| self.column(q))
            })
            .collect()
    }

    fn pxz(&self, w: &[f64], nz: usize) -> Vec<Vec<f64>> {
        self.pxy
            .iter()
            .map(|r| {
                let mut out = vec![0.0; nz];
                for (y, &a) in r.iter().enumerate() {
                    if a != 0.0 {
                        for (o, &v) in out.iter_mut().zip(&w[y * nz..(y + 1) * nz]) {
                            *o += a * v;
                        }
                    }
                }
                out
            })
            .collect()
    }

    pub fn rho2(&self, w: &[f64], nz: usize) -> f64 {
        maximal_correlation_sq_of(&self.pxz(w, nz))
    }

    /// `I(Y;Z)`, `I(X;Z)` and, on request, their gradients in the filter entries.
    pub fn eval(&self, w: &[f64], nz: usize, grad: bool) -> Eval {
        let (nx, ny) = (self.nx, self.ny);
        let mut pz = vec![0.0; nz];
        for y in 0..ny {
            for z in 0..nz {
                pz[z] += self.py[y] * w[y * nz + z];
            }
        }
        let pxz = self.pxz(w, nz);
        let mut iyz = 0.0;
        for y in 0..ny {
            for z in 0..nz {
                let v = w[y * nz + z];
                if v > 0.0 && pz[z] > 0.0 {
                    iyz += self.py[y] * v * log2(v / pz[z]);
                }
            }
        }
        let mut ixz = 0.0;
        for x in 0..nx {
            for z in 0..nz {
                let v = pxz[x][z];
                if v > 0.0 {
                    ixz += v * log2(v / (self.px[x] * pz[z]));
                }
            }
        }
        let (mut g_yz, mut g_xz) = (Vec::new(), Vec::new());
        if grad {
            g_yz = vec![0.0; ny * nz];
            g_xz = vec![0.0; ny * nz];
            for y in 0..ny {
                let py = self.py[y];
                for z in 0..nz {
                    let i = y * nz + z;
                    if pz[z] > TINY {
                        g_yz[i] = py * log2(w[i].max(TINY) / pz[z]);
                        g_xz[i] = (0..nx)
                            .map(|x| {
                                let a = self.pxy[x][y];
                                if a > 0.0 {
                                    a * log2(pxz[x][z].max(TINY) / (self.px[x] * pz[z]))
                                } else {
                                    0.0
                                }
                            })
                            .sum();
                    } else {
                        // directional derivative along e_y into an unused output
                        let d = kl_of(&self.x_given_y[y], &self.px).finite().unwrap_or(0.0);
                        g_yz[i] = -py * log2(py);
                        g_xz[i] = py * d;
                    }
                }
            }
        }
        Eval { iyz: iyz.max(0.0), ixz: ixz.max(0.0), g_yz, g_xz }
    }

    /// Best mixture of the given posteriors whose weighted `dx` stays within
    /// `eps`; a linear program in the weights. Returns `(weight, column)` pairs.
    pub fn mix(&self, cols: &[Column], eps: f64) -> Option<Vec<(f64, usize)>> {
        let cols_ok: Vec<usize> = (0..cols.len()).filter(|&j| cols[j].dx.is_finite()).collect();
        let n = cols_ok.len();
        let mut a = vec![vec![0.0; n + 1]; self.ny + 1];
        let mut c = vec![0.0; n + 1];
        for (k, &j) in cols_ok.iter().enumerate() {
            for y in 0..self.ny {
                a[y][k] = cols[j].q[y];
            }
            a[self.ny][k] = cols[j].dx;
            c[k] = -cols[j].dy;
        }
        a[self.ny][n] = 1.0;
        let mut b = self.py.clone();
        b.push(eps * (1.0 - 1e-10));
        match solve_lp(&a, &b, &c) {
            LpOutcome::Optimal { x, .. } => Some(
                x[..n]
                    .iter()
                    .enumerate()
                    .filter(|(_, &l)| l > 1e-14)
                    .map(|(k, &l)| (l, cols_ok[k]))
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Flat filter realizing a mixture of posteriors.
    pub fn filter_from_mixture(&self, cols: &[Column], mix: &[(f64, usize)]) -> (Vec<f64>, usize) {
        let nz = mix.len();
        let mut w = vec![0.0; self.ny * nz];
        for (z, &(l, j)) in mix.iter().enumerate() {
            for y in 0..self.ny {
                w[y * nz + z] = l * cols[j].q[y] / self.py[y];
            }
        }
        normalize_rows(&mut w, nz);
        (w, nz)
    }

    pub fn posterior_grid(&self) -> Vec<Column> {
        let res = match self.ny {
            2 => 200,
            3 => 24,
            4 => 10,
            _ => return Vec::new(),
        };
        let mut out = Vec::new();
        let mut cur = vec![0usize; self.ny];
        fn rec(p: &Problem, i: usize, left: usize, res: usize, cur: &mut [usize], out: &mut Vec<Column>) {
            if i + 1 == cur.len() {
                cur[i] = left;
                let q = cur.iter().map(|&c| c as f64 / res as f64).collect();
                out.push(p.column(q));
                return;
            }
            for c in 0..=left {
                cur[i] = c;
                rec(p, i + 1, left - c, res, cur, out);
            }
        }
        rec(self, 0, res, res, &mut cur, &mut out);
        out
    }

    pub fn channel(&self, y_labels: &[String], w: &[f64], nz: usize) -> Result<Channel> {
        let rows = (0..self.ny).map(|y| w[y * nz..(y + 1) * nz].to_vec()).collect();
        Channel::new(y_labels.to_vec(), z_labels(nz), rows)
    }
}

fn normalize_rows(w: &mut [f64], nz: usize) {
    for row in w.chunks_mut(nz) {
        let s: f64 = row.iter().sum();
        if s > 0.0 {
            for v in row {
                *v /= s;
            }
        }
    }
}

/// Euclidean projection of `v` onto the probability simplex.
pub(crate) fn project_simplex(v: &mut [f64]) {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

/// Projected gradient ascent with Armijo backtracking. `f(w, grad)` returns
/// the objective and, when asked, its gradient.
fn ascend<F>(w: &mut Vec<f64>, nz: usize, iters: usize, tol: f64, mut f: F)
where
    F: FnMut(&[f64], bool) -> (f64, Vec<f64>),
{
    let (mut phi, mut g) = f(w, true);
    let mut step = 1.0;
    for _ in 0..iters {
        let mut gain = None;
        while step > 1e-12 {
            let mut trial: Vec<f64> = w.iter().zip(&g).map(|(a, b)| a + step * b).collect();
            for row in trial.chunks_mut(nz) {
                project_simplex(row);
            }
            let moved = trial.iter().zip(w.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if moved < 1e-15 {
                return;
            }
            let dir: f64 = trial.iter().zip(w.iter()).zip(&g).map(|((t, a), b)| (t - a) * b).sum();
            let (pt, _) = f(&trial, false);
            if pt >= phi + 1e-4 * dir && pt > phi - 1e-15 {
                gain = Some(pt - phi);
                *w = trial;
                phi = pt;
                g = f(w, true).1;
                step = (step * 2.0).min(MAX_STEP);
                break;
            }
            step *= 0.5;
        }
        match gain {
            Some(d) if d > tol => {}
            _ => return,
        }
    }
}

fn smooth(mut w: Vec<f64>, nz: usize) -> Vec<f64> {
    for v in &mut w {
        *v = (1.0 - SMOOTHING) * *v + SMOOTHING / nz as f64;
    }
    w
}

fn pad(ch: &Channel, nz: usize) -> Option<Vec<f64>> {
    (ch.n_out() <= nz).then(|| {
        ch.rows()
            .iter()
            .flat_map(|r| r.iter().copied().chain(core::iter::repeat(0.0)).take(nz))
            .collect()
    })
}

/// Solver state for one joint distribution: reusable across `eps` values.
#[derive(Debug, Clone)]
pub struct RatePrivacySolver {
    joint: JointDistribution,
    cfg: SolverConfig,
    prob: Problem,
    nz: usize,
    rho2: f64,
    pool: Vec<Column>,
    g0: Option<PerfectPrivacy>,
}

impl RatePrivacySolver {
    pub fn new(joint: &JointDistribution, cfg: &SolverConfig) -> Result<Self> {
        Self::new_in(joint, cfg, &Sequential)
    }

    pub fn new_in<P: ParallelMap>(joint: &JointDistribution, cfg: &SolverConfig, exec: &P) -> Result<Self> {
        cfg.validate()?;
        let prob = Problem::new(joint);
        let mut pool = prob.point_masses();
        pool.push(prob.column(prob.py.clone()));
        if cfg.posterior_grid {
            pool.extend(prob.posterior_grid());
        }
        let r = maximal_correlation(joint);
        let mut s = RatePrivacySolver {
            joint: joint.clone(),
            cfg: cfg.clone(),
            nz: cfg.z_cardinality.unwrap_or(prob.ny + 1),
            prob,
            rho2: r * r,
            pool,
            g0: None,
        };
        let g0 = perfect::compute(&s, exec)?;
        let w: Vec<f64> = g0.filter.rows().iter().flatten().copied().collect();
        let extra = s.prob.posteriors(&w, g0.filter.n_out());
        s.pool.extend(extra);
        s.g0 = Some(g0);
        Ok(s)
    }

    pub fn joint(&self) -> &JointDistribution {
        &self.joint
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub(crate) fn problem(&self) -> &Problem {
        &self.prob
    }

    /// Certified perfect-privacy value `g_0`.
    pub fn g0(&self) -> &PerfectPrivacy {
        self.g0.as_ref().expect("g0 is computed on construction")
    }

    /// `rho_m^2(X;Y)`.
    pub fn rho2(&self) -> f64 {
        self.rho2
    }

    pub fn bounds_g(&self, eps: f64) -> Result<Bounds> {
        bounds_from(&self.joint, self.g0.as_ref(), eps)
    }

    fn seed_stream(&self, eps: f64, measure: u64, i: usize) -> SeededRng {
        let base = derive_seed(self.cfg.master_seed ^ measure, eps.to_bits());
        SeededRng::stream(base, i as u64)
    }

    fn random_starts(&self, eps: f64, measure: u64, from: usize, starts: &mut Vec<Vec<f64>>) {
        let mut i = from;
        while starts.len() < self.cfg.restarts.max(from + 1) {
            let mut rng = self.seed_stream(eps, measure, i);
            let w = (0..self.prob.ny).flat_map(|_| rng.dirichlet(self.nz)).collect();
            starts.push(w);
            i += 1;
        }
    }

    fn probe_start(&self, k: usize, eps: f64) -> Vec<f64> {
        let p = &self.prob;
        let build = |d: f64| -> Vec<f64> {
            (0..p.ny)
                .flat_map(|y| if y == k { [d, 1.0 - d] } else { [0.0, 1.0] })
                .collect()
        };
        let leak = |d: f64| p.eval(&build(d), 2, false).ixz;
        let d = if leak(1.0) <= eps {
            1.0
        } else {
            crate::math::bisect_increasing(|d| leak(d) - eps, 0.0, 1.0, 1e-12, 60)
        };
        build(d)
    }

    /// Construction seeds followed by random ones; also returns the number of constructions.
    fn mi_starts(&self, eps: f64, warm: Option<&Channel>) -> (Vec<Vec<f64>>, usize) {
        let (ny, nz) = (self.prob.ny, self.nz);
        let mut starts = Vec::new();
        if nz > ny && self.prob.mi > 0.0 {
            let keep = (eps / self.prob.mi).min(1.0);
            let mut w = vec![0.0; ny * nz];
            for y in 0..ny {
                w[y * nz + y] = keep;
                w[y * nz + ny] = 1.0 - keep;
            }
            starts.push(w);
        }
        for k in 0..ny {
            let probe = self.probe_start(k, eps);
            let mut w = vec![0.0; ny * nz];
            for y in 0..ny {
                w[y * nz] = probe[2 * y];
                w[y * nz + 1] = probe[2 * y + 1];
            }
            starts.push(w);
        }
        if nz >= ny {
            starts.push(pad(&Channel::identity(self.joint.y_labels()), nz).unwrap());
        }
        if let Some(w) = warm.and_then(|c| pad(c, nz)) {
            starts.push(w);
        }
        starts.truncate(self.cfg.restarts);
        let from = starts.len();
        self.random_starts(eps, 1, from, &mut starts);
        (starts, from)
    }

    fn run_mi_start(&self, eps: f64, start: &[f64], random: bool) -> Vec<Column> {
        let (p, nz, cfg) = (&self.prob, self.nz, &self.cfg);
        let mut cols = p.posteriors(start, nz);
        let mut w = if random { start.to_vec() } else { smooth(start.to_vec(), nz) };
        let iters = (cfg.max_iters / cfg.penalty_stages).max(1);
        let mut mu = cfg.penalty_start;
        for _ in 0..cfg.penalty_stages {
            ascend(&mut w, nz, iters, cfg.tolerance, |w, grad| {
                let e = p.eval(w, nz, grad);
                let v = (e.ixz - eps).max(0.0);
                let phi = e.iyz - mu * v * v;
                let g = if grad {
                    e.g_yz.iter().zip(&e.g_xz).map(|(a, b)| a - 2.0 * mu * v * b).collect()
                } else {
                    Vec::new()
                };
                (phi, g)
            });
            mu *= cfg.penalty_growth;
        }
        cols.extend(p.posteriors(&w, nz));
        cols
    }

    /// Uncertified best filter for the mutual-information constraint.
    pub(crate) fn optimize_mi<P: ParallelMap>(
        &self,
        eps: f64,
        warm: Option<&Channel>,
        exec: &P,
    ) -> Option<(Vec<f64>, usize)> {
        let (starts, n_random_from) = self.mi_starts(eps, warm);
        let idx: Vec<usize> = (0..starts.len()).collect();
        let found = exec.map(&idx, |&i| self.run_mi_start(eps, &starts[i], i >= n_random_from));
        let mut cols = self.pool.clone();
        for c in found {
            cols.extend(c);
        }
        let mix = self.prob.mix(&cols, eps)?;
        Some(self.prob.filter_from_mixture(&cols, &mix))
    }

    fn certify_mi(&self, eps: f64, filter: Channel) -> Result<(Channel, f64, f64)> {
        let r = audit_filter(&self.joint, &filter, eps, 1.0)?;
        if r.i_xz <= eps + FEASIBILITY_SLACK * 0.1 {
            return Ok((filter, r.i_yz, r.i_xz));
        }
        let repaired = erasure_wrapper(&filter, 1.0 - eps / r.i_xz)?;
        let r = audit_filter(&self.joint, &repaired, eps, 1.0)?;
        Ok((repaired, r.i_yz, r.i_xz))
    }

    fn identity_point(&self, eps: f64, measure: PrivacyMeasure, leakage: f64) -> RatePrivacyPoint {
        let hy = self.prob.hy;
        RatePrivacyPoint {
            epsilon: eps,
            lower: hy,
            value: hy,
            upper: hy,
            filter: Channel::identity(self.joint.y_labels()),
            achieved_leakage: leakage,
            measure,
        }
    }

    /// Certified lower bound on `g_eps` with its filter.
    pub fn solve_g(&self, eps: f64) -> Result<RatePrivacyPoint> {
        self.solve_g_in(eps, None, &Sequential)
    }

    pub fn solve_g_in<P: ParallelMap>(
        &self,
        eps: f64,
        warm: Option<&Channel>,
        exec: &P,
    ) -> Result<RatePrivacyPoint> {
        check_epsilon(eps)?;
        let mi = self.prob.mi;
        if mi <= 1e-15 || eps >= mi {
            return Ok(self.identity_point(eps, PrivacyMeasure::MutualInformation, mi));
        }
        let b = self.bounds_g(eps)?;
        let g0 = self.g0();
        let (filter, value, leak) = if g0.leakage <= eps && eps <= 1e-15 {
            (g0.filter.clone(), g0.value, g0.leakage)
        } else {
            let filter = match self.optimize_mi(eps, warm, exec) {
                Some((w, nz)) => self.prob.channel(self.joint.y_labels(), &w, nz)?,
                None => crate::filters::erasure_filter(&self.joint, eps)?,
            };
            self.certify_mi(eps, filter)?
        };
        Ok(RatePrivacyPoint {
            epsilon: eps,
            lower: b.lower,
            value,
            upper: b.upper,
            filter,
            achieved_leakage: leak,
            measure: PrivacyMeasure::MutualInformation,
        })
    }

    fn run_mc_start(&self, eps: f64, start: &[f64], random: bool) -> Vec<f64> {
        let (p, nz, cfg) = (&self.prob, self.nz, &self.cfg);
        let mut w = if random { start.to_vec() } else { smooth(start.to_vec(), nz) };
        let iters = (cfg.max_iters / cfg.penalty_stages).max(1);
        let mut mu = cfg.penalty_start;
        for _ in 0..cfg.penalty_stages {
            ascend(&mut w, nz, iters, cfg.tolerance, |w, grad| {
                let e = p.eval(w, nz, grad);
                let r = p.rho2(w, nz);
                let v = (r - eps).max(0.0);
                let phi = e.iyz - mu * v * v;
                if !grad {
                    return (phi, Vec::new());
                }
                let mut g = e.g_yz;
                if v > 0.0 {
                    let h = 1e-6;
                    let mut wp = w.to_vec();
                    for i in 0..w.len() {
                        let orig = wp[i];
                        wp[i] = orig + h;
                        let up = p.rho2(&wp, nz);
                        let d = if orig >= h {
                            wp[i] = orig - h;
                            (up - p.rho2(&wp, nz)) / (2.0 * h)
                        } else {
                            (up - r) / h
                        };
                        wp[i] = orig;
                        g[i] -= 2.0 * mu * v * d;
                    }
                }
                (phi, g)
            });
            mu *= cfg.penalty_growth;
        }
        // feasibility repair by erasure
        let r = p.rho2(&w, nz);
        if r > eps {
            let keep = eps / r;
            let mut out = Vec::with_capacity(p.ny * (nz + 1));
            for row in w.chunks(nz) {
                out.extend(row.iter().map(|v| keep * v));
                out.push(1.0 - keep);
            }
            return out;
        }
        w
    }

    /// Certified lower bound on `g_hat_eps` (constraint `rho_m^2(X;Z) <= eps`).
    pub fn solve_g_hat(&self, eps: f64) -> Result<RatePrivacyPoint> {
        self.solve_g_hat_in(eps, &Sequential)
    }

    pub fn solve_g_hat_in<P: ParallelMap>(&self, eps: f64, exec: &P) -> Result<RatePrivacyPoint> {
        if !eps.is_finite() || !(0.0..=1.0).contains(&eps) {
            return Err(Error::EpsilonOutOfRange { epsilon: eps, max: 1.0 });
        }
        let rho2 = self.rho2;
        if rho2 <= 1e-15 || eps >= rho2 {
            return Ok(self.identity_point(eps, PrivacyMeasure::MaximalCorrelation, rho2));
        }
        let b = super::bounds::bounds_hat_from(&self.joint, eps)?;
        let y = self.joint.y_labels();
        let mut candidates = Vec::new();
        let id = Channel::identity(y);
        candidates.push(erasure_wrapper(&id, 1.0 - eps / rho2)?);
        let g0 = self.g0();
        if g0.value > 0.0 && g0.leakage <= 1e-12 {
            candidates.push(time_share(&id, &g0.filter, eps / rho2));
        }
        if eps > 0.0 {
            let (ny, nz) = (self.prob.ny, self.nz);
            let mut starts = Vec::new();
            if nz > ny {
                let mut w = vec![0.0; ny * nz];
                for k in 0..ny {
                    w[k * nz + k] = eps / rho2;
                    w[k * nz + ny] = 1.0 - eps / rho2;
                }
                starts.push(w);
            }
            if nz >= ny {
                starts.push(pad(&id, nz).unwrap());
            }
            starts.truncate(self.cfg.restarts);
            let from = starts.len();
            self.random_starts(eps, 2, from, &mut starts);
            let idx: Vec<usize> = (0..starts.len()).collect();
            let found = exec.map(&idx, |&i| self.run_mc_start(eps, &starts[i], i >= from));
            for w in found {
                let n = w.len() / self.prob.ny;
                candidates.push(self.prob.channel(y, &w, n)?);
            }
        }
        let mut best: Option<(Channel, f64, f64)> = None;
        for c in candidates {
            let r = audit_filter(&self.joint, &c, 1.0, eps)?;
            if r.feasible_mc && best.as_ref().is_none_or(|b| r.i_yz > b.1) {
                best = Some((c, r.i_yz, r.rho2_xz));
            }
        }
        let (filter, value, leak) = best.ok_or(Error::NoFeasibleGamma)?;
        Ok(RatePrivacyPoint {
            epsilon: eps,
            lower: b.lower,
            value,
            upper: b.upper,
            filter,
            achieved_leakage: leak,
            measure: PrivacyMeasure::MaximalCorrelation,
        })
    }
}

/// Use `a` w.p. `lambda` and `b` otherwise, revealing which on disjoint outputs.
fn time_share(a: &Channel, b: &Channel, lambda: f64) -> Channel {
    let rows = a
        .rows()
        .iter()
        .zip(b.rows())
        .map(|(ra, rb)| {
            ra.iter().map(|v| lambda * v).chain(rb.iter().map(|v| (1.0 - lambda) * v)).collect()
        })
        .collect();
    Channel::from_parts_unchecked(a.in_labels().to_vec(), z_labels(a.n_out() + b.n_out()), rows)
}

/// Certified lower bound on `g_eps(X;Y)`.
pub fn solve_g(joint: &JointDistribution, eps: f64, cfg: &SolverConfig) -> Result<RatePrivacyPoint> {
    RatePrivacySolver::new(joint, cfg)?.solve_g(eps)
}

/// Certified lower bound on `g_hat_eps(X;Y)`.
pub fn solve_g_hat(joint: &JointDistribution, eps: f64, cfg: &SolverConfig) -> Result<RatePrivacyPoint> {
    RatePrivacySolver::new(joint, cfg)?.solve_g_hat(eps)
}
