//! Randomized invariant checks behind `privex verify`.
//!
//! Every check draws its instances from a seeded stream, so a failing run can
//! be replayed with the same `--seed`.

use anyhow::Result;
use privex_core::dependence::{maximal_correlation, mmse_discrete, pearson_correlation, poincare_constant};
use privex_core::filters::{
    audit_filter, bec_bsc_filter_alpha, bec_bsc_leakage, erasure_filter, erasure_wrapper,
    singleton_probe_filter,
};
use privex_core::gaussian::{
    additive_filter, g_eps_m_in, g_gaussian, g_hat_gaussian, gamma_grid, gamma_hat, gamma_star,
    mmse_lower_bound, sweep_gamma, GaussianPair, QuantizerConfig,
};
use privex_core::math::binary_entropy;
use privex_core::rate_privacy::{
    bounds_g, linearity_test, mirrored_divergence_ratio, slope_bound_at_zero, Linearity, RatePrivacySolver,
    Slope, SolverConfig,
};
use privex_core::rng::SeededRng;
use privex_core::{compose, kl_divergence, push_joint, Channel, JointDistribution, ProbVector};
use serde_json::{json, Value};

use crate::cli::{Format, OutputArgs, Suite};
use crate::format::{json_num, quote, sig12, Csv};
use crate::io::to_json;
use crate::parallel::Pool;
use crate::Output;

#[derive(Debug, Clone)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    /// Largest violation seen; `<= 0` when every instance passed.
    pub worst: f64,
    pub instances: usize,
    /// Diagnostics are reported but never fail the run.
    pub diagnostic: bool,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.worst <= 0.0
    }
}

/// Accumulates `value - tolerance` style violations for one check.
struct Tally {
    worst: f64,
    instances: usize,
}

impl Tally {
    fn new() -> Self {
        Self { worst: f64::NEG_INFINITY, instances: 0 }
    }

    /// Record an instance whose error is `err` against tolerance `tol`.
    fn within(&mut self, err: f64, tol: f64) {
        self.instances += 1;
        let v = if err.is_nan() { f64::INFINITY } else { err - tol };
        self.worst = self.worst.max(v);
    }

    /// Record an instance that must satisfy `lhs <= rhs + tol`.
    fn le(&mut self, lhs: f64, rhs: f64, tol: f64) {
        self.within(lhs - rhs, tol);
    }

    fn holds(&mut self, ok: bool) {
        self.within(if ok { 0.0 } else { 1.0 }, 0.0);
    }

    fn finish(self, suite: &'static str, name: &'static str) -> Check {
        Check { suite, name, worst: self.worst, instances: self.instances, diagnostic: false }
    }
}

fn labels(n: usize, p: &str) -> Vec<String> {
    (0..n).map(|i| format!("{p}{i}")).collect()
}

/// Dirichlet joint with every entry bounded away from zero.
fn random_joint(rng: &mut SeededRng, nx: usize, ny: usize) -> JointDistribution {
    let v: Vec<f64> = rng.dirichlet(nx * ny).into_iter().map(|p| p + 1e-3).collect();
    let t: f64 = v.iter().sum();
    JointDistribution::from_matrix(v.chunks(ny).map(|r| r.iter().map(|p| p / t).collect()).collect())
        .expect("valid joint")
}

fn random_channel(rng: &mut SeededRng, inputs: &[String], n_out: usize, prefix: &str) -> Channel {
    let rows = (0..inputs.len()).map(|_| rng.dirichlet(n_out)).collect();
    Channel::new(inputs.to_vec(), labels(n_out, prefix), rows).expect("valid channel")
}

fn joint_from(px: &[f64], channel: &Channel) -> JointDistribution {
    JointDistribution::from_matrix(
        channel.rows().iter().zip(px).map(|(r, p)| r.iter().map(|v| p * v).collect()).collect(),
    )
    .expect("valid joint")
}

fn dims(rng: &mut SeededRng) -> (usize, usize) {
    (2 + rng.below(3), 2 + rng.below(3))
}

fn prob_suite(rng: &mut SeededRng, trials: usize) -> Vec<Check> {
    let (mut chain, mut div, mut dpi, mut assoc) = (Tally::new(), Tally::new(), Tally::new(), Tally::new());
    for _ in 0..trials {
        let (nx, ny) = dims(rng);
        let j = random_joint(rng, nx, ny);
        chain.within((j.joint_entropy() - j.entropy_x() - j.conditional_entropy()).abs(), 1e-10);
        let m = j.marginals();
        let avg: f64 = m
            .x_given_y
            .rows()
            .iter()
            .zip(m.py.probs())
            .map(|(row, p)| {
                let q = ProbVector::new(m.px.labels().to_vec(), row.clone()).expect("posterior");
                p * kl_divergence(&q, &m.px).expect("same alphabet").finite().unwrap_or(f64::INFINITY)
            })
            .sum();
        div.within((avg - j.mutual_information()).abs(), 1e-10);
        let nz = 1 + rng.below(4);
        let f = random_channel(rng, j.y_labels(), nz, "z");
        let (xz, _) = push_joint(&j, &f).expect("compatible");
        dpi.le(xz.mutual_information(), j.mutual_information(), 1e-12);
        let a = random_channel(rng, &labels(3, "a"), 4, "b");
        let b = random_channel(rng, &labels(4, "b"), 2, "c");
        let c = random_channel(rng, &labels(2, "c"), 3, "d");
        let l = compose(&compose(&a, &b).expect("compose"), &c).expect("compose");
        let r = compose(&a, &compose(&b, &c).expect("compose")).expect("compose");
        assoc.within(l.max_abs_diff(&r), 1e-12);
    }
    vec![
        chain.finish("prob", "chain_rule"),
        div.finish("prob", "mi_as_average_divergence"),
        dpi.finish("prob", "data_processing"),
        assoc.finish("prob", "compose_associative"),
    ]
}

/// Zero mean, unit variance under `p`; `None` for a constant function.
fn standardize(f: &mut [f64], p: &[f64]) -> Option<()> {
    let mean: f64 = f.iter().zip(p).map(|(v, q)| v * q).sum();
    let var: f64 = f.iter().zip(p).map(|(v, q)| q * (v - mean) * (v - mean)).sum();
    if var <= 1e-300 {
        return None;
    }
    let s = var.sqrt();
    for v in f.iter_mut() {
        *v = (*v - mean) / s;
    }
    Some(())
}

/// Variational maximal correlation by alternating conditional expectations
/// from random starts. Returns the best correlation and its `f`.
pub fn ace_maximal_correlation(j: &JointDistribution, starts: usize, rng: &mut SeededRng) -> (f64, Vec<f64>) {
    let m = j.matrix();
    let (px, py) = (j.px(), j.py());
    let mut best = (0.0, vec![0.0; j.nx()]);
    for _ in 0..starts {
        let mut f: Vec<f64> = (0..j.nx()).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
        if standardize(&mut f, &px).is_none() {
            continue;
        }
        let mut corr = 0.0;
        for _ in 0..20_000 {
            let mut g: Vec<f64> =
                (0..j.ny()).map(|y| (0..j.nx()).map(|x| m[x][y] * f[x]).sum::<f64>() / py[y]).collect();
            if standardize(&mut g, &py).is_none() {
                break;
            }
            let mut nf: Vec<f64> =
                (0..j.nx()).map(|x| (0..j.ny()).map(|y| m[x][y] * g[y]).sum::<f64>() / px[x]).collect();
            if standardize(&mut nf, &px).is_none() {
                break;
            }
            let c: f64 = (0..j.nx()).flat_map(|x| (0..j.ny()).map(move |y| (x, y))).map(|(x, y)| m[x][y] * nf[x] * g[y]).sum();
            let done = (c - corr).abs() < 1e-15;
            corr = c;
            f = nf;
            if done {
                break;
            }
        }
        if corr > best.0 {
            best = (corr, f);
        }
    }
    best
}

fn dependence_suite(rng: &mut SeededRng, trials: usize) -> Vec<Check> {
    let (mut spec, mut sdpi, mut tight, mut poin, mut pear) =
        (Tally::new(), Tally::new(), Tally::new(), Tally::new(), Tally::new());
    for _ in 0..trials {
        let (nx, ny) = (2 + rng.below(2), 2 + rng.below(2));
        let j = random_joint(rng, nx, ny);
        let rho = maximal_correlation(&j);
        let (ace, f) = ace_maximal_correlation(&j, 20, rng);
        spec.within((rho - ace).abs(), 1e-6);

        let theta = poincare_constant(&j);
        let px = j.px();
        let var: f64 = f.iter().zip(&px).map(|(v, p)| p * v * v).sum();
        let ratio = mmse_discrete(&f, &j).map(|m| m / var).unwrap_or(f64::NAN);
        poin.within((ratio - theta).abs(), 1e-6);

        let nz = 2 + rng.below(3);
        let f2 = random_channel(rng, j.y_labels(), nz, "z");
        let (xz, yz) = push_joint(&j, &f2).expect("compatible");
        sdpi.le(maximal_correlation(&xz), rho * maximal_correlation(&yz), 1e-9);

        // X - Y - X' through the backward channel P_{X|Y}.
        let back = j.marginals().x_given_y;
        let mm = j.matrix();
        let xx: Vec<Vec<f64>> = (0..j.nx())
            .map(|a| (0..j.nx()).map(|b| (0..j.ny()).map(|y| mm[a][y] * back.row(y)[b]).sum()).collect())
            .collect();
        let xx = JointDistribution::from_matrix(xx).expect("valid joint");
        tight.within((maximal_correlation(&xx) - rho * rho).abs(), 1e-8);

        let xv: Vec<f64> = (0..j.nx()).map(|_| rng.uniform_in(-2.0, 2.0)).collect();
        let yv: Vec<f64> = (0..j.ny()).map(|_| rng.uniform_in(-2.0, 2.0)).collect();
        pear.le(pearson_correlation(&j, &xv, &yv).abs(), rho, 1e-12);
    }
    vec![
        spec.finish("dependence", "spectral_vs_variational"),
        sdpi.finish("dependence", "strong_data_processing"),
        tight.finish("dependence", "backward_channel_tightness"),
        poin.finish("dependence", "poincare_vs_mmse_ratio"),
        pear.finish("dependence", "dominates_pearson"),
    ]
}

fn filters_suite(rng: &mut SeededRng, trials: usize) -> Vec<Check> {
    let (mut order, mut scale, mut resid, mut mono, mut probe) =
        (Tally::new(), Tally::new(), Tally::new(), Tally::new(), Tally::new());
    for _ in 0..trials {
        let (nx, ny) = dims(rng);
        let j = random_joint(rng, nx, ny);
        let mi = j.mutual_information();
        let hy = j.entropy_y();
        let eps = rng.uniform() * mi;
        let mut filters = vec![
            erasure_filter(&j, eps).expect("eps in range"),
            random_channel(rng, j.y_labels(), 3, "z"),
        ];
        filters.push(singleton_probe_filter(&j, &j.y_labels()[0], rng.uniform_in(0.05, 1.0)).expect("probe"));
        for f in &filters {
            let r = audit_filter(&j, f, mi, 1.0).expect("audit");
            order.le(-r.i_xz, 0.0, 0.0);
            order.le(r.i_xz, r.i_yz, 1e-12);
            order.le(r.i_yz, hy, 1e-12);
        }
        let delta = rng.uniform();
        let base = audit_filter(&j, &filters[1], mi, 1.0).expect("audit");
        let w = audit_filter(&j, &erasure_wrapper(&filters[1], delta).expect("delta"), mi, 1.0).expect("audit");
        let s = 1.0 - delta;
        for (a, b) in [(w.i_xz, base.i_xz), (w.i_yz, base.i_yz), (w.rho2_xz, base.rho2_xz)] {
            scale.within((a - s * b).abs(), 1e-9);
        }

        let (d, p) = (rng.uniform_in(0.05, 0.6), rng.uniform_in(0.05, 0.45));
        let cap = (1.0 - d) * binary_entropy(p).expect("p in range");
        let mut prev = f64::INFINITY;
        for k in 1..10 {
            let e = cap * k as f64 / 10.0;
            let a = bec_bsc_filter_alpha(e, d, p).expect("eps in range");
            resid.within((bec_bsc_leakage(a, d, p) - e).abs(), 1e-9);
            mono.le(a, prev, 1e-12);
            prev = a;
        }
        // A symbol whose posterior equals the prior gives a private probe.
        let px = rng.dirichlet(nx);
        let c = rng.uniform_in(0.1, 0.5);
        let mtx: Vec<Vec<f64>> = px
            .iter()
            .map(|&p| rng.dirichlet(ny - 1).into_iter().map(|v| v * p * (1.0 - c)).chain([c * p]).collect())
            .collect();
        let jp = JointDistribution::from_matrix(mtx).expect("valid joint");
        let k = jp.y_labels()[ny - 1].clone();
        let f = singleton_probe_filter(&jp, &k, rng.uniform_in(0.05, 1.0)).expect("probe");
        probe.within(audit_filter(&jp, &f, 0.0, 0.0).expect("audit").i_xz, 1e-12);
    }
    vec![
        order.finish("filters", "leakage_ordering"),
        scale.finish("filters", "erasure_wrapper_scaling"),
        resid.finish("filters", "bec_bsc_alpha_residual"),
        mono.finish("filters", "bec_bsc_alpha_decreasing"),
        probe.finish("filters", "singleton_probe_private"),
    ]
}

fn rate_privacy_suite(rng: &mut SeededRng, trials: usize, seed: u64, pool: &Pool) -> Vec<Check> {
    let cfg = SolverConfig { restarts: 20, master_seed: seed, ..SolverConfig::default() };
    let (mut sandwich, mut feas, mut conc, mut ratio) = (Tally::new(), Tally::new(), Tally::new(), Tally::new());
    let (mut g0_pos, mut g0_zero, mut appb, mut slope, mut extremal) =
        (Tally::new(), Tally::new(), Tally::new(), Tally::new(), Tally::new());
    let n_solver = trials.div_ceil(4).max(2);
    for _ in 0..n_solver {
        let (nx, ny) = dims(rng);
        let j = random_joint(rng, nx, ny);
        let mi = j.mutual_information();
        let solver = RatePrivacySolver::new_in(&j, &cfg, pool).expect("solver");
        let grid: Vec<f64> = (0..9).map(|k| mi * k as f64 / 8.0).collect();
        let pts = privex_core::rate_privacy::curve_g_in(&solver, &grid, pool).expect("curve");
        for p in &pts {
            let b = bounds_g(&j, p.epsilon).expect("bounds");
            sandwich.le(b.lower, p.value, 1e-6);
            sandwich.le(p.value, b.upper, 1e-6);
            let a = audit_filter(&j, &p.filter, p.epsilon, 1.0).expect("audit");
            feas.le(a.i_xz, p.epsilon, 1e-9);
        }
        for w in pts.windows(3) {
            conc.le(w[0].value + w[2].value, 2.0 * w[1].value, 5e-3);
        }
        for w in pts[1..].windows(2) {
            ratio.le(w[1].value / w[1].epsilon, w[0].value / w[0].epsilon, 5e-3);
        }
    }
    for _ in 0..n_solver {
        let nx = 2 + rng.below(2);
        let j = random_joint(rng, nx, nx + 1);
        let s = RatePrivacySolver::new_in(&j, &cfg, pool).expect("solver");
        g0_pos.le(1e-3, s.g0().value, 0.0);
        let nx = 2 + rng.below(3);
        let j = random_joint(rng, nx, 2);
        let s = RatePrivacySolver::new_in(&j, &cfg, pool).expect("solver");
        g0_zero.le(s.g0().value, 0.0, 1e-4);
    }
    for _ in 0..100 {
        let (p, pairing) = random_biso_row(rng);
        for lambda in [0.1, 0.3] {
            let (lhs, rhs) = mirrored_divergence_ratio(&p, &pairing, lambda).expect("valid instance");
            match lhs {
                Some(l) => appb.holds(l < rhs),
                None => appb.holds(true),
            }
        }
    }
    for _ in 0..n_solver {
        let alpha = rng.uniform_in(0.02, 0.45);
        let j = joint_from(&[0.5, 0.5], &Channel::bsc(alpha).expect("alpha"));
        if linearity_test(&j).expect("binary").verdict == Linearity::Linear {
            let target = j.entropy_y() / j.mutual_information();
            match slope_bound_at_zero(&j).expect("binary").bound {
                Slope::Finite(v) => slope.within((v - target).abs(), 1e-9),
                Slope::Infinite => slope.holds(false),
            }
        } else {
            slope.holds(false);
        }
        let ny = 2 + rng.below(3);
        let ch = random_channel(rng, &labels(2, "x"), ny, "y");
        let j = joint_from(&[0.5, 0.5], &ch);
        let mi = j.mutual_information();
        if mi > 1e-6 {
            let s = RatePrivacySolver::new_in(&j, &cfg, pool).expect("solver");
            // eps H(Y) / I(X;Y), which is at least eps / I(X;Y) when H(Y) >= 1.
            let hy = j.entropy_y();
            for t in [0.25, 0.5, 0.75] {
                let p = s.solve_g_in(t * mi, None, pool).expect("solve");
                extremal.le(t * hy, p.value, 1e-6);
            }
        }
    }
    vec![
        sandwich.finish("rate-privacy", "bounds_sandwich"),
        feas.finish("rate-privacy", "certificate_feasible"),
        conc.finish("rate-privacy", "concavity_midpoint"),
        ratio.finish("rate-privacy", "value_over_eps_nonincreasing"),
        g0_pos.finish("rate-privacy", "g0_positive_when_weakly_independent"),
        g0_zero.finish("rate-privacy", "g0_zero_for_binary_y"),
        appb.finish("rate-privacy", "mirrored_divergence_inequality"),
        slope.finish("rate-privacy", "linear_slope_consistency"),
        extremal.finish("rate-privacy", "uniform_binary_x_lower_bound"),
    ]
}

/// A distribution on a symmetric alphabet and the reflection `x -> -x`,
/// with an optional fixed (zero) symbol.
fn random_biso_row(rng: &mut SeededRng) -> (Vec<f64>, Vec<usize>) {
    let pairs = 1 + rng.below(3);
    let zero = rng.below(2) == 1;
    let n = 2 * pairs + usize::from(zero);
    let p = rng.dirichlet(n).into_iter().map(|v| v + 1e-6).collect::<Vec<_>>();
    let t: f64 = p.iter().sum();
    let p = p.into_iter().map(|v| v / t).collect();
    let mut pairing: Vec<usize> = (0..n).collect();
    for k in 0..pairs {
        pairing[2 * k] = 2 * k + 1;
        pairing[2 * k + 1] = 2 * k;
    }
    (p, pairing)
}

fn gaussian_suite(rng: &mut SeededRng, trials: usize, pool: &Pool) -> Vec<Check> {
    let (mut convex, mut mmse, mut hat, mut dpi) = (Tally::new(), Tally::new(), Tally::new(), Tally::new());
    let mut mono = Tally::new();
    for t in 0..trials {
        let rho2 = rng.uniform_in(0.05, 0.95);
        let var_y = rng.uniform_in(0.25, 4.0);
        let pair = GaussianPair::new(rho2, var_y).expect("valid pair");
        let mi = pair.mutual_information();
        let g: Vec<f64> = (0..20).map(|k| g_gaussian(&pair, mi * k as f64 / 20.0).expect("eps < I")).collect();
        let h: Vec<f64> = (0..20).map(|k| g_hat_gaussian(&pair, rho2 * k as f64 / 20.0).expect("eps < rho2")).collect();
        for v in [&g, &h] {
            for w in v.windows(3) {
                convex.holds(w[0] + w[2] > 2.0 * w[1]);
            }
        }
        let eps = rng.uniform_in(0.05, 0.95) * mi;
        let gs = gamma_star(&pair, eps).expect("eps in range");
        let exact = var_y * gs * gs / (var_y + gs * gs);
        mmse.within((exact - mmse_lower_bound(&pair, eps).expect("eps in range")).abs(), 1e-10);
        let e2 = rng.uniform_in(0.05, 0.95) * rho2;
        let gh = gamma_hat(&pair, e2).expect("eps in range");
        hat.within((additive_filter(&pair, gh).expect("gamma").rho2_xz - e2).abs(), 1e-10);
        if t < 2 {
            let cfg = QuantizerConfig::with_m(2 + 2 * t as u32);
            let q = g_eps_m_in(&pair, eps, &cfg, pool).expect("quantized optimum");
            dpi.le(q.value, g_gaussian(&pair, eps).expect("eps < I"), 1e-9);
            let mut grid = cfg.gamma_grid.clone();
            grid.points = 40;
            let sweep = sweep_gamma(&pair, &gamma_grid(&pair, &grid), &cfg, pool).expect("sweep");
            for w in sweep.windows(2) {
                mono.le(w[1].1.i_xz, w[0].1.i_xz, cfg.quadrature_tolerance);
                mono.le(w[1].1.i_yz, w[0].1.i_yz, cfg.quadrature_tolerance);
            }
        }
    }
    let mut mono = mono.finish("gaussian", "quantized_info_nonincreasing_in_gamma");
    mono.diagnostic = true;
    vec![
        convex.finish("gaussian", "closed_forms_convex"),
        mmse.finish("gaussian", "mmse_bound_tight_at_optimum"),
        hat.finish("gaussian", "gamma_hat_reproduces_rho2"),
        dpi.finish("gaussian", "quantized_below_closed_form"),
        mono,
    ]
}

pub fn checks(suite: Suite, trials: usize, seed: u64, pool: &Pool) -> Vec<Check> {
    let mut out = Vec::new();
    let want = |s: Suite| suite == Suite::All || suite == s;
    let trials = trials.max(1);
    if want(Suite::Prob) {
        out.extend(prob_suite(&mut SeededRng::stream(seed, 1), trials));
    }
    if want(Suite::Dependence) {
        out.extend(dependence_suite(&mut SeededRng::stream(seed, 2), trials));
    }
    if want(Suite::Filters) {
        out.extend(filters_suite(&mut SeededRng::stream(seed, 3), trials));
    }
    if want(Suite::RatePrivacy) {
        out.extend(rate_privacy_suite(&mut SeededRng::stream(seed, 4), trials, seed, pool));
    }
    if want(Suite::Gaussian) {
        out.extend(gaussian_suite(&mut SeededRng::stream(seed, 5), trials, pool));
    }
    out
}

pub fn run(suite: Suite, trials: usize, seed: u64, output: &OutputArgs) -> Result<Output> {
    let pool = Pool::new(output.threads)?;
    let checks = checks(suite, trials, seed, &pool);
    let failed = checks.iter().filter(|c| !c.diagnostic && !c.passed()).count();
    let status = |c: &Check| match (c.passed(), c.diagnostic) {
        (true, _) => "pass",
        (false, false) => "FAIL",
        (false, true) => "note",
    };
    let body = match output.format {
        Format::Csv => {
            let mut csv = Csv::new(&["suite", "check", "status", "instances", "worst_excess"]);
            for c in &checks {
                csv.row([
                    c.suite.to_string(),
                    quote(c.name),
                    status(c).to_string(),
                    c.instances.to_string(),
                    sig12(c.worst),
                ]);
            }
            csv.finish()
        }
        Format::Json => to_json(&Value::Array(
            checks
                .iter()
                .map(|c| {
                    json!({
                        "suite": c.suite,
                        "check": c.name,
                        "status": status(c),
                        "instances": c.instances,
                        "worst_excess": json_num(c.worst),
                    })
                })
                .collect(),
        ))?,
    };
    Ok(Output {
        body,
        input: None,
        config: json!({ "suite": format!("{suite:?}"), "trials": trials, "seed": seed, "threads": output.threads }),
        results: json!({ "checks": checks.len(), "failed": failed }),
        failed_checks: failed,
    })
}
