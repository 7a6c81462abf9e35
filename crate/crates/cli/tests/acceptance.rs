//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Thresholds are the published ones, checked literally. A few clauses are
//! known to be unattainable as stated; they still print FAIL, and the run only
//! exits non-zero for a failure outside that list (or if a listed clause
//! unexpectedly starts passing, so the list cannot go stale).

use std::time::Instant;

use privex::parallel::Pool;
use privex_core::dependence::{maximal_correlation, poincare_constant};
use privex_core::filters::audit_filter;
use privex_core::gaussian::{convergence_report, g_gaussian, g_hat_gaussian, GaussianPair, QuantizerConfig};
use privex_core::rate_privacy::{
    dilution_outer, funnel_dual, linearity_test, mirrored_divergence_ratio, G0Method, Linearity,
    RatePrivacySolver, SolverConfig,
};
use privex_core::rng::SeededRng;
use privex_core::JointDistribution;

const KNOWN_UNATTAINABLE: &[(&str, &str)] = &[
    ("7", "value > 10 bits at eps = I - 1e-4 (rho2 = 0.75)"),
    ("8", "gaps g_eps - g_eps_M positive"),
    ("9", "margin over eps H(Y)/I >= 1e-3"),
];

struct Clause {
    name: String,
    pass: bool,
    detail: String,
}

fn clause(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Clause {
    Clause { name: name.into(), pass, detail: detail.into() }
}

// ---- independent oracles -------------------------------------------------

fn h2(p: f64) -> f64 {
    let t = |q: f64| if q > 0.0 { -q * q.log2() } else { 0.0 };
    t(p) + t(1.0 - p)
}

fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&q| q > 0.0).map(|&q| -q * q.log2()).sum()
}

fn mutual_information(m: &[Vec<f64>]) -> f64 {
    let px: Vec<f64> = m.iter().map(|r| r.iter().sum()).collect();
    let py: Vec<f64> = (0..m[0].len()).map(|y| m.iter().map(|r| r[y]).sum()).collect();
    let mut s = 0.0;
    for (x, r) in m.iter().enumerate() {
        for (y, &p) in r.iter().enumerate() {
            if p > 0.0 {
                s += p * (p / (px[x] * py[y])).log2();
            }
        }
    }
    s
}

fn kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).filter(|(a, _)| **a > 0.0).map(|(a, b)| a * (a / b).log2()).sum()
}

fn joint(m: Vec<Vec<f64>>) -> JointDistribution {
    JointDistribution::from_matrix(m).expect("valid joint")
}

fn from_channel(px: &[f64], rows: &[Vec<f64>]) -> JointDistribution {
    joint(rows.iter().zip(px).map(|(r, p)| r.iter().map(|v| p * v).collect()).collect())
}

fn random_joint(rng: &mut SeededRng, nx: usize, ny: usize) -> JointDistribution {
    let v = rng.dirichlet(nx * ny);
    joint(v.chunks(ny).map(<[f64]>::to_vec).collect())
}

fn bsc(alpha: f64) -> Vec<Vec<f64>> {
    vec![vec![1.0 - alpha, alpha], vec![alpha, 1.0 - alpha]]
}

fn standardize(f: &mut [f64], p: &[f64]) -> bool {
    let mean: f64 = f.iter().zip(p).map(|(v, q)| v * q).sum();
    let var: f64 = f.iter().zip(p).map(|(v, q)| q * (v - mean).powi(2)).sum();
    if var < 1e-300 {
        return false;
    }
    f.iter_mut().for_each(|v| *v = (*v - mean) / var.sqrt());
    true
}

/// sup E[f(X) g(Y)] over standardized f, g by alternating conditional expectations.
fn ace(m: &[Vec<f64>], rng: &mut SeededRng) -> f64 {
    let (nx, ny) = (m.len(), m[0].len());
    let px: Vec<f64> = m.iter().map(|r| r.iter().sum()).collect();
    let py: Vec<f64> = (0..ny).map(|y| m.iter().map(|r| r[y]).sum()).collect();
    let mut best: f64 = 0.0;
    for _ in 0..20 {
        let mut f: Vec<f64> = (0..nx).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
        if !standardize(&mut f, &px) {
            continue;
        }
        let mut c = 0.0;
        for _ in 0..50_000 {
            let mut g: Vec<f64> = (0..ny).map(|y| (0..nx).map(|x| m[x][y] * f[x]).sum::<f64>() / py[y]).collect();
            if !standardize(&mut g, &py) {
                break;
            }
            f = (0..nx).map(|x| (0..ny).map(|y| m[x][y] * g[y]).sum::<f64>() / px[x]).collect();
            if !standardize(&mut f, &px) {
                break;
            }
            let nc: f64 = (0..nx).map(|x| (0..ny).map(|y| m[x][y] * f[x] * g[y]).sum::<f64>()).sum();
            let done = (nc - c).abs() < 1e-16;
            c = nc;
            if done {
                break;
            }
        }
        best = best.max(c);
    }
    best
}

/// min over non-constant f of mmse(f(X)|Y) / var(f(X)) for |X| = 3, by a
/// scan over the circle of centered functions followed by golden-section refinement.
fn min_mmse_ratio(m: &[Vec<f64>]) -> f64 {
    let px: Vec<f64> = m.iter().map(|r| r.iter().sum()).collect();
    let ny = m[0].len();
    let e1 = [px[1], -px[0], 0.0];
    let e2 = [px[2], 0.0, -px[0]];
    let ratio = |t: f64| {
        let f: Vec<f64> = (0..3).map(|i| t.cos() * e1[i] + t.sin() * e2[i]).collect();
        let var: f64 = (0..3).map(|i| px[i] * f[i] * f[i]).sum();
        let mut explained = 0.0;
        for y in 0..ny {
            let pyy: f64 = (0..3).map(|x| m[x][y]).sum();
            let cond: f64 = (0..3).map(|x| m[x][y] * f[x]).sum::<f64>() / pyy;
            explained += pyy * cond * cond;
        }
        (var - explained) / var
    };
    let n = 20_000;
    let step = std::f64::consts::PI / n as f64;
    let k = (0..n).min_by(|&a, &b| ratio(a as f64 * step).total_cmp(&ratio(b as f64 * step))).unwrap();
    let (mut a, mut b) = ((k as f64 - 1.0) * step, (k as f64 + 1.0) * step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if ratio(c) < ratio(d) {
            b = d;
        } else {
            a = c;
        }
    }
    ratio(0.5 * (a + b))
}

// ---- criteria ------------------------------------------------------------

fn c1(pool: &Pool) -> Vec<Clause> {
    let start = Instant::now();
    let cfg = SolverConfig::default();
    let mut worst: f64 = 0.0;
    for alpha in [0.1, 0.25, 0.4] {
        let j = from_channel(&[0.5, 0.5], &bsc(alpha));
        let mi = 1.0 - h2(alpha);
        let s = RatePrivacySolver::new_in(&j, &cfg, pool).unwrap();
        for k in 0..9 {
            let eps = mi * k as f64 / 8.0;
            let v = s.solve_g_in(eps, None, pool).unwrap().value;
            worst = worst.max((v - eps / mi).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    vec![
        clause("|g - eps/I| <= 5e-3", worst <= 5e-3, format!("max err {worst:.3e}")),
        clause("runtime <= 60 s", secs <= 60.0, format!("{secs:.1} s")),
    ]
}

fn c2(pool: &Pool) -> Vec<Clause> {
    let cfg = SolverConfig::default();
    let (mut worst, mut g0_err, mut leak): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut explicit = true;
    for delta in [0.2, 0.5] {
        for px in [vec![0.3, 0.7], vec![0.2, 0.3, 0.5]] {
            let n = px.len();
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|x| (0..=n).map(|y| if y == x { 1.0 - delta } else if y == n { delta } else { 0.0 }).collect())
                .collect();
            let j = from_channel(&px, &rows);
            let mi = (1.0 - delta) * entropy(&px);
            let s = RatePrivacySolver::new_in(&j, &cfg, pool).unwrap();
            for k in 0..9 {
                let eps = mi * k as f64 / 8.0;
                let v = s.solve_g_in(eps, None, pool).unwrap().value;
                worst = worst.max((v - (h2(delta) + eps)).abs());
            }
            let g0 = s.g0();
            explicit &= g0.method == G0Method::Erasure;
            let a = audit_filter(&j, &g0.filter, 0.0, 0.0).unwrap();
            g0_err = g0_err.max((a.i_yz - h2(delta)).abs());
            leak = leak.max(a.i_xz);
        }
    }
    vec![
        clause("|g - (H(Y|X) + eps)| <= 5e-3", worst <= 5e-3, format!("max err {worst:.3e}")),
        clause(
            "g0 = h_b(delta) within 1e-3 via the erasure filter",
            g0_err <= 1e-3 && explicit && leak <= 1e-12,
            format!("err {g0_err:.3e}, audited I(X;Z) {leak:.1e}, erasure construction {explicit}"),
        ),
    ]
}

fn c3(pool: &Pool) -> Vec<Clause> {
    let start = Instant::now();
    let cfg = SolverConfig::default();
    let mut rng = SeededRng::new(3);
    let (mut sandwich, mut leak_excess, mut trivial): (f64, f64, f64) =
        (f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for _ in 0..50 {
        let (nx, ny) = (2 + rng.below(3), 2 + rng.below(3));
        let j = random_joint(&mut rng, nx, ny);
        let mi = mutual_information(j.matrix());
        let hy = entropy(&j.py());
        let s = RatePrivacySolver::new_in(&j, &cfg, pool).unwrap();
        for t in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let eps = t * mi;
            let p = s.solve_g_in(eps, None, pool).unwrap();
            sandwich = sandwich.max(p.lower - 1e-6 - p.value).max(p.value - p.upper - 1e-6);
            let a = audit_filter(&j, &p.filter, eps, 1.0).unwrap();
            leak_excess = leak_excess.max(a.i_xz - eps - 1e-9);
            trivial = trivial.max(p.value - hy.min(hy - mi + eps) - 1e-9);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    vec![
        clause("lower - 1e-6 <= value <= upper + 1e-6", sandwich <= 0.0, format!("worst excess {sandwich:.3e}")),
        clause("certificates audit to <= eps + 1e-9", leak_excess <= 0.0, format!("worst excess {leak_excess:.3e}")),
        clause("value <= min(H(Y), H(Y|X) + eps)", trivial <= 0.0, format!("worst excess {trivial:.3e}")),
        clause("runtime <= 300 s", secs <= 300.0, format!("{secs:.1} s")),
    ]
}

fn c4(pool: &Pool) -> Vec<Clause> {
    let cfg = SolverConfig::default();
    let mut rng = SeededRng::new(4);
    let (mut min_pos, mut max_zero, mut leak) = (f64::INFINITY, 0.0f64, 0.0f64);
    for _ in 0..20 {
        let nx = 2 + rng.below(3);
        let j = random_joint(&mut rng, nx, nx + 1);
        let s = RatePrivacySolver::new_in(&j, &cfg, pool).unwrap();
        min_pos = min_pos.min(s.g0().value);
        leak = leak.max(audit_filter(&j, &s.g0().filter, 0.0, 0.0).unwrap().i_xz);
        let nx = 2 + rng.below(3);
        let j = random_joint(&mut rng, nx, 2);
        assert!(mutual_information(j.matrix()) > 0.0);
        max_zero = max_zero.max(RatePrivacySolver::new_in(&j, &cfg, pool).unwrap().g0().value);
    }
    vec![
        clause("|Y| = |X| + 1 gives g0 > 1e-3", min_pos > 1e-3, format!("min g0 {min_pos:.4} (leak {leak:.1e})")),
        clause("binary Y gives g0 <= 1e-4", max_zero <= 1e-4, format!("max g0 {max_zero:.1e}")),
    ]
}

fn c5() -> Vec<Clause> {
    let mut rng = SeededRng::new(5);
    let mut spec: f64 = 0.0;
    for _ in 0..50 {
        let j = random_joint(&mut rng, 3, 3);
        spec = spec.max((maximal_correlation(&j) - ace(j.matrix(), &mut rng)).abs());
    }
    let (mut sdpi, mut tight) = (f64::NEG_INFINITY, 0.0f64);
    for _ in 0..50 {
        let j = random_joint(&mut rng, 3, 3);
        let ch: Vec<Vec<f64>> = (0..3).map(|_| rng.dirichlet(3)).collect();
        let m = j.matrix();
        let xz: Vec<Vec<f64>> =
            (0..3).map(|x| (0..3).map(|z| (0..3).map(|y| m[x][y] * ch[y][z]).sum()).collect()).collect();
        let py = j.py();
        let yz = from_channel(&py, &ch);
        let r = maximal_correlation(&j);
        sdpi = sdpi.max(maximal_correlation(&joint(xz)) - r * maximal_correlation(&yz));
        let xx: Vec<Vec<f64>> = (0..3)
            .map(|a| (0..3).map(|b| (0..3).map(|y| m[a][y] * m[b][y] / py[y]).sum()).collect())
            .collect();
        tight = tight.max((maximal_correlation(&joint(xx)) - r * r).abs());
    }
    vec![
        clause("spectral = variational within 1e-6", spec <= 1e-6, format!("max diff {spec:.3e}")),
        clause("rho(X;Z) <= rho(X;Y) rho(Y;Z) + 1e-8", sdpi <= 1e-8, format!("max excess {sdpi:.3e}")),
        clause("rho^2(X;Y) = rho(X;X') within 1e-8", tight <= 1e-8, format!("max diff {tight:.3e}")),
    ]
}

fn c6() -> Vec<Clause> {
    let mut rng = SeededRng::new(6);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let j = random_joint(&mut rng, 3, 3);
        let r = maximal_correlation(&j);
        worst = worst.max((poincare_constant(&j) - min_mmse_ratio(j.matrix())).abs());
        worst = worst.max((poincare_constant(&j) - (1.0 - r * r)).abs());
    }
    vec![clause("theta = min mmse/var within 1e-6", worst <= 1e-6, format!("max diff {worst:.3e}"))]
}

fn c7() -> Vec<Clause> {
    let p75 = GaussianPair::standard(0.75).unwrap();
    let p50 = GaussianPair::standard(0.5).unwrap();
    let e1 = (g_gaussian(&p75, 0.5).unwrap() - 0.5 * 3f64.log2()).abs();
    let e2 = (g_hat_gaussian(&p50, 0.25).unwrap() - 0.5).abs();
    let mut convex = true;
    for rho2 in [0.1, 0.5, 0.75, 0.9] {
        let p = GaussianPair::standard(rho2).unwrap();
        let mi = p.mutual_information();
        let g: Vec<f64> = (0..20).map(|k| g_gaussian(&p, mi * k as f64 / 20.0).unwrap()).collect();
        let h: Vec<f64> = (0..20).map(|k| g_hat_gaussian(&p, rho2 * k as f64 / 20.0).unwrap()).collect();
        convex &= [g, h].iter().all(|v| v.windows(3).all(|w| w[0] + w[2] > 2.0 * w[1]));
    }
    let mi = p75.mutual_information();
    let near = g_gaussian(&p75, mi - 1e-4).unwrap();
    let ladder: Vec<f64> = (1..=8).map(|k| g_gaussian(&p75, mi - 10f64.powi(-k)).unwrap()).collect();
    let blows_up = ladder.windows(2).all(|w| w[1] > w[0]) && ladder[7] > 10.0;
    vec![
        clause("g(0.75, 0.5) = log2(3)/2 within 1e-12", e1 <= 1e-12, format!("err {e1:.1e}")),
        clause("g_hat(0.5, 0.25) = 0.5 within 1e-12", e2 <= 1e-12, format!("err {e2:.1e}")),
        clause("strict midpoint convexity on 20-point grids", convex, ""),
        clause(KNOWN_UNATTAINABLE[0].1, near > 10.0, format!("value {near:.4} bits")),
        clause(
            "increasing without bound along eps = I - 10^-k",
            blows_up,
            format!("k = 8 gives {:.3} bits", ladder[7]),
        ),
    ]
}

fn c8(pool: &Pool) -> Vec<Clause> {
    let start = Instant::now();
    let pair = GaussianPair::new(0.5, 1.0).unwrap();
    let r = convergence_report(&pair, 0.2, &[2, 4, 6, 8], &QuantizerConfig::default(), pool).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let g = 0.5 * (0.5 / (2f64.powf(-0.4) - 0.5)).log2();
    let gaps: Vec<f64> = r.rows.iter().map(|row| g - row.value).collect();
    let last = r.rows.last().unwrap();
    let excess_ok = r.rows.windows(2).all(|w| w[1].entropy_excess <= w[0].entropy_excess + 1e-8);
    vec![
        clause(KNOWN_UNATTAINABLE[1].1, gaps.iter().all(|&d| d > 0.0), format!("gaps {}", gaps.iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>().join(" "))),
        clause("|last gap| < |first gap|", gaps[3].abs() < gaps[0].abs(), ""),
        clause("M = 2 gap matches the 40-digit reference within 1e-12", (gaps[0] + 1.255_535_22e-11).abs() < 1e-12, ""),
        clause("g_eps_8 within 0.05 of g_eps", (g - last.value).abs() <= 0.05, format!("diff {:.3e}", g - last.value)),
        clause("H(Q_M) - M non-increasing within 1e-8", excess_ok, ""),
        clause("runtime <= 600 s", secs <= 600.0, format!("{secs:.1} s")),
    ]
}

fn c9(pool: &Pool) -> Vec<Clause> {
    let uni = from_channel(&[0.5, 0.5], &bsc(0.1));
    let skew = from_channel(&[0.7, 0.3], &bsc(0.1));
    let lin_u = linearity_test(&uni).unwrap().verdict;
    let lin_s = linearity_test(&skew).unwrap().verdict;
    let mi = mutual_information(skew.matrix());
    let hy = entropy(&skew.py());
    let s = RatePrivacySolver::new_in(&skew, &SolverConfig::default(), pool).unwrap();
    let v = s.solve_g_in(mi / 2.0, None, pool).unwrap().value;
    let margin = v - 0.5 * hy;
    vec![
        clause("uniform-X BSC is Linear", lin_u == Linearity::Linear, format!("{lin_u:?}")),
        clause("Ber(0.3)-X BSC is NotLinear", lin_s == Linearity::NotLinear, format!("{lin_s:?}")),
        clause(
            "value at I/2 matches the posterior-grid LP reference 0.4628216348 within 1e-5",
            (v - 0.462_821_634_8).abs() <= 1e-5,
            format!("value {v:.10}"),
        ),
        clause(KNOWN_UNATTAINABLE[2].1, margin >= 1e-3, format!("margin {margin:.3e}")),
    ]
}

fn c10() -> Vec<Clause> {
    let mut rng = SeededRng::new(10);
    let (mut min_margin, mut agree) = (f64::INFINITY, 0.0f64);
    for _ in 0..100 {
        let pairs = 1 + rng.below(3);
        let zero = rng.below(2) == 1;
        let n = 2 * pairs + usize::from(zero);
        let p = rng.dirichlet(n);
        let pairing: Vec<usize> = (0..n).map(|i| if i < 2 * pairs { i ^ 1 } else { i }).collect();
        let q: Vec<f64> = pairing.iter().map(|&j| p[j]).collect();
        for lambda in [0.1, 0.3] {
            let mix = |l: f64| -> Vec<f64> { p.iter().zip(&q).map(|(a, b)| l * a + (1.0 - l) * b).collect() };
            let lhs = kl(&p, &mix(1.0 - lambda)) / kl(&p, &mix(lambda));
            let rhs = (1.0 - lambda).log2() / lambda.log2();
            min_margin = min_margin.min(rhs - lhs);
            let (core_lhs, core_rhs) = mirrored_divergence_ratio(&p, &pairing, lambda).unwrap();
            agree = agree.max((core_lhs.unwrap() - lhs).abs()).max((core_rhs - rhs).abs());
        }
    }
    vec![
        clause("strict inequality on 100 instances, lambda in {0.1, 0.3}", min_margin > 0.0, format!("min margin {min_margin:.3e}")),
        clause("library ratio agrees with direct evaluation", agree <= 1e-12, format!("max diff {agree:.1e}")),
    ]
}

fn c11() -> Vec<Clause> {
    let cfg = SolverConfig::default();
    let j = from_channel(&[0.5, 0.5], &bsc(0.1));
    let mi = 1.0 - h2(0.1);
    let (mut err, mut same): (f64, bool) = (0.0, true);
    for r in [0.25, 0.5, 0.75] {
        let f = funnel_dual(&j, r, &cfg).unwrap();
        let d = dilution_outer(&j, r, &cfg).unwrap();
        err = err.max((f.t_r - r * mi).abs());
        same &= f == d;
    }
    vec![
        clause("t_R = R I within 1e-3", err <= 1e-3, format!("max err {err:.3e}")),
        clause("dilution outer bound equals the funnel", same, ""),
    ]
}

fn main() {
    let pool = Pool::new(0).expect("thread pool");
    let criteria: Vec<(&str, &str, Box<dyn Fn() -> Vec<Clause> + '_>)> = vec![
        ("1", "BSC closed form", Box::new(|| c1(&pool))),
        ("2", "erasure observation channel", Box::new(|| c2(&pool))),
        ("3", "bounds sandwich", Box::new(|| c3(&pool))),
        ("4", "perfect-privacy dichotomy", Box::new(|| c4(&pool))),
        ("5", "maximal correlation", Box::new(c5)),
        ("6", "Poincare constant", Box::new(c6)),
        ("7", "Gaussian closed forms", Box::new(c7)),
        ("8", "quantized convergence", Box::new(|| c8(&pool))),
        ("9", "linearity discrimination", Box::new(|| c9(&pool))),
        ("10", "mirrored-divergence inequality", Box::new(c10)),
        ("11", "funnel and dilution", Box::new(c11)),
    ];
    let mut unexpected = Vec::new();
    for (id, title, run) in &criteria {
        let start = Instant::now();
        let clauses = run();
        let ok = clauses.iter().all(|c| c.pass);
        println!("[{}] {id:>2} {title} ({:.1} s)", if ok { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
        for c in &clauses {
            let known = KNOWN_UNATTAINABLE.iter().any(|(k, n)| k == id && *n == c.name);
            let tag = match (c.pass, known) {
                (true, false) => "ok",
                (false, true) => "known-unattainable",
                (false, false) => "FAILED",
                (true, true) => "UNEXPECTED-PASS",
            };
            println!("       {tag:<18} {}{}", c.name, if c.detail.is_empty() { String::new() } else { format!(": {}", c.detail) });
            if c.pass == known {
                unexpected.push(format!("{id}: {}", c.name));
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcomes: {unexpected:?}");
        std::process::exit(1);
    }
}
