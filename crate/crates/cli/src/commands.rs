//! One function per subcommand; each returns the bytes to write.

use std::path::Path;

use anyhow::Result;
use privex_core::dependence::{maximal_correlation, poincare_constant, weak_independence};
use privex_core::filters::audit_filter;
use privex_core::gaussian::{
    convergence_report, g_eps_m_in, g_gaussian, g_hat_gaussian, gamma_grid, mutual_info_quantized,
    sweep_gamma, GaussianPair, QuantizerConfig,
};
use privex_core::rate_privacy::{
    closed_form, detect_biso, detect_erasure, funnel_dual_in, linearity_test, slope_bound_at_zero,
    curve_g_in, ClosedFormKind, FunnelResult, Linearity, RatePrivacySolver, Slope, SolverConfig,
};
use privex_core::JointDistribution;
use serde_json::{json, Value};

use crate::cli::{Command, Format, GaussianArgs, Measure, OutputArgs, SolverArgs};
use crate::format::{cell, json_num, quote, sig12, Csv};
use crate::grid::parse_grid;
use crate::io::{load_joint, to_json, ChannelFile};
use crate::parallel::Pool;
use crate::{verify, Output};

pub fn execute(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Analyze { input, output, solver } => analyze(input, output, solver),
        Command::Curve { input, grid, solver, output } => curve(input, grid, solver, output),
        Command::Gaussian { pair, eps, grid, m, output } => gaussian(pair, *eps, grid.as_deref(), *m, output),
        Command::Quantized { pair, eps, m, sweep, output } => quantized(pair, *eps, m, *sweep, output),
        Command::Filter { input, eps, measure, solver, threads, .. } => {
            filter(input, *eps, *measure, solver, *threads)
        }
        Command::Funnel { input, rate, solver, output } => funnel(input, *rate, solver, output, "rate"),
        Command::Dilution { input, delta_a, solver, output } => {
            funnel(input, *delta_a, solver, output, "delta_a")
        }
        Command::Verify { suite, trials, seed, output } => verify::run(*suite, *trials, *seed, output),
    }
}

fn solver_config(args: &SolverArgs) -> SolverConfig {
    SolverConfig { restarts: args.restarts, master_seed: args.seed, ..SolverConfig::default() }
}

fn solver_json(cfg: &SolverConfig) -> Value {
    json!({
        "seed": cfg.master_seed,
        "restarts": cfg.restarts,
        "max_iters": cfg.max_iters,
        "penalty_start": cfg.penalty_start,
        "penalty_growth": cfg.penalty_growth,
        "penalty_stages": cfg.penalty_stages,
        "tolerance": cfg.tolerance,
        "g0_tolerance": cfg.g0_tolerance,
        "rank_threshold": cfg.rank_threshold,
        "posterior_grid": cfg.posterior_grid,
        "max_vertex_subsets": cfg.max_vertex_subsets,
    })
}

fn quantizer_json(cfg: &QuantizerConfig) -> Value {
    json!({
        "k_trunc": cfg.k_trunc,
        "tail_tolerance": cfg.tail_tolerance,
        "max_cells": cfg.max_cells,
        "hermite_nodes": cfg.hermite_nodes,
        "legendre_nodes": cfg.legendre_nodes,
        "quadrature_tolerance": cfg.quadrature_tolerance,
        "gamma_points": cfg.gamma_grid.points,
        "gamma_lo": cfg.gamma_grid.lo,
        "gamma_hi": cfg.gamma_grid.hi,
        "gamma_refine": cfg.gamma_grid.refine,
    })
}

fn with_threads(mut config: Value, threads: usize) -> Value {
    config["threads"] = json!(threads);
    config
}

fn slope_str(s: Slope) -> String {
    match s {
        Slope::Finite(v) => sig12(v),
        Slope::Infinite => "inf".into(),
    }
}

/// Key-value report rendered as a two-column CSV or a flat JSON object.
struct Report(Vec<(&'static str, Value)>);

impl Report {
    fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                let map: serde_json::Map<String, Value> =
                    self.0.iter().map(|(k, v)| ((*k).to_string(), v.clone())).collect();
                to_json(&Value::Object(map))
            }
            Format::Csv => {
                let mut csv = Csv::new(&["quantity", "value"]);
                for (k, v) in &self.0 {
                    let text = match v {
                        Value::Null => String::new(),
                        Value::String(s) => s.clone(),
                        Value::Array(items) => items
                            .iter()
                            .map(|i| i.as_str().map(str::to_string).unwrap_or_else(|| i.to_string()))
                            .collect::<Vec<_>>()
                            .join("; "),
                        Value::Number(n) if n.is_f64() => sig12(n.as_f64().unwrap_or(f64::NAN)),
                        other => other.to_string(),
                    };
                    csv.row([(*k).to_string(), quote(&text)]);
                }
                Ok(csv.finish())
            }
        }
    }
}

fn analyze(input: &Path, output: &OutputArgs, args: &SolverArgs) -> Result<Output> {
    let joint = load_joint(input)?;
    let cfg = solver_config(args);
    let pool = Pool::new(output.threads)?;
    let mi = joint.mutual_information();
    let rho = maximal_correlation(&joint);
    let weak = weak_independence(&joint);
    let m = joint.marginals();
    let mut notes: Vec<Value> = Vec::new();
    let mut r = vec![
        ("x_alphabet", json!(joint.nx())),
        ("y_alphabet", json!(joint.ny())),
        ("h_x", json_num(joint.entropy_x())),
        ("h_y", json_num(joint.entropy_y())),
        ("h_y_given_x", json_num(joint.conditional_entropy())),
        ("i_xy", json_num(mi)),
        ("rho_m", json_num(rho)),
        ("poincare", json_num(poincare_constant(&joint))),
        ("weakly_independent", json!(weak.weakly_independent)),
        ("reverse_rank", json!(weak.rank)),
    ];
    let biso = if joint.ny() == 2 { Some(detect_biso(&m.x_given_y)?) } else { None };
    r.push(("biso", json!(biso)));
    r.push(("erasure_delta", detect_erasure(&m.y_given_x).map_or(Value::Null, json_num)));
    if joint.is_product(1e-12) || mi <= 1e-15 {
        notes.push(json!(privex_core::Error::IndependentSources.to_string()));
        notes.push(json!("g_eps = H(Y) for every eps; rate-privacy analysis skipped"));
        for k in ["g0", "g0_method", "closed_form", "slope_bound", "linearity"] {
            r.push((k, Value::Null));
        }
    } else {
        let solver = RatePrivacySolver::new_in(&joint, &cfg, &pool)?;
        let g0 = solver.g0();
        r.push(("g0", json_num(g0.value)));
        r.push(("g0_method", json!(format!("{:?}", g0.method))));
        let kind = closed_form(&joint, mi).map(|c| match c.kind {
            ClosedFormKind::BisoUniform => "biso-uniform: g = eps H(Y) / I(X;Y)",
            ClosedFormKind::Erasure => "erasure: g = H(Y|X) + eps",
        });
        r.push(("closed_form", json!(kind)));
        if weak.weakly_independent {
            notes.push(json!(format!(
                "X is weakly independent of Y: perfect privacy releases g0 = {} bits",
                sig12(g0.value)
            )));
            r.push(("slope_bound", Value::Null));
            r.push(("linearity", Value::Null));
        } else {
            r.push(("slope_bound", json!(slope_str(slope_bound_at_zero(&joint)?.bound))));
            let lin = match linearity_test(&joint)?.verdict {
                Linearity::Linear => "Linear",
                Linearity::LinearPossible => "LinearPossible",
                Linearity::NotLinear => "NotLinear",
            };
            r.push(("linearity", json!(lin)));
        }
    }
    r.push(("notes", Value::Array(notes)));
    let report = Report(r);
    Ok(Output {
        body: report.render(output.format)?,
        input: Some(input.to_path_buf()),
        config: with_threads(solver_json(&cfg), output.threads),
        results: Value::Null,
        failed_checks: 0,
    })
}

fn curve(input: &Path, grid: &str, args: &SolverArgs, output: &OutputArgs) -> Result<Output> {
    let joint = load_joint(input)?;
    let mi = joint.mutual_information();
    let grid = parse_grid(grid, mi)?;
    let cfg = solver_config(args);
    let pool = Pool::new(output.threads)?;
    let solver = RatePrivacySolver::new_in(&joint, &cfg, &pool)?;
    let points = curve_g_in(&solver, &grid, &pool)?;
    let body = match output.format {
        Format::Csv => {
            let mut csv = Csv::new(&["epsilon", "lower", "value", "upper", "leakage"]);
            for p in &points {
                csv.row([p.epsilon, p.lower, p.value, p.upper, p.achieved_leakage].map(sig12));
            }
            csv.finish()
        }
        Format::Json => to_json(&Value::Array(
            points
                .iter()
                .map(|p| {
                    json!({
                        "epsilon": json_num(p.epsilon),
                        "lower": json_num(p.lower),
                        "value": json_num(p.value),
                        "upper": json_num(p.upper),
                        "leakage": json_num(p.achieved_leakage),
                    })
                })
                .collect(),
        ))?,
    };
    let mut config = with_threads(solver_json(&cfg), output.threads);
    config["grid"] = json!(grid);
    Ok(Output { body, input: Some(input.to_path_buf()), config, results: Value::Null, failed_checks: 0 })
}

fn gaussian_pair(args: &GaussianArgs) -> Result<GaussianPair> {
    Ok(GaussianPair::new(args.rho2, args.var_y)?)
}

fn check_nonnegative(eps: f64) -> Result<()> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(privex_core::Error::EpsilonOutOfRange { epsilon: eps, max: f64::INFINITY }.into());
    }
    Ok(())
}

fn gaussian(
    args: &GaussianArgs,
    eps: Option<f64>,
    grid: Option<&str>,
    m: Option<u32>,
    output: &OutputArgs,
) -> Result<Output> {
    let pair = gaussian_pair(args)?;
    let mi = pair.mutual_information();
    let eps_list = match (eps, grid) {
        (Some(e), _) => vec![e],
        (None, Some(g)) => parse_grid(g, mi)?,
        (None, None) => unreachable!("clap requires --eps or --grid"),
    };
    let pool = Pool::new(output.threads)?;
    let qcfg = m.map(QuantizerConfig::with_m);
    let mut rows = Vec::with_capacity(eps_list.len());
    for &e in &eps_list {
        check_nonnegative(e)?;
        // Both closed forms diverge once eps reaches their range limit.
        let g = if e >= mi { f64::INFINITY } else { g_gaussian(&pair, e)? };
        let gh = if e >= pair.rho2() { f64::INFINITY } else { g_hat_gaussian(&pair, e)? };
        let gm = match &qcfg {
            None => None,
            Some(_) if e == 0.0 => Some(0.0),
            Some(_) if e >= mi => None,
            Some(c) => Some(g_eps_m_in(&pair, e, c, &pool)?.value),
        };
        rows.push((e, g, gh, gm));
    }
    let body = match output.format {
        Format::Csv => {
            let mut csv = Csv::new(&["epsilon", "g_closed", "g_hat_closed", "g_eps_M"]);
            for &(e, g, gh, gm) in &rows {
                csv.row([sig12(e), sig12(g), sig12(gh), cell(gm)]);
            }
            csv.finish()
        }
        Format::Json => to_json(&Value::Array(
            rows.iter()
                .map(|&(e, g, gh, gm)| {
                    json!({
                        "epsilon": json_num(e),
                        "g_closed": json_num(g),
                        "g_hat_closed": json_num(gh),
                        "g_eps_M": gm.map(json_num),
                    })
                })
                .collect(),
        ))?,
    };
    let mut config = json!({ "rho2": args.rho2, "var_y": args.var_y, "epsilons": eps_list, "M": m });
    if let Some(c) = &qcfg {
        config["quantizer"] = quantizer_json(c);
    }
    Ok(Output { body, input: None, config: with_threads(config, output.threads), results: Value::Null, failed_checks: 0 })
}

fn quantized(args: &GaussianArgs, eps: f64, ms: &[u32], sweep: bool, output: &OutputArgs) -> Result<Output> {
    let pair = gaussian_pair(args)?;
    let pool = Pool::new(output.threads)?;
    let base = QuantizerConfig::default();
    let mut config = json!({ "rho2": args.rho2, "var_y": args.var_y, "epsilon": eps, "M": ms, "sweep": sweep });
    config["quantizer"] = quantizer_json(&base);
    let config = with_threads(config, output.threads);
    if sweep {
        let gammas = gamma_grid(&pair, &base.gamma_grid);
        let mut rows = Vec::new();
        for &m in ms {
            let cfg = QuantizerConfig { m, ..base.clone() };
            for (g, info) in sweep_gamma(&pair, &gammas, &cfg, &pool)? {
                rows.push((m, g, info.i_xz, info.i_yz));
            }
        }
        let body = match output.format {
            Format::Csv => {
                let mut csv = Csv::new(&["M", "gamma", "i_xz", "i_yz"]);
                for &(m, g, a, b) in &rows {
                    csv.row([m.to_string(), sig12(g), sig12(a), sig12(b)]);
                }
                csv.finish()
            }
            Format::Json => to_json(&Value::Array(
                rows.iter()
                    .map(|&(m, g, a, b)| json!({ "M": m, "gamma": json_num(g), "i_xz": json_num(a), "i_yz": json_num(b) }))
                    .collect(),
            ))?,
        };
        return Ok(Output { body, input: None, config, results: Value::Null, failed_checks: 0 });
    }
    let report = convergence_report(&pair, eps, ms, &base, &pool)?;
    let mut rows = Vec::with_capacity(report.rows.len());
    for r in &report.rows {
        let info = mutual_info_quantized(&pair, r.gamma, &QuantizerConfig { m: r.m, ..base.clone() })?;
        rows.push((r, info.i_xz));
    }
    let body = match output.format {
        Format::Csv => {
            let mut csv = Csv::new(&["M", "gamma", "i_xz", "i_yz"]);
            for (r, i_xz) in &rows {
                csv.row([r.m.to_string(), sig12(r.gamma), sig12(*i_xz), sig12(r.value)]);
            }
            csv.finish()
        }
        Format::Json => to_json(&json!({
            "epsilon": json_num(report.epsilon),
            "g_closed": json_num(report.g_closed),
            "entropy_excess_monotone": report.entropy_excess_monotone,
            "gaps_shrinking": report.gaps_shrinking,
            "rows": rows.iter().map(|(r, i_xz)| json!({
                "M": r.m,
                "gamma": json_num(r.gamma),
                "i_xz": json_num(*i_xz),
                "i_yz": json_num(r.value),
                "gap": json_num(r.gap),
                "entropy_excess": json_num(r.entropy_excess),
            })).collect::<Vec<_>>(),
        }))?,
    };
    let results = json!({
        "g_closed": report.g_closed,
        "gaps": report.rows.iter().map(|r| r.gap).collect::<Vec<_>>(),
        "entropy_excess_monotone": report.entropy_excess_monotone,
        "gaps_shrinking": report.gaps_shrinking,
    });
    Ok(Output { body, input: None, config, results, failed_checks: 0 })
}

fn filter(input: &Path, eps: f64, measure: Measure, args: &SolverArgs, threads: usize) -> Result<Output> {
    let joint = load_joint(input)?;
    let cfg = solver_config(args);
    let pool = Pool::new(threads)?;
    let solver = RatePrivacySolver::new_in(&joint, &cfg, &pool)?;
    let point = match measure {
        Measure::Mi => solver.solve_g_in(eps, None, &pool)?,
        Measure::Mc => solver.solve_g_hat_in(eps, &pool)?,
    };
    let body = to_json(&ChannelFile::from_channel(&point.filter))?;
    // Audit what was serialized, so the manifest describes the file exactly.
    let written: ChannelFile = serde_json::from_str(&body)?;
    let audit = audit_filter(&joint, &written.into_channel()?, eps, eps)?;
    let mut config = with_threads(solver_json(&cfg), threads);
    config["epsilon"] = json!(eps);
    config["measure"] = json!(match measure {
        Measure::Mi => "mi",
        Measure::Mc => "mc",
    });
    let results = json!({
        "i_xz": audit.i_xz,
        "i_yz": audit.i_yz,
        "rho2_xz": audit.rho2_xz,
        "lower": point.lower,
        "upper": point.upper,
        "feasible": match measure {
            Measure::Mi => audit.feasible_mi,
            Measure::Mc => audit.feasible_mc,
        },
    });
    Ok(Output { body, input: Some(input.to_path_buf()), config, results, failed_checks: 0 })
}

fn funnel(input: &Path, rate: f64, args: &SolverArgs, output: &OutputArgs, key: &'static str) -> Result<Output> {
    let joint: JointDistribution = load_joint(input)?;
    let cfg = solver_config(args);
    let pool = Pool::new(output.threads)?;
    let solver = RatePrivacySolver::new_in(&joint, &cfg, &pool)?;
    let FunnelResult { t_r, point, .. } = funnel_dual_in(&solver, rate, &pool)?;
    let names: [&str; 4] = if key == "rate" {
        ["rate", "t_r", "value", "leakage"]
    } else {
        ["delta_a", "delta_m", "value", "leakage"]
    };
    let vals = [rate, t_r, point.value, point.achieved_leakage];
    let body = match output.format {
        Format::Csv => {
            let mut csv = Csv::new(&names);
            csv.row(vals.map(sig12));
            csv.finish()
        }
        Format::Json => to_json(&Value::Object(
            names.iter().zip(vals).map(|(k, v)| ((*k).to_string(), json_num(v))).collect(),
        ))?,
    };
    let mut config = with_threads(solver_json(&cfg), output.threads);
    config[key] = json!(rate);
    Ok(Output { body, input: Some(input.to_path_buf()), config, results: json!({ names[1]: t_r }), failed_checks: 0 })
}
