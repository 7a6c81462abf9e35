use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use privex::io::{load_channel, load_joint};
use privex::manifest::{digest_file, sidecar_path, RunManifest};
use privex_core::filters::audit_filter;
use privex_core::math::binary_entropy;
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn privex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_privex"))
        .args(args)
        .env_remove("PRIVEX_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = privex(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn report(text: &str) -> std::collections::HashMap<String, String> {
    csv_rows(text).into_iter().map(|r| (r[0].clone(), r[1..].join(","))).collect()
}

#[test]
fn gaussian_closed_form_example() {
    let out = stdout(&["gaussian", "--rho2", "0.75", "--eps", "0.5"]);
    assert_eq!(out.lines().next(), Some("epsilon,g_closed,g_hat_closed,g_eps_M"));
    let row = &csv_rows(&out)[0];
    assert!(row[1].starts_with("0.792481"), "{out}");
    let v: f64 = row[1].parse().unwrap();
    assert!((v - 0.5 * 3f64.log2()).abs() < 1e-11);
}

#[test]
fn gaussian_grid_with_quantized_column() {
    let out = stdout(&["gaussian", "--rho2", "0.5", "--grid", "0:I:3", "--M", "4"]);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0], ["0", "0", "0", "0"]);
    let g: f64 = rows[1][1].parse().unwrap();
    let gm: f64 = rows[1][3].parse().unwrap();
    assert!(gm > 0.0 && gm <= g + 1e-9);
    assert_eq!(rows[2][1], "inf");
    assert_eq!(rows[2][3], "");
}

#[test]
fn curve_on_uniform_bsc_is_the_straight_line() {
    let input = data("bsc_uniform.json");
    let out = stdout(&["curve", "--input", input.to_str().unwrap(), "--grid", "0:I:9"]);
    assert_eq!(out.lines().next(), Some("epsilon,lower,value,upper,leakage"));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 9);
    let mi: f64 = rows[8][0].parse().unwrap();
    for r in &rows {
        let eps: f64 = r[0].parse().unwrap();
        let value: f64 = r[2].parse().unwrap();
        assert!((value - eps / mi).abs() <= 5e-3, "{r:?}");
    }
}

#[test]
fn output_is_deterministic_across_runs_and_thread_counts() {
    let input = data("wide.json");
    let input = input.to_str().unwrap();
    for format in ["csv", "json"] {
        let base = ["curve", "--input", input, "--grid", "0:I:5", "--restarts", "8", "--seed", "7", "--format", format];
        let a = stdout(&[&base[..], &["--threads", "1"]].concat());
        let b = stdout(&[&base[..], &["--threads", "4"]].concat());
        let c = stdout(&[&base[..], &["--threads", "4"]].concat());
        assert_eq!(a, b);
        assert_eq!(b, c);
    }
}

#[test]
fn seed_falls_back_to_environment() {
    let input = data("ber03_bsc.json");
    let run = |seed: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_privex"));
        cmd.args(["curve", "--input", input.to_str().unwrap(), "--grid", "0:I:3", "--restarts", "4"]);
        if let Some(f) = flag {
            cmd.args(["--seed", f]);
        }
        match seed {
            Some(s) => cmd.env("PRIVEX_SEED", s),
            None => cmd.env_remove("PRIVEX_SEED"),
        };
        let out = cmd.output().unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run(Some("3"), None), run(None, Some("3")));
}

#[test]
fn filter_round_trips_through_its_manifest() {
    let dir = tempfile::tempdir().unwrap();
    for (file, eps, measure) in [("erasure.json", "0.3", "mi"), ("wide.json", "0.1", "mi"), ("ber03_bsc.json", "0.2", "mc")] {
        let input = data(file);
        let out = dir.path().join(format!("{file}.{measure}.filter.json"));
        stdout(&[
            "filter",
            "--input",
            input.to_str().unwrap(),
            "--eps",
            eps,
            "--measure",
            measure,
            "--restarts",
            "10",
            "--out",
            out.to_str().unwrap(),
        ]);
        let manifest = RunManifest::read(&sidecar_path(&out)).unwrap();
        assert_eq!(manifest["command"], "filter");
        assert_eq!(manifest["input_digest"].as_str().unwrap(), digest_file(&input).unwrap());
        assert_eq!(manifest["output_digest"].as_str().unwrap(), digest_file(&out).unwrap());
        let joint = load_joint(&input).unwrap();
        let filter = load_channel(&out).unwrap();
        let audit = audit_filter(&joint, &filter, 1.0, 1.0).unwrap();
        let res = &manifest["results"];
        for (key, v) in [("i_xz", audit.i_xz), ("i_yz", audit.i_yz), ("rho2_xz", audit.rho2_xz)] {
            assert!((res[key].as_f64().unwrap() - v).abs() <= 1e-12, "{file} {key}");
        }
        assert_eq!(res["feasible"], Value::Bool(true));
    }
}

#[test]
fn perfectly_private_filter_on_erasure_channel() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.json");
    let input = data("erasure.json");
    stdout(&["filter", "--input", input.to_str().unwrap(), "--eps", "0", "--out", out.to_str().unwrap()]);
    let audit = audit_filter(&load_joint(&input).unwrap(), &load_channel(&out).unwrap(), 0.0, 0.0).unwrap();
    assert!(audit.i_xz.abs() < 1e-12);
    assert!((audit.i_yz - binary_entropy(0.2).unwrap()).abs() < 1e-12);
}

#[test]
fn analyze_reports_structure() {
    let run = |f: &str| report(&stdout(&["analyze", "--input", data(f).to_str().unwrap()]));
    let bsc = run("bsc_uniform.json");
    assert_eq!(bsc["linearity"], "Linear");
    assert!(bsc["closed_form"].starts_with("biso-uniform"));
    assert_eq!(bsc["rho_m"], "0.8");

    let prod = run("product.json");
    assert_eq!(prod["i_xy"], "0");
    assert!(prod["notes"].contains("independent"));
    assert_eq!(prod["g0"], "");

    let wide = run("wide.json");
    assert_eq!(wide["weakly_independent"], "true");
    assert!(wide["g0"].parse::<f64>().unwrap() > 0.0);
    assert!(wide["notes"].contains("g0"));

    let ber = run("ber03_bsc.json");
    assert_eq!(ber["linearity"], "NotLinear");
}

#[test]
fn funnel_and_dilution_agree() {
    let input = data("bsc_uniform.json");
    let f = stdout(&["funnel", "--input", input.to_str().unwrap(), "--rate", "0.5", "--restarts", "10"]);
    let d = stdout(&["dilution", "--input", input.to_str().unwrap(), "--delta-a", "0.5", "--restarts", "10"]);
    assert_eq!(f.lines().next(), Some("rate,t_r,value,leakage"));
    assert_eq!(d.lines().next(), Some("delta_a,delta_m,value,leakage"));
    assert_eq!(f.lines().nth(1), d.lines().nth(1));
}

#[test]
fn quantized_emits_one_row_per_resolution() {
    let out = stdout(&["quantized", "--rho2", "0.5", "--eps", "0.2", "--M", "2,4"]);
    assert_eq!(out.lines().next(), Some("M,gamma,i_xz,i_yz"));
    let rows = csv_rows(&out);
    assert_eq!(rows.iter().map(|r| r[0].as_str()).collect::<Vec<_>>(), ["2", "4"]);
    for r in &rows {
        assert!(r[2].parse::<f64>().unwrap() <= 0.2 + 1e-12);
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"x_labels\": [\"a\"],\n  \"pxy\": [[1.0]\n}\n").unwrap();
    let out = privex(&["analyze", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json:4:"), "{err}");

    let neg = dir.path().join("neg.json");
    std::fs::write(&neg, r#"{"x_labels":["a","b"],"y_labels":["0"],"pxy":[[1.2],[-0.2]]}"#).unwrap();
    assert_eq!(privex(&["analyze", "--input", neg.to_str().unwrap()]).status.code(), Some(2));

    let input = data("bsc_uniform.json");
    let out = privex(&["filter", "--input", input.to_str().unwrap(), "--eps", "-1"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(privex(&["gaussian", "--rho2", "1.5", "--eps", "0.1"]).status.code(), Some(2));
    assert_eq!(privex(&["gaussian", "--rho2", "0.5", "--eps", "-0.1"]).status.code(), Some(3));
    assert_eq!(privex(&["curve", "--input", input.to_str().unwrap(), "--grid", "0:2I:3"]).status.code(), Some(3));
    assert_eq!(privex(&["curve", "--input", input.to_str().unwrap(), "--grid", "0:x:3"]).status.code(), Some(2));
    assert_eq!(privex(&["verify", "--suite", "prob", "--trials", "3"]).status.code(), Some(0));
}

#[test]
fn manifest_is_written_only_with_out() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    stdout(&["gaussian", "--rho2", "0.5", "--grid", "0:I/2:3", "--out", out.to_str().unwrap()]);
    let m = RunManifest::read(&sidecar_path(&out)).unwrap();
    assert_eq!(m["command"], "gaussian");
    assert_eq!(m["input_digest"], Value::Null);
    assert_eq!(m["config"]["rho2"], 0.5);
    assert!(m["tool_version"].as_str().unwrap().starts_with("privex "));
    assert!(m["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
}
