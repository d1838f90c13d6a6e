use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dissent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dissent")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = dissent(&[args, &["--format", "json"]].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn table<'a>(report: &'a Value, name: &str) -> &'a Vec<Value> {
    report["tables"]
        .as_array()
        .unwrap()
        .iter()
        .find(|t| t["name"] == name)
        .unwrap()["rows"]
        .as_array()
        .unwrap()
}

#[test]
fn effort_reports_known_values() {
    let r = json(&["effort", "--team", "1.0,0.0"]);
    let rows = table(&r, "efforts");
    assert_eq!(rows[0][2], 0.21);
    assert_eq!(rows[1][2], 0.095);
    assert_eq!(r["passed"], true);
    assert_eq!(r["rng"], Value::Null);

    let r = json(&["effort", "--team", "0.4,0.4,0.4", "--r-high", "0.15", "--r-low", "0.05"]);
    let rows = table(&r, "efforts");
    assert_eq!(rows[0][2], rows[2][2]);
}

#[test]
fn bad_prior_is_a_config_error() {
    let out = dissent(&["effort", "--team", "1.2,0.0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("team[0]"));
    let out = dissent(&["verify", "--r-high", "0.4"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(dissent(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn dividend_of_like_minded_team_is_zero() {
    let r = json(&["dividend", "--team", "0.3,0.3"]);
    assert_eq!(r["values"]["dividend"], 0.0);
    let r = json(&["dividend", "--team", "1,0", "--p-star", "0.5"]);
    assert!(r["values"]["residual"].as_f64().unwrap().abs() <= 1e-12);
    assert_eq!(r["values"]["output"], 0.0690125);
}

#[test]
fn match_csv_example() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("workers.csv");
    fs::write(&input, "prior\n0.6\n0.1\n0.9\n0.4\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = dissent(&[
        "match",
        "--workforce",
        &format!("csv:{}", input.display()),
        "--out",
        out_dir.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let pairs = fs::read_to_string(out_dir.join("pairs.csv")).unwrap();
    let mut lines = pairs.lines();
    assert_eq!(lines.next(), Some("worker_a,worker_b,pair_value"));
    assert!(lines.next().unwrap().starts_with("0.1,0.9,"));
    assert!(lines.next().unwrap().starts_with("0.4,0.6,"));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), pairs);
    assert!(out_dir.join("report.json").exists() && out_dir.join("report.txt").exists());
}

#[test]
fn match_rejects_odd_and_malformed_samples() {
    let dir = tempfile::tempdir().unwrap();
    let odd = dir.path().join("odd.csv");
    fs::write(&odd, "prior\n0.1\n0.5\n0.9\n").unwrap();
    let out = dissent(&["match", "--workforce", &format!("csv:{}", odd.display())]);
    assert_eq!(out.status.code(), Some(2));
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "prior\n0.1\n1.5\n").unwrap();
    let out = dissent(&["match", "--workforce", &format!("csv:{}", bad.display())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn match_uniform_value() {
    let r = json(&["match", "--workers", "200"]);
    assert_eq!(r["values"]["countermonotone"], "yes");
    let v = r["values"]["value_per_worker"].as_f64().unwrap();
    assert!((v - 0.03444271).abs() <= 1e-3);
}

fn check_curves(dir: &Path) {
    let curves = fs::read_to_string(dir.join("curves.csv")).unwrap();
    assert!(curves.starts_with("p,y_competition,y_likeminded\n"));
    assert_eq!(curves.lines().count(), 102);
}

#[test]
fn two_tech_presets() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tt");
    let r = json(&["two-tech", "--out", out.to_str().unwrap()]);
    assert_eq!(r["values"]["p_bar"], "none");
    assert_eq!(r["values"]["welfare_competition"], 0.0921499457);
    assert_eq!(r["values"]["welfare_optimists"], 0.09);
    check_curves(&out);

    let r = json(&["two-tech", "--r-high", "0.24", "--r-low", "0.04", "--beta", "0.2"]);
    assert_eq!(r["values"]["p_bar"], 0.0);
    let r = json(&["two-tech", "--r-high", "0.24", "--r-low", "0.04", "--beta", "0.5"]);
    let p = r["values"]["p_bar"].as_f64().unwrap();
    assert!(p > 0.0 && p < 1.0);
    assert_eq!(r["passed"], true);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"scenario": "simulate", "team": [1.0, 0.0], "p_star": 0.5, "sim": {"seed": 9, "paths": 20000}}"#,
    )
    .unwrap();
    let a = json(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(a["rng"]["seed"], 9);
    assert_eq!(a["config"]["sim"]["n_paths"], 20000);
    let b = json(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "10"]);
    assert_eq!(b["rng"]["seed"], 10);
    assert_ne!(a["values"]["mean"], b["values"]["mean"]);
    assert_eq!(dissent(&["effort", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn text_and_json_agree() {
    let r = json(&["output", "--paths", "10000"]);
    let text = String::from_utf8(dissent(&["output", "--paths", "10000"]).stdout).unwrap();
    for key in ["closed_form", "enumeration", "monte_carlo_mean"] {
        let shown = format!("{}", r["values"][key]);
        assert!(text.lines().any(|l| l.starts_with(key) && l.ends_with(&shown)), "{key} = {shown}");
    }
}
