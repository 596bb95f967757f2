use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn mzo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mzo")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = mzo(args);
    assert!(
        out.status.success(),
        "mzo {} failed: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

const FLAGS: &[(&str, &[&str])] = &[
    ("sample", &["--n", "--count", "--method", "--delta", "--delta-scale", "--delta-exp", "--delta-cap", "--k", "--burn-in", "--thinning", "--max-rejections"]),
    ("eval", &["--formula", "--space"]),
    ("game", &["--x", "--y", "--rounds", "--epsilon", "--emit-strategy", "--max-log-size"]),
    ("build", &["--kind", "--n", "--ring", "--grid-step"]),
    ("verify", &["--space", "--grid-step", "--kmax", "--epsilon"]),
    ("experiment", &["--kind", "--n", "--trials", "--epsilon", "--delta", "--delta-scale", "--delta-exp", "--delta-cap", "--tasks", "--grid-step", "--kmax", "--formula", "--sigma-as", "--method", "--burn-in", "--thinning", "--max-rejections"]),
    ("bound", &["--k", "--m", "--epsilon", "--delta", "--lambda-a", "--n-range"]),
];

#[test]
fn help_lists_every_flag() {
    let top = ok(&["--help"]);
    for (sub, flags) in FLAGS {
        assert!(top.contains(sub));
        let help = ok(&[sub, "--help"]);
        for flag in flags.iter().chain(&["--seed", "--threads", "--out", "--config"]) {
            assert!(help.contains(flag), "{sub} help lacks {flag}");
        }
    }
    assert!(ok(&["--version"]).contains("mzo"));
}

#[test]
fn usage_errors_exit_two() {
    let out = mzo(&["eval", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    let last = String::from_utf8(out.stderr).unwrap();
    let record: Value = serde_json::from_str(last.lines().last().unwrap()).unwrap();
    assert_eq!(record["error"], "usage");
    assert_eq!(mzo(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mzo(&["sample"]).status.code(), Some(2));
}

#[test]
fn eval_prints_the_value() {
    let dir = TempDir::new().unwrap();
    let phi = write(&dir, "phi.cl", "sup x . sup y . min(d(x,y), monus(0.5, d(x,y)))\n");
    let space = write(&dir, "two_point.json", r#"{"n": 2, "d": [0.3]}"#);
    assert_eq!(ok(&["eval", "--formula", &phi, "--space", &space]), "0.2\n");
    let csv_space = write(&dir, "two_point.csv", "0,0.25\n0.25,0\n");
    let inline = "sup x . sup y . min(d(x,y), monus(0.5, d(x,y)))";
    assert_eq!(ok(&["eval", "--formula", inline, "--space", &csv_space]), "0.25\n");
    let report = json(&["eval", "--formula", inline, "--space", &space, "--out", "json"]);
    assert_eq!(report["value"], 0.2);
    assert_eq!(report["config"]["command"], "eval");
}

#[test]
fn eval_errors_are_reported() {
    let dir = TempDir::new().unwrap();
    let space = write(&dir, "s.json", r#"{"n": 2, "d": [0.3]}"#);
    let out = mzo(&["eval", "--formula", "sup x . d(x, y)", "--space", &space]);
    assert_eq!(out.status.code(), Some(1));
    let record: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(record["error"], "semantic");
    assert!(record["message"].as_str().unwrap().contains("'y'"));
    let out = mzo(&["eval", "--formula", "sup x . min(", "--space", &space]);
    let record: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(record["error"], "syntax");
    let bad = write(&dir, "bad.json", r#"{"n": 3, "d": [0.1, 0.1, 0.9]}"#);
    let out = mzo(&["eval", "--formula", "0.5", "--space", &bad]);
    let record: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(record["error"], "invalid_space");
}

#[test]
fn game_reports_winner_and_strategy() {
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "s.json", r#"{"n": 3, "d": [0.5, 0.7, 0.9]}"#);
    let strategy_path = dir.path().join("strategy.json");
    let strategy_file = strategy_path.to_str().unwrap();
    let report = json(&["game", "--x", &s, "--y", &s, "--rounds", "3", "--epsilon", "0.1", "--emit-strategy", strategy_file]);
    assert_eq!(report["winner"], "II");
    assert!(report["explored_states"].as_u64().unwrap() > 0);
    let saved: Value = serde_json::from_str(&fs::read_to_string(&strategy_path).unwrap()).unwrap();
    assert_eq!(saved, report["strategy"]);

    let point = write(&dir, "p.json", r#"{"n": 1, "d": []}"#);
    let pair = write(&dir, "q.json", r#"{"n": 2, "d": [0.6]}"#);
    let report = json(&["game", "--x", &point, "--y", &pair, "--rounds", "2", "--epsilon", "0.1"]);
    assert_eq!(report["winner"], "I");

    let out = mzo(&["game", "--x", &s, "--y", &s, "--rounds", "4", "--epsilon", "0.1", "--max-log-size", "1"]);
    assert_eq!(out.status.code(), Some(3));
    let record: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(record["error"], "resource");
}

#[test]
fn build_and_verify() {
    let dir = TempDir::new().unwrap();
    let circ = dir.path().join("circ.json");
    ok(&["build", "--kind", "circulant", "--n", "7", "--ring", "0.5,0.75,1.0", "--out", circ.to_str().unwrap()]);
    let report = json(&["verify", "--space", circ.to_str().unwrap(), "--grid-step", "0.25", "--kmax", "1", "--epsilon", "0.1"]);
    assert_eq!(report["satisfied"], true);
    assert_eq!(report["tasks"], 3);
    assert_eq!(report["max_value"], 0.0);

    let from_grid = json(&["build", "--kind", "circulant", "--n", "6", "--grid-step", "0.25"]);
    assert_eq!(from_grid["n"], 6);

    let random_csv = dir.path().join("random.csv");
    ok(&["build", "--kind", "random", "--n", "64", "--seed", "5", "--out", random_csv.to_str().unwrap()]);
    let rows = csv_rows(&fs::read_to_string(&random_csv).unwrap());
    assert_eq!(rows.len(), 64);
    let report = json(&["verify", "--space", random_csv.to_str().unwrap(), "--epsilon", "0.2"]);
    assert_eq!(report["satisfied"], true);
    assert_eq!(report["config"]["params"]["epsilon"], 0.2);

    let again = dir.path().join("again.csv");
    ok(&["build", "--kind", "random", "--n", "64", "--seed", "5", "--out", again.to_str().unwrap()]);
    assert_eq!(fs::read(&random_csv).unwrap(), fs::read(&again).unwrap());

    let out = mzo(&["build", "--kind", "circulant", "--n", "7", "--ring", "0.5,0.75"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sample_methods() {
    let report = json(&["sample", "--n", "4", "--count", "3", "--seed", "9"]);
    let samples = report["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 3);
    assert!(samples.iter().all(|s| s["attempts"].as_u64().unwrap() >= 1 && s["d"].as_array().unwrap().len() == 6));
    assert_eq!(report, json(&["sample", "--n", "4", "--count", "3", "--seed", "9"]));

    let cube = ok(&["sample", "--n", "3", "--count", "2", "--method", "cube", "--out", "csv"]);
    let rows = csv_rows(&cube);
    assert_eq!(rows[0], ["index", "attempts", "d_1_2", "d_1_3", "d_2_3"]);
    assert_eq!(rows.len(), 3);

    let dn = json(&["sample", "--n", "6", "--method", "dn", "--delta", "0.1", "--count", "5"]);
    for s in dn["samples"].as_array().unwrap() {
        assert!(s["d"].as_array().unwrap().iter().all(|c| c.as_f64().unwrap() >= 0.4));
    }
    let scheduled = json(&["sample", "--n", "8", "--method", "dn", "--delta-scale", "0.5", "--delta-exp", "0.5", "--delta-cap", "0.3"]);
    assert!((scheduled["delta"].as_f64().unwrap() - 0.5 / 8f64.sqrt()).abs() < 1e-12);

    let s_like = json(&["sample", "--n", "5", "--k", "2", "--method", "s-like", "--delta", "0.1", "--count", "4"]);
    for s in s_like["samples"].as_array().unwrap() {
        // Cross coordinates (point 1 or 2 against points 3..5) sit at or above 0.6.
        let d: Vec<f64> = s["d"].as_array().unwrap().iter().map(|c| c.as_f64().unwrap()).collect();
        assert!(d[1..7].iter().all(|&c| c >= 0.6));
    }

    let har = json(&["sample", "--n", "7", "--method", "mn-har", "--count", "3", "--burn-in", "10", "--thinning", "2"]);
    let attempts: Vec<u64> = har["samples"].as_array().unwrap().iter().map(|s| s["attempts"].as_u64().unwrap()).collect();
    assert_eq!(attempts, [12, 2, 2]);

    let out = mzo(&["sample", "--n", "12", "--method", "mn-reject", "--max-rejections", "5"]);
    assert_eq!(out.status.code(), Some(3));
}

fn experiment_csv(args: &[&str]) -> Vec<Vec<String>> {
    let rows = csv_rows(&ok(args));
    assert_eq!(rows[0].join(","), "n,trials,successes,fraction,ci_low,ci_high,analytic_bound");
    rows
}

#[test]
fn experiment_kinds() {
    let rows = experiment_csv(&["experiment", "--kind", "thm22", "--n", "6,8", "--trials", "200", "--epsilon", "0.2", "--delta-scale", "0.1", "--delta-exp", "0.5", "--delta-cap", "0.4", "--seed", "3"]);
    assert_eq!(rows.len(), 3);
    assert!(rows[1][6].parse::<f64>().is_ok());

    let rows = experiment_csv(&["experiment", "--kind", "fact-cs", "--n", "3", "--trials", "2000", "--delta", "0"]);
    let frac: f64 = rows[1][3].parse().unwrap();
    assert!((frac - 0.25).abs() < 0.05);
    assert_eq!(rows[1][6], "");

    let report = json(&["experiment", "--kind", "cor23", "--n", "4,6", "--trials", "300", "--epsilon", "0.2", "--grid-step", "0.5", "--kmax", "1", "--method", "hit-and-run", "--burn-in", "20", "--thinning", "3", "--threads", "2", "--out", "json"]);
    assert_eq!(report["kind"], "cor23");
    assert_eq!(report["config"]["threads"], 2);
    assert_eq!(report["config"]["params"]["burn-in"], 20);
    assert!(report["rows"][0]["partition"].is_object());

    let rows = experiment_csv(&["experiment", "--kind", "zero-one", "--n", "4,5", "--trials", "100", "--formula", "0.3", "--sigma-as", "0.3", "--epsilon", "0.01", "--method", "rejection", "--max-rejections", "100000"]);
    assert!(rows[1..].iter().all(|r| r[3] == "1"));
}

#[test]
fn experiment_tasks_file_and_output_path() {
    let dir = TempDir::new().unwrap();
    let tasks = write(&dir, "tasks.json", r#"[{"base": {"n": 1, "d": []}, "new_point": [0.6], "epsilon": 1.0}]"#);
    let out_path = dir.path().join("report.csv");
    ok(&["experiment", "--kind", "thm22", "--n", "5", "--trials", "50", "--tasks", &tasks, "--out", out_path.to_str().unwrap()]);
    let rows = csv_rows(&fs::read_to_string(&out_path).unwrap());
    assert_eq!(rows[1][3], "1");

    let json_path = dir.path().join("report.json");
    ok(&["experiment", "--kind", "thm22", "--n", "5", "--trials", "50", "--tasks", &tasks, "--out", json_path.to_str().unwrap()]);
    let report: Value = serde_json::from_str(&fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(report["rows"][0]["successes"], 50);

    let formula = write(&dir, "sigma.cl", "sup x . sup y . d(x, y)");
    let rows = experiment_csv(&["experiment", "--kind", "zero-one", "--n", "7", "--trials", "500", "--formula", &formula, "--sigma-as", "1", "--epsilon", "0.3"]);
    assert!(rows[1][3].parse::<f64>().unwrap() >= 0.9);
}

#[test]
fn experiments_rerun_byte_identically() {
    let args = ["experiment", "--kind", "thm22", "--n", "6,10", "--trials", "400", "--epsilon", "0.2", "--delta-scale", "0.1", "--seed", "17"];
    assert_eq!(mzo(&args).stdout, mzo(&args).stdout);
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "1"]);
    assert_eq!(mzo(&args).stdout, mzo(&threaded).stdout);
}

#[test]
fn config_file_supplies_flags_and_flags_win() {
    let dir = TempDir::new().unwrap();
    let config = write(
        &dir,
        "run.json",
        r#"{"command": "experiment", "seed": 5, "kind": "fact-cs", "n": [3, 4], "trials": 80, "out": "json"}"#,
    );
    let report = json(&["experiment", "--config", &config, "--trials", "60", "--seed", "6"]);
    assert_eq!(report["seed"], 6);
    assert_eq!(report["config"]["params"]["trials"], 60);
    assert_eq!(report["rows"][0]["trials"], 60);
    assert_eq!(report["config"]["params"]["kind"], "fact-cs");

    let flags_only = json(&["experiment", "--kind", "fact-cs", "--n", "3,4", "--trials", "60", "--seed", "6", "--out", "json"]);
    assert_eq!(flags_only["rows"], report["rows"]);

    let wrong = write(&dir, "wrong.json", r#"{"command": "game"}"#);
    assert_eq!(mzo(&["experiment", "--config", &wrong]).status.code(), Some(2));
    let unknown = write(&dir, "unknown.json", r#"{"bogus": 1}"#);
    assert_eq!(mzo(&["bound", "--config", &unknown]).status.code(), Some(2));
}

#[test]
fn bound_table() {
    let rows = csv_rows(&ok(&["bound", "--k", "1", "--epsilon", "0.2", "--delta", "0", "--n-range", "10..12"]));
    assert_eq!(rows[0], ["n", "per_subset_bound", "union_bound"]);
    assert_eq!(rows.len(), 4);
    let union: f64 = rows[2][2].parse().unwrap();
    assert!((union - 11.0 * 0.6f64.powi(10)).abs() < 1e-12);

    let rows = csv_rows(&ok(&["bound", "--k", "2", "--m", "3", "--epsilon", "0.1", "--delta", "0.05", "--lambda-a", "0.04", "--n-range", "20:21"]));
    let per: f64 = rows[1][1].parse().unwrap();
    let ratio: f64 = (0.55f64.powi(2) - 0.01) / 0.45f64.powi(2);
    assert!((per - 2.0 * 0.04 * ratio.powi(18)).abs() < 1e-12 * per.max(1.0));

    let report = json(&["bound", "--k", "1", "--epsilon", "0.2", "--delta", "0", "--n-range", "11..11", "--out", "json"]);
    assert_eq!(report["rows"][0]["n"], 11);
    assert!(Path::new(env!("CARGO_BIN_EXE_mzo")).exists());
}
