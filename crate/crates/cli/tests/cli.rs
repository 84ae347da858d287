use std::path::Path;
use std::process::{Command, Output};

use frachardy_cli::output::{ReportRecord, REPORT_COLUMNS};

fn frachardy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frachardy")).args(args).env_remove("FRACHARDY_SEED").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const HARDY_BUMP: &[&str] =
    &["verify", "--d", "2", "--k", "1", "--s", "0.6", "--p", "2", "--center", "0.9,-0.1", "--radius", "0.5"];

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(frachardy(&["--help"]).status.code(), Some(0));
    let v = frachardy(&["--version"]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn passing_check_exits_zero() {
    let out = frachardy(&[HARDY_BUMP, &["--samples", "20000"]].concat());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let record: ReportRecord = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(record.theorem_id, "hardy");
    assert!(record.pass);
    assert_eq!(record.spec.samples, 20000);
}

#[test]
fn failed_check_exits_one_and_still_writes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sharp.csv");
    let out = frachardy(&[
        "sharpness",
        "--d",
        "2",
        "--k",
        "1",
        "--s",
        "0.6",
        "--p",
        "2",
        "--n-list",
        "1",
        "--samples",
        "20000",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,lhs,lhs_error,hardy,ratio,ratio_sigma,margin,margin_sigma,i1p,i2p"));
    assert_eq!(lines.count(), 1);
}

#[test]
fn inadmissible_parameters_exit_two() {
    let out =
        frachardy(&["constant", "--d", "2", "--k", "1", "--s", "0.5", "--p", "2", "--alpha", "0.6", "--beta", "0.6"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert_eq!(stderr(&out), "error: alpha+beta must lie in (-k, sp)\n");

    let out = frachardy(&["constant", "--d", "2", "--s", "1.2", "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));

    let out = frachardy(&["constant", "--d", "2", "--s", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("missing parameter p"));
}

#[test]
fn config_errors_exit_two() {
    assert_eq!(frachardy(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(frachardy(&["constant", "--d", "2", "--s", "0.5", "--p", "two"]).status.code(), Some(2));
    let out =
        frachardy(&["verify", "--d", "2", "--s", "0.5", "--p", "2", "--theorem", "log_hardy_sobolev", "--radial"]);
    assert_eq!(out.status.code(), Some(2));
    let out = frachardy(&["constant", "--d", "2", "--s", "0.5", "--p", "2", "--output", "/nonexistent/dir/out.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cannot write"));
}

#[test]
fn output_is_deterministic() {
    let args = [HARDY_BUMP, &["--samples", "5000", "--seed", "42", "--format", "csv"]].concat();
    let a = frachardy(&args);
    let b = frachardy(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = frachardy(&[HARDY_BUMP, &["--samples", "5000", "--seed", "43", "--format", "csv"]].concat());
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn report_csv_columns() {
    let out = frachardy(&[HARDY_BUMP, &["--samples", "5000", "--format", "csv"]].concat());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), REPORT_COLUMNS.join(","));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), REPORT_COLUMNS.len());
    assert_eq!(row[0], "hardy");
    assert_eq!(row[14], "true");
}

#[test]
fn report_json_round_trips() {
    let out = frachardy(&[HARDY_BUMP, &["--samples", "5000"]].concat());
    let record: ReportRecord = serde_json::from_slice(&out.stdout).unwrap();
    let again = serde_json::to_string(&record).unwrap();
    assert_eq!(serde_json::from_str::<ReportRecord>(&again).unwrap(), record);
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["theorem_id", "params", "function", "lhs", "hardy", "constant", "margin", "sigma", "pass", "seed"] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn constant_csv_matches_golden() {
    let out = frachardy(&["constant", "--d", "3", "--s", "0.5", "--p", "2", "--format", "csv"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "d,s,p,k,alpha,beta,constant,constant_error,point_constant,point_constant_error,prefactor"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let c: f64 = row[6].parse().unwrap();
    assert!((c / (4.0 * std::f64::consts::PI) - 1.0).abs() < 1e-7, "{c}");
}

#[test]
fn counterexample_csv() {
    let out = frachardy(&["counterexample", "--d", "2", "--s", "0.5", "--p", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("eps,psi,slope"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 4);
    assert!((rows[0][2] - 0.5).abs() < 0.05);
    let out = frachardy(&["counterexample", "--d", "2", "--k", "1", "--s", "0.5", "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_suite_selection() {
    let out = frachardy(&["suite", "--filter", "no such suite"]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["results"], serde_json::json!([]));
    assert_eq!(value["all_pass"], true);
}

#[test]
fn filtered_suite_runs() {
    let out = frachardy(&["suite", "--filter", "hardy-sobolev", "--count", "2", "--samples", "20000"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let results = value["results"].as_array().unwrap();
    assert_eq!(results.len(), 1);
    assert_eq!(results[0]["reports"].as_array().unwrap().len(), 2);
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "# seminorm run\nd = 2\ns = 0.5\np = 2\nformat = csv\nseed = 11\n");
    let out = frachardy(&["seminorm", "--config", &cfg, "--radial"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("d,s,p,k,alpha,beta,function,value,std_error\n2,0.5,2,2,"));

    let out = frachardy(&["seminorm", "--config", &cfg, "--radial", "--s", "0.7", "--format", "json"]);
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["params"]["s"], 0.7);
    assert_eq!(value["seed"], 11);

    let bad = write_config(dir.path(), "d = 2\nshape = round\n");
    let out = frachardy(&["constant", "--config", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown key"));
}

#[test]
fn seed_from_environment() {
    let args = ["seminorm", "--d", "2", "--s", "0.5", "--p", "2", "--center", "0.3,0.2", "--samples", "2000"];
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_frachardy"));
        cmd.args(args).args(extra).env_remove("FRACHARDY_SEED");
        if let Some(v) = env {
            cmd.env("FRACHARDY_SEED", v);
        }
        let out = cmd.output().unwrap();
        serde_json::from_slice::<serde_json::Value>(&out.stdout).unwrap()["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None, &[]), frachardy::quadrature::DEFAULT_SEED);
    assert_eq!(run(Some("77"), &[]), 77);
    assert_eq!(run(Some("77"), &["--seed", "5"]), 5);
}
