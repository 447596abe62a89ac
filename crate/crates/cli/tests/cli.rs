use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pyramid-gh")).args(args).output().expect("binary runs")
}

fn run_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pyramid-gh"))
        .args(args)
        .env("PYRAMID_GH_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pyramid-gh-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn space_files_round_trip() {
    let path = scratch("sigma3.json");
    let p = path.to_str().unwrap();
    let made = json(&["space", "sigma:3:1", "--save", p]);
    assert_eq!(made["n"], 3);
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(file["matrix"].as_array().unwrap().len(), 3);
    let seen = json(&["space", p, "--inspect"]);
    assert_eq!(seen["diam"], 1.0);
    assert_eq!(seen["rad"], 1.0);
}

#[test]
fn invalid_files_are_reported() {
    let path = scratch("bad.json");
    std::fs::write(&path, r#"{"n": 3, "matrix": [[0,1,3],[1,0,1],[3,1,0]]}"#).unwrap();
    let out = run(&["space", path.to_str().unwrap(), "--inspect"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("triangle"));
}

#[test]
fn gh_values() {
    let v = json(&["gh", "sigma:2:1", "sigma:2:2", "--exact"]);
    assert_eq!(v["lo"], 0.5);
    assert_eq!(v["hi"], 0.5);
    assert!(v["witness"].is_array());
    let same = json(&["gh", "path:2:4", "path:2:4"]);
    assert_eq!(same["hi"], 0.0);
    let spiders = json(&["gh", "spider:8:1:2", "spider:16:1:2", "--bounds"]);
    assert!(spiders["lo"].as_f64().unwrap() >= 0.4);
}

#[test]
fn exact_gh_reports_the_limit() {
    let out = run(&["gh", "spider:16:1:2", "spider:8:1:2", "--exact", "--limit", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--bounds"));
}

#[test]
fn rho_reports_intervals() {
    let v = json(&["rho", "sigma:1:1", "sigma:2:1"]);
    let (lo, hi) = (v["lo"].as_f64().unwrap(), v["hi"].as_f64().unwrap());
    assert!(lo <= 0.25 && 0.25 <= hi, "[{lo}, {hi}]");
    assert_eq!(v["per_N"].as_array().unwrap().len(), 8);
    let same = json(&["rho", "random:4:3", "random:4:3"]);
    assert_eq!(same["lo"], 0.0);
    let far = json(&["rho", "sigma:1:1", "max"]);
    assert!(far["hi"].as_f64().unwrap() <= 2.0 + far["tail"].as_f64().unwrap());
}

#[test]
fn csv_has_a_schema_header() {
    let out = run(&["rho", "sigma:1:1", "sigma:2:1", "--format", "csv", "--nmax", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# schema: pyramid-gh/rho/v1");
    assert_eq!(lines[1], "N,lo,hi,hi_certified");
    assert_eq!(lines.len(), 2 + 3 + 2);
    assert!(lines.last().unwrap().starts_with("total,"));
}

#[test]
fn pointed_commands() {
    let v = json(&["rho-pointed", "path:2:2", "spider:2:1:1"]);
    assert!(v["lo"].as_f64().unwrap() <= v["hi"].as_f64().unwrap());
    let z = json(&["rho0", "sigma:2:1", "sigma:2:1", "--nmax", "3"]);
    assert_eq!(z["total_lo"], 0.0);
    assert_eq!(z["nodes"].as_array().unwrap().len(), 32);
    assert_eq!(run(&["rho0", "sigma:2:1", "max"]).status.code(), Some(2));
}

#[test]
fn sequences() {
    let rows = json(&["sequence", "--target", "sigma:3:1", "sigma:3:1", "sigma:3:1"]);
    assert!(rows.as_array().unwrap().iter().all(|r| r["lo"] == 0.0));
    let rows = json(&["sequence", "--target", "sigma:6:1", "sigma:1:1", "sigma:2:1", "sigma:3:1"]);
    for (n, r) in (1..=3).zip(rows.as_array().unwrap()) {
        let want = 0.5f64.powi(n + 1);
        assert!(r["lo"].as_f64().unwrap() <= want + 1e-9 && want <= r["hi"].as_f64().unwrap() + 1e-9);
    }
    let slice = json(&["sequence", "--target", "sigma:3:1", "--metric", "slice", "--slice-n", "2", "sigma:2:1"]);
    assert_eq!(slice[0]["lo"], 0.0);
}

#[test]
fn output_does_not_depend_on_threads() {
    let args = ["rho", "spider:3:1:2", "random:5:11", "--format", "csv"];
    let one = run_threads(&args, "1");
    let four = run_threads(&args, "4");
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn verify_suite() {
    let list = run(&["verify", "--list"]);
    let text = String::from_utf8(list.stdout).unwrap();
    assert_eq!(text.lines().count(), 13);
    assert!(text.lines().next().unwrap().starts_with("C01"));
    let out = run(&["verify", "--suite", "paper", "--only", "6", "--format", "csv"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("6,PASS"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[PASS] C06"));
    assert_eq!(run(&["verify", "--suite", "other"]).status.code(), Some(2));
}

#[test]
fn bad_parameters_are_rejected() {
    assert_eq!(run(&["rho", "sigma:1:1", "sigma:2:1", "--delta", "0"]).status.code(), Some(2));
    assert_eq!(run(&["rho", "sigma:1:1", "cube:2"]).status.code(), Some(2));
}
