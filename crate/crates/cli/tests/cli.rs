use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logcoef"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn stdout(args: &[&str]) -> String {
    String::from_utf8(run(args).stdout).expect("utf-8 output")
}

#[test]
fn certify_exit_codes() {
    assert_eq!(code(&["certify", "--family", "twofactornum:alpha=1,beta=1", "--N", "5"]), 0);
    assert_eq!(code(&["certify", "--family", "ratquadnum:a=0,b=953/800", "--N", "3"]), 0);
    assert_eq!(code(&["certify", "--family", "ratquadnum:a=0,b=6/5", "--N", "2"]), 1);
    assert_eq!(code(&["certify", "--family", "nonsense", "--N", "2"]), 3);
    assert_eq!(code(&["certify", "--family", "reciprocal:alpha=1"]), 3);
    assert_eq!(code(&["--precision", "64", "constants"]), 3);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn certify_report_json() {
    let out = stdout(&["certify", "--family", "ratquadnum:a=0,b=6/5", "--N", "2", "--no-timestamp"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"]["status"], "FAILED");
    assert_eq!(v["verdict"]["stage"], "necessary_v");
    assert_eq!(v["N"], 2);
    assert!(v.get("generated_at").is_none());
}

#[test]
fn output_is_deterministic_without_timestamp() {
    let args = ["certify", "--family", "twofactornum:alpha=1,beta=1", "--N", "5", "--no-timestamp"];
    assert_eq!(stdout(&args), stdout(&args));
    let with = stdout(&["certify", "--family", "twofactornum:alpha=1,beta=1", "--N", "5"]);
    assert!(with.contains("generated_at"));
}

#[test]
fn appendix_verify_builtin() {
    let out = run(&["appendix-verify", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["matched"], 23);
    assert_eq!(v["total"], 23);
    assert!(v["tables"][1]["profiles"][0]["profile"].is_object());
}

#[test]
fn appendix_verify_detects_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tables.json");
    let builtin = include_str!("../../core/data/appendix.json");
    let mut v: Value = serde_json::from_str(builtin).unwrap();
    v["roth5"]["polynomials"][0][0] = Value::String("12345/678".into());
    std::fs::write(&path, v.to_string()).unwrap();
    let out = run(&["appendix-verify", "--tables", path.to_str().unwrap(), "--format", "text"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Q_1 coefficient of x^0"), "{text}");
    assert!(text.contains("expected 4115/226"));
}

#[test]
fn radius_accepts_rationals() {
    let out = stdout(&["radius", "--b", "1/2"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("b,r1,r2,r2_minus_r1,r3,r4,r4_minus_r3"));
    assert!(lines.next().unwrap().starts_with("0.5,"));
    assert_eq!(code(&["radius", "--b", "5/2"]), 3);
}

#[test]
fn figure_one_has_negative_values() {
    let out = stdout(&["figure-data", "fig1"]);
    let rows: Vec<(f64, f64)> = out
        .lines()
        .skip(1)
        .map(|l| {
            let (x, y) = l.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 401);
    assert!(rows.iter().any(|&(x, y)| x > -1.0 && x < 1.0 && y < 0.0));
}

#[test]
fn radius_figures() {
    let fig2 = stdout(&["figure-data", "fig2", "--points", "21"]);
    assert!(fig2.starts_with("b,r1,r2,r2_minus_r1"));
    let fig3 = stdout(&["figure-data", "fig3", "--points", "21"]);
    let rows: Vec<Vec<f64>> = fig3
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 21);
    assert!(rows.iter().all(|r| r[2] > r[1]));
    assert!(rows.windows(2).all(|w| w[1][1] >= w[0][1] && w[1][2] >= w[0][2]));
}

#[test]
fn constants_and_series_check() {
    let out = stdout(&["constants", "--format", "csv"]);
    assert!(out.starts_with("name,value,error,definition"));
    assert!(out.contains("\"E(1,1/20)\",0.62787357"));
    let out = run(&["series-check"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!String::from_utf8(out.stdout).unwrap().contains("FAIL"));
}

#[test]
fn writes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    assert_eq!(code(&["radius", "--b", "0", "--out", path.to_str().unwrap()]), 0);
    assert!(std::fs::read_to_string(path).unwrap().contains("0.5576"));
}
