use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn twistdisc(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_twistdisc"));
    cmd.args(args).env_remove("TWISTDISC_OUT_DIR");
    if let Some(dir) = out_dir {
        cmd.env("TWISTDISC_OUT_DIR", dir);
    }
    cmd.output().expect("spawn twistdisc")
}

fn json_of(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn picard_order_reports_class_order() {
    let v = json_of(&twistdisc(
        &["--no-timestamp", "picard-order", "--p", "2", "--m", "1", "--q", "2", "--c", "1+T"],
        None,
    ));
    assert_eq!(v["schema"], "twistdisc/1");
    assert_eq!(v["ok"], true);
    assert_eq!(v["result"]["order"], 2);
    assert_eq!(v["result"]["divides_pm"], true);
    assert_eq!(v["params"]["char_p"]["p"], 2);
    assert!(v.get("timestamp_unix").is_none());
}

#[test]
fn law_for_p2_is_multiplicative_group() {
    let v = json_of(&twistdisc(
        &["--no-timestamp", "lt-series", "--p", "2", "--e", "1", "--q", "2", "--deg", "6", "--op", "law"],
        None,
    ));
    assert_eq!(v["ok"], true);
    let display = v["result"]["series"]["display"].as_str().unwrap();
    let terms: Vec<&str> = display.split(" + (").collect();
    assert_eq!(terms.len(), 3, "{display}");
    assert!(terms[0].ends_with(")*X"));
    assert!(terms[1].ends_with(")*Y"));
    assert!(terms[2].ends_with(")*X*Y"));
    assert!(display.starts_with("(1 + O(2^"));
}

#[test]
fn radius_three_has_valuation_one_quarter() {
    let v = json_of(&twistdisc(&["--no-timestamp", "radius", "--p", "2", "--e", "1", "--q", "2", "--n", "3"], None));
    assert_eq!(v["ok"], true);
    assert_eq!(v["result"]["v_r_n"], "1/4");
    let ladder = v["result"]["ladder"].as_array().unwrap();
    assert_eq!(ladder.last().unwrap()["tie"], true);
}

#[test]
fn symbol_of_ramified_element() {
    let v = json_of(&twistdisc(
        &["--no-timestamp", "symbol", "--field", "p=2,e=2,E=pi^2-2,prec=32", "--elem", "pi + pi^2*z"],
        None,
    ));
    assert_eq!(v["result"]["degree"], "1/2");
    assert_eq!(v["result"]["symbol"]["symbol"], "t");
}

#[test]
fn sweep_csv_is_reproducible_in_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--no-timestamp", "--format", "csv", "sweep", "--p", "2,3", "--m", "1,2", "--cases", "3", "--seed", "9"];
    let first = twistdisc(&args, Some(dir.path()));
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let path = dir.path().join("sweep-9.csv");
    let a = std::fs::read(&path).unwrap();
    assert!(twistdisc(&args, Some(dir.path())).status.success());
    let b = std::fs::read(&path).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("cell,seed,p,q,m,c,order,divides_pm,lprime_size"));
    assert_eq!(lines.count(), 12);
}

#[test]
fn explicit_output_path_wins() {
    let dir = tempfile::tempdir().unwrap();
    let out = twistdisc(&["--output", "hyp.json", "hyp", "--p", "3", "--m", "2"], Some(dir.path()));
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(dir.path().join("hyp.json")).unwrap()).unwrap();
    assert_eq!(v["result"]["holds"], true);
    assert!(v["timestamp_unix"].is_u64());
}

#[test]
fn config_file_drives_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "command = \"radius\"\nn = 2\nseed = 4\n\n[field]\np = 3\ne = 1\nq = 3\n",
    )
    .unwrap();
    let v = json_of(&twistdisc(&["--no-timestamp", "--config", cfg.to_str().unwrap()], None));
    assert_eq!(v["command"], "radius");
    assert_eq!(v["seed"], 4);
    assert_eq!(v["result"]["v_r_n"], "1/6");
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        &["bogus"][..],
        &["--format", "csv", "hyp", "--p", "2"],
        &["picard-order", "--p", "4", "--c", "1"],
        &["lt-series", "--p", "2", "--deg", "6", "--op", "law", "--prec", "10"],
    ] {
        let out = twistdisc(args, None);
        assert_eq!(out.status.code(), Some(64), "args {args:?}");
    }
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "command = \"hyp\"\nflavour = 1\n").unwrap();
    assert_eq!(twistdisc(&["--config", cfg.to_str().unwrap()], None).status.code(), Some(64));
}

#[test]
fn check_suite_passes() {
    let v = json_of(&twistdisc(&["--no-timestamp", "check", "--suite", "divisor", "--cases", "5"], None));
    assert_eq!(v["ok"], true);
}
