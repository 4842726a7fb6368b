use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn qgame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgame"))
        .args(args)
        .output()
        .expect("qgame runs")
}

fn bundled(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("specs")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", stderr(o));
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

fn write_spec(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("game.json");
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn version_and_help() {
    let o = qgame(&["--version"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains(env!("CARGO_PKG_VERSION")));
    let o = qgame(&["--help"]);
    assert_eq!(code(&o), 0);
    for cmd in ["eval", "nash", "react", "simulate", "uncertainty", "interference", "lattice"] {
        assert!(String::from_utf8_lossy(&o.stdout).contains(cmd), "{cmd} missing from help");
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["frobnicate"][..],
        &["nash", "--spec", "x.json", "--bogus"],
        &["simulate", "--spec", "x.json", "--alice", "0,0", "--bob", "0,0"],
        &["eval", "--spec", "x.json", "--alice", "0", "--bob", "0,0"],
        &["uncertainty", "--alpha", "0.1", "--theta", "0", "--csv"],
    ] {
        assert_eq!(code(&qgame(args)), 2, "{args:?}");
    }
}

#[test]
fn missing_spec_exits_2() {
    let o = qgame(&["nash", "--spec", "/nonexistent/game.json"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("cannot read"));
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_spec(dir.path(), "{\n  \"pairs\": 3,\n  \"frame_a\": oops\n}\n");
    let o = qgame(&["nash", "--spec", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3, column"), "{}", stderr(&o));
}

#[test]
fn spec_invariants_exit_3_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            r#"{"pairs": 2, "frame_a": {"kind": "fixed_xyz"}, "frame_b": {"kind": "fixed_xyz"}, "payoff": {"diag": [1,2,3,4]}}"#,
            "frame_a.kind",
        ),
        (
            r#"{"pairs": 3, "frame_a": {"kind": "fixed_xyz"}, "frame_b": {"kind": "fixed_xyz"}, "payoff": {"diag": [1,2,3,4]}}"#,
            "payoff.diag",
        ),
        (
            r#"{"pairs": 2, "frame_a": {"kind": "planar", "angles": [0, 1]}, "frame_b": {"kind": "planar", "angles": [0]}, "payoff": {"diag": [1,2,3,4]}}"#,
            "frame_b.angles",
        ),
    ];
    for (body, field) in cases {
        let p = write_spec(dir.path(), body);
        let o = qgame(&["nash", "--spec", p.to_str().unwrap()]);
        assert_eq!(code(&o), 3, "{body}");
        assert!(stderr(&o).contains(field), "{}", stderr(&o));
    }
}

#[test]
fn domain_errors_exit_4() {
    assert_eq!(code(&qgame(&["interference", "--alpha", "2.0", "--theta-a", "0.1"])), 4);
    assert_eq!(code(&qgame(&["lattice", "--pairs", "1"])), 4);
    assert_eq!(code(&qgame(&["nash", "--coeffs", "0,0,0,0", "--grid", "0.01"])), 4);
    let o = qgame(&[
        "simulate", "--spec", &bundled("case1.json"), "--alice", "0.4,0", "--bob", "0.4,0",
        "--prep-rounds", "1", "--seed", "1",
    ]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("no definite rounds"));
}

#[test]
fn eval_degrees_match_radians() {
    let spec = bundled("case1.json");
    let deg = json(&qgame(&["eval", "--spec", &spec, "--alice", "22.5,0", "--bob", "22.5,0", "--degrees"]));
    let rad = json(&qgame(&["eval", "--spec", &spec, "--alice", "0.39269908169872414,0", "--bob", "0.39269908169872414,0"]));
    assert_eq!(deg["result"], rad["result"]);
    let v = deg["result"]["expected_payoff"].as_f64().unwrap();
    assert!((v - 2.0).abs() < 1e-12);
    assert_eq!(deg["schema_version"], 1);
    assert_eq!(deg["spec_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn nash_reports_case_one() {
    let v = json(&qgame(&["nash", "--spec", &bundled("case1.json")]));
    let eqs = v["result"]["equilibria"].as_array().unwrap();
    assert_eq!(eqs.len(), 1);
    assert!((eqs[0]["alpha_star"].as_f64().unwrap() - std::f64::consts::FRAC_PI_8).abs() < 1e-6);
    assert!((eqs[0]["value"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(eqs[0]["kind"], "interior_saddle");
    assert_eq!(v["inputs"]["grid"], 1e-3);
    assert_eq!(v["inputs"]["eps"], 1e-6);
}

#[test]
fn nash_text_uses_six_digits() {
    let o = qgame(&["nash", "--coeffs", "7,1,-2,1.5", "--text"]);
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.contains("alpha* = 0.392699 (22.5 deg)"), "{s}");
}

#[test]
fn react_csv_has_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curves.csv");
    let o = qgame(&["react", "--spec", &bundled("case1.json"), "--grid", "0.01", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("player,opponent_angle,best_response,payoff"));
    let rows: Vec<_> = lines.collect();
    let n = (std::f64::consts::PI / 0.01).ceil() as usize;
    assert!(rows.iter().filter(|r| r.starts_with("alice,")).count() >= n);
    assert!(rows.iter().filter(|r| r.starts_with("bob,")).count() >= n);
}

#[test]
fn lattice_lists_violation() {
    let v = json(&qgame(&["lattice", "--pairs", "2"]));
    let viol = v["result"]["violations"].as_array().unwrap();
    assert!(viol.contains(&serde_json::json!(["1", "2", "4"])));
    let text = String::from_utf8(qgame(&["lattice", "--pairs", "2", "--text"]).stdout).unwrap();
    assert!(text.contains("(1, 2, 4)"));
}

#[test]
fn uncertainty_equality_case() {
    let v = json(&qgame(&["uncertainty", "--alpha", "45", "--theta", "90", "--degrees"]));
    let r = &v["result"]["relation"];
    assert!((r["lhs"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((r["rhs"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["result"]["equality"], true);
    assert_eq!(v["spec_sha256"], Value::Null);
}

#[test]
fn simulate_is_replayable() {
    let spec = bundled("case1.json");
    let args = [
        "simulate", "--spec", &spec, "--alice", "22.5,0", "--bob", "22.5,0", "--degrees",
        "--prep-rounds", "100000", "--meas-rounds", "100000", "--seed", "42",
    ];
    let a = qgame(&args);
    let b = qgame(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v["inputs"].get("workers").is_none());
    let other = qgame(&[&args[..args.len() - 1], &["43"]].concat());
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn simulate_csv_has_pooled_row() {
    let o = qgame(&[
        "simulate", "--spec", &bundled("case3.json"), "--alice", "1.53,0", "--bob", "1.2,0",
        "--prep-rounds", "20000", "--meas-rounds", "20000", "--seed", "5", "--csv",
    ]);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert!(lines[0].starts_with("subgame,rounds,"));
    assert_eq!(lines.len(), 5);
    assert!(lines[4].starts_with("pooled,"));
}
