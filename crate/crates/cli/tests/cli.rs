use std::io::Write;

use assert_cmd::Command;
use serde_json::Value;

const SIC_A: &str = r#"{"alpha": 1, "a": [0.5773502691896258, 0, 0]}"#;
const SIC_B: &str = r#"{"alpha": 1, "a": [0, 0.5773502691896258, 0]}"#;

fn coexist() -> Command {
    Command::cargo_bin("coexist").unwrap()
}

fn json(args: &[&str], code: i32) -> Value {
    let out = coexist()
        .args(args)
        .assert()
        .code(code)
        .get_output()
        .stdout
        .clone();
    serde_json::from_slice(&out).unwrap()
}

fn csv_rows(out: &[u8]) -> Vec<(f64, f64, String)> {
    let text = String::from_utf8(out.to_vec()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("bx,r,regime"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (
                f[0].parse().unwrap(),
                f[1].parse().unwrap(),
                f[2].to_string(),
            )
        })
        .collect()
}

#[test]
fn orthogonal_projections_are_not_coexistent() {
    let v = json(
        &[
            "decide",
            r#"{"alpha":1,"a":[0,0,1]}"#,
            r#"{"alpha":1,"a":[0,1,0]}"#,
        ],
        1,
    );
    assert_eq!(v["coexistent"], false);
    assert_eq!(v["regime"], "C3");
}

#[test]
fn figure_a_pair_is_c1() {
    let v = json(
        &[
            "decide",
            r#"{"alpha":0.6,"a":[0.5,0,0]}"#,
            r#"{"alpha":0.6,"a":[0,0.6,0]}"#,
        ],
        0,
    );
    assert_eq!(v["coexistent"], true);
    assert_eq!(v["regime"], "C1");
    assert!(v.get("b0").is_none());
}

#[test]
fn sic_witness() {
    let v = json(&["decide", "--witness", SIC_A, SIC_B], 0);
    let w = &v["witness"];
    assert_eq!(w["gamma"].as_f64().unwrap(), 0.5);
    for c in w["g"].as_array().unwrap() {
        assert!((c.as_f64().unwrap() - 0.288675134594813).abs() < 1e-12);
    }
    let effects = w["effects"].as_array().unwrap();
    assert_eq!(effects.len(), 4);
    let total: f64 = effects.iter().map(|e| e["alpha"].as_f64().unwrap()).sum();
    assert!((total - 2.0).abs() < 1e-12);

    let same = json(&["witness", SIC_A, SIC_B], 0);
    assert_eq!(same["witness"], v["witness"]);
}

#[test]
fn witness_command_fails_for_incompatible_pair() {
    let v = json(
        &[
            "witness",
            r#"{"alpha":1,"a":[0,0,1]}"#,
            r#"{"alpha":1,"a":[1,0,0]}"#,
        ],
        1,
    );
    assert!(v.get("witness").is_none());
}

#[test]
fn oracle_flag_reports_margin_and_certificate() {
    let v = json(&["decide", "--oracle", "--grid", "500", SIC_A, SIC_B], 0);
    let o = &v["oracle"];
    assert_eq!(o["coexistent"], true);
    assert!(o["margin"].as_f64().unwrap() < 0.0);
    assert!(o["gamma"].is_number());
    assert_eq!(o["g"].as_array().unwrap().len(), 3);
}

#[test]
fn matrix_spec_and_input_file() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(
        f,
        r#"{{"a": {{"matrix": [[1,0],[0,0],[0,0],[0,0]]}}, "b": {{"alpha": 1, "a": [0, 1, 0]}}}}"#
    )
    .unwrap();
    let v = json(&["decide", "--input", f.path().to_str().unwrap()], 1);
    assert_eq!(v["coexistent"], false);
}

#[test]
fn malformed_specs_exit_2() {
    let out = coexist()
        .args(["decide", r#"{"alpha":1}"#, r#"{"alpha":1,"a":[0,1,0]}"#])
        .assert()
        .code(2)
        .get_output()
        .clone();
    assert!(String::from_utf8_lossy(&out.stderr).contains("A: missing field `a`"));
    assert!(out.stdout.is_empty());

    coexist()
        .args(["decide", "not json", SIC_B])
        .assert()
        .code(2);
    coexist()
        .args(["decide", r#"{"alpha":0.2,"a":[0,0,0.5]}"#, SIC_B])
        .assert()
        .code(2);
    coexist().args(["decide", SIC_A]).assert().code(2);
    coexist().args(["frobnicate"]).assert().code(2);
    coexist()
        .args(["decide", "--input", "/nonexistent/pair.json"])
        .assert()
        .code(2);
}

#[test]
fn help_exits_0() {
    coexist().arg("--help").assert().code(0);
}

#[test]
fn boundary_fig1a_is_flat() {
    let out = coexist()
        .args(["boundary", "--preset", "fig1a"])
        .assert()
        .code(0)
        .get_output()
        .stdout
        .clone();
    let rows = csv_rows(&out);
    assert!(rows.len() >= 201);
    assert!(rows.iter().all(|(_, r, g)| *r == 0.6 && g == "C1"));
}

#[test]
fn boundary_fig1c_minimum_at_zero() {
    let out = coexist()
        .args(["boundary", "--preset", "fig1c", "--samples", "101"])
        .assert()
        .code(0)
        .get_output()
        .stdout
        .clone();
    let rows = csv_rows(&out);
    let min = rows
        .iter()
        .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
        .unwrap();
    assert!(min.0.abs() < 1e-12, "{min:?}");
    assert_eq!(rows.first().unwrap().0, -1.0);
    assert_eq!(rows.last().unwrap().0, 1.0);
}

#[test]
fn boundary_junction_rows() {
    let v = json(
        &[
            "boundary",
            "--alpha",
            "0.6",
            "--a",
            "0.6",
            "--beta",
            "0.9",
            "--samples",
            "64",
            "--format",
            "json",
        ],
        0,
    );
    assert!((v["b0"].as_f64().unwrap() - 1.0 / 15.0).abs() < 1e-12);
    assert!((v["w"].as_f64().unwrap() - 5.0 / 6.0).abs() < 1e-12);
    let xs: Vec<f64> = v["samples"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["bx"].as_f64().unwrap())
        .collect();
    for j in [1.0 / 15.0 - 5.0 / 6.0, 1.0 / 15.0 + 5.0 / 6.0] {
        assert!(xs.iter().any(|x| (x - j).abs() < 1e-12), "no row at {j}");
    }
}

#[test]
fn boundary_rejects_bad_parameters() {
    coexist()
        .args(["boundary", "--alpha", "1.5", "--a", "0.1", "--beta", "0.5"])
        .assert()
        .code(2);
    coexist()
        .args(["boundary", "--alpha", "0.5", "--a", "0.6", "--beta", "0.5"])
        .assert()
        .code(2);
    coexist()
        .args(["boundary", "--preset", "fig1a", "--samples", "3"])
        .assert()
        .code(2);
    coexist()
        .args(["boundary", "--preset", "fig9"])
        .assert()
        .code(2);
    coexist()
        .args(["boundary", "--alpha", "0.5"])
        .assert()
        .code(2);
}

#[test]
fn sharpness_formats() {
    let v = json(&["sharpness", r#"{"alpha":1,"a":[0,0,1]}"#], 0);
    assert_eq!(v["sharpness"].as_f64().unwrap(), 1.0);
    assert_eq!(v["projection"], true);

    let out = coexist()
        .args([
            "sharpness",
            "--format",
            "csv",
            r#"{"alpha":0.6,"a":[0.5,0,0]}"#,
        ])
        .assert()
        .code(0)
        .get_output()
        .stdout
        .clone();
    assert_eq!(
        String::from_utf8(out).unwrap(),
        "alpha,ax,ay,az,sharpness\n0.6,0.5,0,0,0.328147515577986\n"
    );
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in [
        vec![
            "decide",
            "--witness",
            "--oracle",
            "--grid",
            "300",
            SIC_A,
            SIC_B,
        ],
        vec!["boundary", "--preset", "fig1b", "--format", "json"],
        vec!["selftest", "--samples", "3", "--seed", "7", "--grid", "200"],
    ] {
        let first = coexist().args(&args).output().unwrap();
        let second = coexist().args(&args).output().unwrap();
        assert_eq!(first.stdout, second.stdout);
        assert_eq!(first.status.code(), second.status.code());
    }
}

#[test]
fn selftest_with_injected_pairs() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(
        f,
        r#"[{{"a": {{"alpha": 1, "a": [0, 0, 1]}}, "b": {{"alpha": 0.5, "a": [0, 0, 0.3]}}}},
            {{"a": {{"alpha": 3, "a": [0, 0, 0]}}, "b": {{"alpha": 1, "a": [0, 0, 0]}}}}]"#
    )
    .unwrap();
    let out = coexist()
        .args([
            "selftest",
            "--samples",
            "1",
            "--seed",
            "5",
            "--grid",
            "200",
            "--pairs",
        ])
        .arg(f.path())
        .assert()
        .code(0)
        .get_output()
        .clone();
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped input"));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["injected"], 2);
    let oracle = v["suites"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["name"] == "oracle-agreement")
        .unwrap();
    assert_eq!(oracle["failures"], 0);
    assert!(oracle["skipped"].as_u64().unwrap() >= 1);
}

#[test]
fn selftest_rejects_bad_flags() {
    coexist()
        .args(["selftest", "--samples", "0"])
        .assert()
        .code(2);
    coexist().args(["selftest", "--grid", "5"]).assert().code(2);
    coexist()
        .args(["selftest", "--pairs", "/nonexistent.json"])
        .assert()
        .code(2);
}
