use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn problems() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("problems")
}

fn qalloc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qalloc"))
        .args(args)
        .output()
        .expect("spawn qalloc")
}

fn write_problem(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn json_report(args: &[&str]) -> Value {
    let out = qalloc(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn example(name: &str) -> String {
    problems().join(name).to_string_lossy().into_owned()
}

fn close(v: &Value, expect: f64, tol: f64) -> bool {
    (v.as_f64().unwrap() - expect).abs() <= tol
}

#[test]
fn allocation_example() {
    let r = json_report(&["allocate", &example("allocation_h2.json")]);
    let res = &r["results"];
    let r2 = 2f64.sqrt();
    assert!(close(&res["performance"]["reliability"], 0.81 / 3.0 + 0.18 * (r2 - 1.0) / (r2 + 1.0), 1e-12));
    assert!(res["compare"]["fairness_dominance"].as_f64().unwrap() <= 0.0);
    assert_eq!(r["inputs"]["d"], 2);
    assert_eq!(r["provenance"]["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn allocation_qutrit_edge_values() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(
        &dir,
        "h2.json",
        r#"{"schema_version": 1, "kind": "allocation", "d": 3,
            "hypergraph": {"vertices": ["a", "b"], "edges": [["a", "b"], ["a"], ["b"]]}}"#,
    );
    let r = json_report(&["allocate", &p]);
    let values: Vec<f64> = r["results"]["edges"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["value"].as_f64().unwrap())
        .collect();
    let q = (3f64.sqrt() - 1.0) / (3f64.sqrt() + 1.0);
    assert!((values[0] - 0.5).abs() < 1e-12);
    assert!((values[1] - q).abs() < 1e-12 && (values[2] - q).abs() < 1e-12);
}

#[test]
fn allocation_h1_fairness() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(
        &dir,
        "h1.json",
        r#"{"schema_version": 1, "kind": "allocation", "d": 2, "objectives": ["fairness"],
            "hypergraph": {"vertices": ["a", "b", "c", "d"], "edges": [["a", "b", "c", "d"], ["a", "b", "c"]]}}"#,
    );
    let r = json_report(&["allocate", &p]);
    let t = 2f64.powf(1.5);
    let expect = (3.0f64 / 5.0).ln() + ((t - 1.0) / (t + 1.0)).ln();
    assert!(close(&r["results"]["performance"]["fairness"], expect, 1e-12));
}

#[test]
fn equitable_examples() {
    let r = json_report(&["equitable", &example("equitable_monogamy.json")]);
    assert!(close(&r["results"]["values"]["N_AB"], 0.5, 1e-12));
    assert!(close(&r["results"]["values"]["N_5"], 0.5, 1e-12));

    let r = json_report(&["equitable", &example("equitable_knapsack.json")]);
    assert_eq!(r["results"]["elimination_order"], serde_json::json!(["x", "y", "z"]));
    assert!(close(&r["results"]["values"]["z"], 0.4, 1e-12));

    let dir = tempfile::tempdir().unwrap();
    let sel = write_problem(
        &dir,
        "ex.json",
        r#"{"schema_version": 1, "kind": "equitable", "builder": {"type": "exclusivity", "gap_n": 0.9442, "gap_m": 1.0}}"#,
    );
    let r = json_report(&["equitable", &sel]);
    assert!(close(&r["results"]["values"]["N_m"], 1.0, 0.0) && close(&r["results"]["values"]["N_n"], 0.0, 0.0));
    assert_eq!(r["results"]["tied"], serde_json::json!([]));

    let tie = write_problem(
        &dir,
        "tie.json",
        r#"{"schema_version": 1, "kind": "equitable", "builder": {"type": "exclusivity", "gap_n": 0.5, "gap_m": 0.5}}"#,
    );
    let r = json_report(&["equitable", &tie]);
    assert_eq!(r["results"]["tied"].as_array().unwrap().len(), 1);

    let boxed = write_problem(
        &dir,
        "box.json",
        r#"{"schema_version": 1, "kind": "equitable", "problem": {"variables": [
            {"id": "p", "lower": 0.0, "upper": 0.25}, {"id": "q", "lower": 0.1, "upper": 0.75}]}}"#,
    );
    let r = json_report(&["equitable", &boxed]);
    assert!(close(&r["results"]["values"]["p"], 0.25, 1e-12) && close(&r["results"]["values"]["q"], 0.75, 1e-12));
}

#[test]
fn robustness_examples() {
    let r = json_report(&["robustness", &example("robustness_qubit.json"), "--tol", "1e-5"]);
    let res = &r["results"];
    assert!(close(&res["value"], 0.171573, 1e-3));
    assert!(res["closed_form"]["abs_difference"].as_f64().unwrap() < 1e-3);
    assert_eq!(res["certificate"]["parent_elements"].as_array().unwrap().len(), 4);
    assert_eq!(r["provenance"]["tolerances"]["bisection"], 1e-5);

    let dir = tempfile::tempdir().unwrap();
    let noisy = write_problem(
        &dir,
        "noisy.json",
        r#"{"schema_version": 1, "kind": "robustness", "assembly": {"type": "mub_pair", "d": 2, "visibility": 0.5}}"#,
    );
    let r = json_report(&["robustness", &noisy]);
    assert_eq!(r["results"]["value"], 0.0);
    assert!(r["results"].get("closed_form").is_none());

    let same = write_problem(
        &dir,
        "same.json",
        r#"{"schema_version": 1, "kind": "robustness", "assembly": {"type": "explicit", "povms": [
            [[[1, 0], [0, 0]], [[0, 0], [0, 1]]],
            [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]]}}"#,
    );
    let r = json_report(&["robustness", &same]);
    assert_eq!(r["results"]["value"], 0.0);
}

#[test]
fn bell_verify_examples() {
    let r = json_report(&["bell-verify", &example("bell_verify.json"), "--seed", "42"]);
    assert!(r["results"]["max_residual"].as_f64().unwrap() <= 1e-10);
    assert_eq!(r["results"]["trials"], 100);

    let r = json_report(&["bell-verify", "--trials", "1", "--source", "zero"]);
    assert_eq!(r["results"]["max_residual"], 0.0);

    // a zero threshold cannot be met by floating-point residuals
    let out = qalloc(&["bell-verify", "--trials", "5", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

fn strip_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_time_seconds");
    v
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["bell-verify", "--seed", "7", "--trials", "20"],
        vec!["equitable", "EQ"],
        vec!["robustness", "ROB", "--tol", "1e-4"],
    ] {
        let eq = example("equitable_knapsack.json");
        let rob = example("robustness_qubit.json");
        let args: Vec<&str> = args
            .iter()
            .map(|a| match *a {
                "EQ" => eq.as_str(),
                "ROB" => rob.as_str(),
                other => other,
            })
            .collect();
        let a = strip_timing(json_report(&args));
        let b = strip_timing(json_report(&args));
        assert_eq!(a, b, "{args:?}");
    }
    let a = strip_timing(json_report(&["bell-verify", "--seed", "1", "--trials", "3"]));
    let b = strip_timing(json_report(&["bell-verify", "--seed", "2", "--trials", "3"]));
    assert_ne!(a["results"], b["results"]);
}

#[test]
fn out_flag_and_formats() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    let status = qalloc(&[
        "allocate",
        &example("allocation_h2.json"),
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    assert!(status.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<(String, String)> = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].to_string(), r[1].to_string())
        })
        .collect();
    assert!(rows.iter().any(|(k, _)| k == "performance.reliability"));
    assert!(rows.iter().any(|(k, v)| k == "provenance.seed" && v == "0"));

    let text = qalloc(&["equitable", &example("equitable_monogamy.json"), "--format", "text"]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("values.N_AB"));
}

fn expect_exit(dir: &tempfile::TempDir, cmd: &str, body: &str, code: i32, needle: &str) {
    let p = write_problem(dir, "p.json", body);
    let out = qalloc(&[cmd, &p]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(out.status.code(), Some(code), "{body}\nstderr: {err}");
    assert!(err.contains(needle), "stderr {err:?} lacks {needle:?}");
}

#[test]
fn schema_errors_exit_2_with_path() {
    let dir = tempfile::tempdir().unwrap();
    expect_exit(&dir, "allocate", "not json", 2, "schema error at $");
    expect_exit(&dir, "allocate", r#"{"kind": "allocation"}"#, 2, "schema_version");
    expect_exit(&dir, "allocate", r#"{"schema_version": 9, "kind": "allocation"}"#, 2, "schema_version");
    expect_exit(&dir, "allocate", r#"{"schema_version": 1, "kind": "equitable"}"#, 2, "at kind");
    expect_exit(
        &dir,
        "allocate",
        r#"{"schema_version": 1, "kind": "allocation", "d": "two",
            "hypergraph": {"vertices": ["a"], "edges": [["a"]]}}"#,
        2,
        "at d",
    );
    expect_exit(
        &dir,
        "allocate",
        r#"{"schema_version": 1, "kind": "allocation", "d": 2,
            "hypergraph": {"vertices": ["a"], "edges": [["a", "z"]]}}"#,
        2,
        "at hypergraph",
    );
    expect_exit(
        &dir,
        "allocate",
        r#"{"schema_version": 1, "kind": "allocation", "d": 2, "objectives": ["reliability"],
            "hypergraph": {"vertices": ["a"], "edges": [["a"]]}}"#,
        2,
        "at priors",
    );
    expect_exit(
        &dir,
        "equitable",
        r#"{"schema_version": 1, "kind": "equitable", "problem": {"variables": [{"id": "x", "lower": 0, "uper": 1}]}}"#,
        2,
        "problem.variables[0]",
    );
    expect_exit(
        &dir,
        "equitable",
        r#"{"schema_version": 1, "kind": "equitable", "problem": {"variables": [{"id": "x", "lower": 0, "upper": 1}],
            "constraints": [{"coefficients": {"y": 1}, "budget": 1}]}}"#,
        2,
        "at problem",
    );
    expect_exit(
        &dir,
        "robustness",
        r#"{"schema_version": 1, "kind": "robustness", "assembly": {"type": "explicit", "povms": [[[[1, 0], [0, 0]]]]}}"#,
        2,
        "assembly.povms[0]",
    );
}

#[test]
fn domain_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    expect_exit(
        &dir,
        "allocate",
        r#"{"schema_version": 1, "kind": "allocation", "d": 2, "compare": [0.0, 0.1],
            "hypergraph": {"vertices": ["a", "b"], "edges": [["a", "b"], ["b"]]}}"#,
        3,
        "compare",
    );
    expect_exit(
        &dir,
        "equitable",
        r#"{"schema_version": 1, "kind": "equitable", "builder": {"type": "monogamy", "lambda": 5.0}}"#,
        3,
        "lambda",
    );
    expect_exit(
        &dir,
        "robustness",
        r#"{"schema_version": 1, "kind": "robustness", "assembly": {"type": "mub_pair", "d": 2, "visibility": 1.5}}"#,
        3,
        "visibility",
    );
}

#[test]
fn infeasible_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    expect_exit(
        &dir,
        "equitable",
        r#"{"schema_version": 1, "kind": "equitable", "problem": {"variables": [
            {"id": "x", "lower": 0.6, "upper": 1}, {"id": "y", "lower": 0.6, "upper": 1}],
            "constraints": [{"coefficients": {"x": 1, "y": 1}, "budget": 1}]}}"#,
        4,
        "constraint 0",
    );
}

#[test]
fn cap_exceeded_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    expect_exit(
        &dir,
        "robustness",
        r#"{"schema_version": 1, "kind": "robustness", "assembly": {"type": "mub_pair", "d": 9}}"#,
        5,
        "cap exceeded",
    );
    expect_exit(
        &dir,
        "robustness",
        r#"{"schema_version": 1, "kind": "robustness", "s_max": 0.05, "assembly": {"type": "mub_pair", "d": 2}}"#,
        5,
        "s_max",
    );
}
