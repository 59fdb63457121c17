use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hg_entangle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hg-entangle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = hg_entangle(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn qcurve_csv_is_deterministic() {
    let args = ["qcurve", "--a", "0.25,1.0", "--m", "0,1"];
    let first = stdout(&args);
    assert_eq!(first, stdout(&args));
    assert!(!first.contains('\r'));
    let lines: Vec<&str> = first.lines().collect();
    assert_eq!(lines[0], "a,Q0,Q1");
    assert_eq!(lines.len(), 3);
    // Q_0(1) = sqrt(3)/2.
    assert_eq!(lines[2].split(',').nth(1).unwrap(), "8.66025403784e-1");
}

#[test]
fn qcurve_default_grid_has_one_hundred_rows() {
    let csv = stdout(&["qcurve"]);
    assert_eq!(csv.lines().count(), 101);
    assert!(csv.lines().nth(1).unwrap().starts_with("1.00000000000e-2,"));
    assert!(csv.lines().last().unwrap().starts_with("1.00000000000e0,"));
}

#[test]
fn qcurve_rejects_bad_input_and_short_tails() {
    assert!(!hg_entangle(&["qcurve", "--a", "0.5,-1"]).status.success());
    let out = hg_entangle(&["qcurve", "--a", "1.0", "--n-max", "5"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("a=1"), "{err}");
}

#[test]
fn coeffs_writes_table_and_report_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.csv");
    stdout(&[
        "coeffs",
        "--pump",
        "1",
        "1",
        "--a",
        "0.5",
        "--max-order",
        "3",
        "--out",
        path_str(&out),
    ]);
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("m_s,n_s,m_i,n_i,re,im,abs\n"));
    assert_eq!(csv.lines().count(), 1 + 10 * 10);

    let sidecar = dir.path().join("table.csv.reports.json");
    let reports: Value = serde_json::from_str(&std::fs::read_to_string(sidecar).unwrap()).unwrap();
    assert_eq!(reports[1]["law"], "parity");
    assert!(reports[1]["worst_violation"].as_f64().unwrap() < 1e-10);
}

#[test]
fn coeffs_json_contains_reference_value() {
    let doc = json(&[
        "coeffs",
        "--a",
        "0.25",
        "--max-order",
        "2",
        "--format",
        "json",
    ]);
    let entries = doc["entries"].as_array().unwrap();
    let c00 = entries
        .iter()
        .find(|e| e["s"] == serde_json::json!([0, 0]) && e["i"] == serde_json::json!([0, 0]))
        .unwrap();
    assert!(c00["re"].as_f64().unwrap() > 0.0);
    assert_eq!(doc["reports"].as_array().unwrap().len(), 2);
}

#[test]
fn coeffs_reports_underresolved_rule() {
    let out = hg_entangle(&[
        "coeffs",
        "--a",
        "0.5",
        "--max-order",
        "12",
        "--rule-order",
        "8",
    ]);
    assert!(!out.status.success());
}

#[test]
fn state_pipeline_build_convert_entropy() {
    let dir = tempfile::tempdir().unwrap();
    let hg = dir.path().join("hg.json");
    let lg = dir.path().join("lg.json");
    let back = dir.path().join("back.json");
    stdout(&[
        "state",
        "build-hg",
        "--a",
        "0.25",
        "--max-order",
        "1",
        "--out",
        path_str(&hg),
    ]);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&hg).unwrap()).unwrap();
    assert_eq!(doc["basis"], "HG");
    assert_eq!(doc["entries"][0]["re"].as_f64().unwrap(), 0.662266178533);

    let entropy = json(&["state", "entropy", "--input", path_str(&hg)]);
    assert_eq!(
        entropy["schmidt_entropy_bits"].as_f64().unwrap(),
        1.55049694847
    );

    stdout(&[
        "state",
        "convert",
        "--input",
        path_str(&hg),
        "--to",
        "lg",
        "--out",
        path_str(&lg),
    ]);
    stdout(&[
        "state",
        "convert",
        "--input",
        path_str(&lg),
        "--to",
        "hg",
        "--out",
        path_str(&back),
    ]);
    let back_doc: Value = serde_json::from_str(&std::fs::read_to_string(&back).unwrap()).unwrap();
    assert_eq!(back_doc["entries"].as_array().unwrap().len(), 3);

    let lg_entropy = json(&["state", "entropy", "--input", path_str(&lg)]);
    assert!((lg_entropy["schmidt_entropy_bits"].as_f64().unwrap() - 1.55049694847).abs() < 1e-10);
}

#[test]
fn state_rejects_malformed_files() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"basis":"HG","truncation_order":1,"entries":[],"extra":1}"#,
    )
    .unwrap();
    assert!(
        !hg_entangle(&["state", "entropy", "--input", path_str(&bad)])
            .status
            .success()
    );
    std::fs::write(
        &bad,
        r#"{"basis":"LG","truncation_order":1,"entries":[{"s":[0,2],"i":[0,-2],"re":1,"im":0}]}"#,
    )
    .unwrap();
    assert!(
        !hg_entangle(&["state", "convert", "--input", path_str(&bad), "--to", "hg"])
            .status
            .success()
    );
}

#[test]
fn lg_input_accepts_negative_l() {
    let doc = json(&[
        "state", "lg-input", "--l-max", "1", "--coeff", "-1:1", "--coeff", "1:0:1",
    ]);
    assert_eq!(doc["basis"], "LG");
    assert_eq!(doc["entries"].as_array().unwrap().len(), 2);
    assert!(
        !hg_entangle(&["state", "lg-input", "--l-max", "1", "--coeff", "3:1"])
            .status
            .success()
    );
}

#[test]
fn hom_table_has_sixteen_rows() {
    let doc = json(&["hom"]);
    assert_eq!(doc["mirror_axis"], "y");
    let rows = doc["table"].as_array().unwrap();
    assert_eq!(rows.len(), 16);
    let cell = rows
        .iter()
        .find(|r| r["axis"] == "y" && r["bell_state"] == "Psi+" && r["pol_symmetry"] == "symmetric")
        .unwrap();
    assert_eq!(cell["coincidence_prob"].as_f64().unwrap(), 1.0);
}

#[test]
fn teleport_reports_unit_fidelity() {
    let doc = json(&["teleport", "--alpha", "0.6", "--beta", "-0.8"]);
    assert_eq!(doc["fidelity"].as_f64().unwrap(), 1.0);
    assert_eq!(doc["success_prob"].as_f64().unwrap(), 0.25);
    assert_eq!(doc["selected_branch"], "Psi+");
    assert!(
        !hg_entangle(&["teleport", "--alpha", "0.6", "--beta", "0.6"])
            .status
            .success()
    );
    assert!(!hg_entangle(&[
        "teleport",
        "--alpha",
        "1",
        "--beta",
        "0",
        "--polarization",
        "antisymmetric"
    ])
    .status
    .success());
}

#[test]
fn modes_eval_grid() {
    let csv = stdout(&[
        "modes-eval",
        "--family",
        "hg",
        "--index",
        "1",
        "0",
        "--points",
        "5",
        "--z",
        "0.5",
    ]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "x,y,re,im,abs");
    assert_eq!(lines.len(), 26);
    assert!(lines.iter().skip(1).all(|l| l.split(',').count() == 5));
    assert!(!hg_entangle(&[
        "modes-eval",
        "--family",
        "lg",
        "--index",
        "0",
        "1",
        "--z",
        "1"
    ])
    .status
    .success());
    stdout(&[
        "modes-eval",
        "--family",
        "lg",
        "--index",
        "1",
        "-2",
        "--points",
        "3",
    ]);
}
