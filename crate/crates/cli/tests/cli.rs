use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_drcs-forge"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Vec<u8> {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).expect("json output")
}

fn core_data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data").join(name)
}

fn rows(v: &Value) -> Vec<Vec<u64>> {
    serde_json::from_value(v["rows"].clone()).unwrap()
}

fn error_of(out: &Output) -> Value {
    let line = String::from_utf8_lossy(&out.stderr);
    json(line.trim().as_bytes())["error"].clone()
}

#[test]
fn multiplicative_rectangle_and_product() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let a = json(&ok(d, &["rect", "circular-florentine", "7"]));
    let printed_a = json(&std::fs::read(core_data("example2_a.json")).unwrap());
    assert_eq!(rows(&a), rows(&printed_a));

    ok(d, &["rect", "circular-florentine", "7", "-o", "a.json"]);
    let b = core_data("example2_b.json");
    let prod = json(&ok(d, &["rect", "product", "a.json", b.to_str().unwrap()]));
    let printed_d = json(&std::fs::read(core_data("example2_d.json")).unwrap());
    assert_eq!(rows(&prod), rows(&printed_d));
    assert_eq!(prod["N"], 63);
}

#[test]
fn verify_reports_flags_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let ex1 = core_data("example1.json");
    let report = json(&ok(dir.path(), &["rect", "verify", ex1.to_str().unwrap()]));
    assert_eq!(report["row_distinct"], true);
    assert_eq!(report["linear_spacing"], true);
    assert!(report["witness"].is_null());

    std::fs::write(dir.path().join("bad.json"), r#"{"N":4,"n":4,"rows":[[0,1,2,3],[0,2,1,3],[3,0,1,2]]}"#).unwrap();
    let out = run(dir.path(), &["rect", "verify", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
    let w = &json(&out.stdout)["witness"];
    assert_eq!(w["condition"], "linear-spacing");
    assert_eq!(w["pair"].as_array().unwrap().len(), 2);
    assert!(w["step"].as_u64().unwrap() >= 1);
    assert_eq!(error_of(&out)["kind"], "validation");
}

#[test]
fn bh_commands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let m = json(&ok(d, &["bh", "dft", "63"]));
    assert_eq!((m["N"].as_u64(), m["r"].as_u64()), (Some(63), Some(63)));

    ok(d, &["bh", "dft", "3", "-o", "dft3.json"]);
    let seed = core_data("bh21_3.json");
    ok(d, &["bh", "kron", "dft3.json", seed.to_str().unwrap(), "-o", "bh63_3.json"]);
    let v = json(&ok(d, &["bh", "verify", "bh63_3.json"]));
    assert_eq!((v["N"].as_u64(), v["r"].as_u64()), (Some(63), Some(3)));
    assert_eq!(v["butson_hadamard"], true);

    let mut tampered = json(&std::fs::read(d.join("dft3.json")).unwrap());
    tampered["exps"][1][1] = Value::from(0);
    std::fs::write(d.join("tampered.json"), tampered.to_string()).unwrap();
    let out = run(d, &["bh", "verify", "tampered.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(d, &["bh", "load", "tampered.json"]).status.code(), Some(2));
}

#[test]
fn set_build_eval_report_and_grid() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let rect = core_data("example2_d.json");
    ok(d, &["bh", "dft", "63", "-o", "dft63.json"]);
    ok(d, &["drcs", "build", rect.to_str().unwrap(), "dft63.json", "-o", "set.json"]);

    let eval = json(&ok(d, &["drcs", "eval", "set.json", "--method", "fft"]));
    assert!((eval["theta"]["theta_max"].as_f64().unwrap() - 63.0).abs() < 1e-6);
    assert_eq!(eval["bound"]["rho_rounded"].as_f64(), Some(1.5));

    let report = String::from_utf8(ok(d, &["drcs", "report", "set.json"])).unwrap();
    assert!(report.lines().nth(1).unwrap().trim_end().ends_with("1.5000"));

    let degenerate = json(&ok(d, &["drcs", "eval", "set.json", "--zone", "1", "1"]));
    assert!(degenerate["theta"]["theta_a"].is_null());
    assert!(degenerate["bound"].is_null());

    let csv = String::from_utf8(ok(d, &["drcs", "grid", "set.json", "--pair", "0", "0", "--zone", "4", "4"])).unwrap();
    let nonzero: Vec<&str> = csv
        .lines()
        .skip(1)
        .filter(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap() > 1e-6)
        .collect();
    assert_eq!(nonzero.len(), 1);
    assert!(nonzero[0].starts_with("0,0,"));
    assert_eq!(csv.lines().count(), 1 + 7 * 7);

    let pgm = ok(d, &["drcs", "grid", "set.json", "--pair", "0", "1", "--zone", "4", "4", "--out", "pgm"]);
    assert!(pgm.starts_with(b"P5\n7 7\n65535\n"));
    assert_eq!(pgm.len(), b"P5\n7 7\n65535\n".len() + 2 * 49);
}

#[test]
fn paranoid_eval_on_a_small_set() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["rect", "circular-florentine", "5", "-o", "r.json"]);
    ok(d, &["bh", "dft", "5", "-o", "b.json"]);
    ok(d, &["drcs", "build", "r.json", "b.json", "-o", "s.json"]);
    let eval = json(&ok(d, &["drcs", "eval", "s.json", "--paranoid"]));
    assert_eq!(eval["reference"]["agrees"], true);
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = ["rect", "family", "c1-ii", "--modulus", "7", "--prime", "2", "--degree", "3", "--trim", "1"];
    let first = ok(d, &args);
    assert_eq!(first, ok(d, &args));
    assert_eq!(rows(&json(&first)), rows(&json(&std::fs::read(core_data("example2_d.json")).unwrap())));

    ok(d, &["rect", "circular-florentine", "7", "-o", "r.json"]);
    ok(d, &["bh", "dft", "7", "-o", "b.json"]);
    ok(d, &["drcs", "build", "r.json", "b.json", "-o", "s.json"]);
    let one = bin().current_dir(d).env("DRCS_FORGE_THREADS", "1").args(["drcs", "eval", "s.json"]).output().unwrap();
    let two = bin().current_dir(d).env("DRCS_FORGE_THREADS", "3").args(["drcs", "eval", "s.json"]).output().unwrap();
    assert!(one.status.success() && two.status.success());
    assert_eq!(one.stdout, two.stdout);

    let bad = bin().current_dir(d).env("DRCS_FORGE_THREADS", "zero").args(["tables"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn search_and_truncate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let found = json(&ok(d, &["rect", "search", "5", "5", "--circular", "--certificate", "cert.json"]));
    assert_eq!(found["N"], 5);
    let cert = json(&std::fs::read(d.join("cert.json")).unwrap());
    assert_eq!(cert["rows_found"].as_u64(), Some(rows(&found).len() as u64));

    ok(d, &["rect", "circular-qfr", "2", "3", "-o", "q.json"]);
    let cut = json(&ok(d, &["rect", "truncate", "q.json", "1", "right"]));
    let ex1 = json(&std::fs::read(core_data("example1.json")).unwrap());
    assert_eq!(rows(&cut), rows(&ex1));

    assert_eq!(run(d, &["rect", "search", "12", "3"]).status.code(), Some(3));
    assert_eq!(run(d, &["rect", "truncate", "q.json", "6", "left"]).status.code(), Some(3));
}

#[test]
fn bound_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let b = json(&ok(d, &["bound", "6", "63", "56", "56"]));
    assert!((b["bound"]["value"].as_f64().unwrap() - 42.0).abs() < 1e-9);
    let out = run(d, &["bound", "1", "63", "56", "56"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_of(&out)["kind"], "infeasible");

    let tables = String::from_utf8(ok(d, &["tables"])).unwrap();
    assert_eq!(tables.matches("# ").count(), 3);
    let small = String::from_utf8(ok(d, &["tables", "--table", "small-alphabet"])).unwrap();
    assert!(small.contains("1.5000"));
}

#[test]
fn pipeline_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let config = r#"{
        "rectangle": {"op": "product",
                      "outer": {"op": "circular-florentine", "modulus": 7},
                      "inner": {"op": "plus-one", "p": 2, "n": 3}},
        "hadamard": {"op": "kron", "factors": [{"op": "dft", "order": 7}, {"op": "dft", "order": 9}]},
        "method": "fft",
        "out_dir": "artifacts"
    }"#;
    std::fs::write(d.join("run.json"), config).unwrap();
    let result = json(&ok(d, &["pipeline", "run.json"]));
    assert_eq!(result["set"]["K"], 6);
    assert!((result["theta"]["theta_max"].as_f64().unwrap() - 63.0).abs() < 1e-6);
    assert_eq!(result["bound"]["rho_rounded"].as_f64(), Some(1.5));
    for f in ["rectangle.json", "hadamard.json", "set.json", "theta.json"] {
        assert!(d.join("artifacts").join(f).exists(), "{f}");
    }

    let family = r#"{"rectangle": {"op": "family", "family": "c1-ii", "modulus": 5, "prime": 2, "degree": 2, "trim": 1},
                     "hadamard": {"op": "dft", "order": 25}}"#;
    std::fs::write(d.join("fam.json"), family).unwrap();
    let result = json(&ok(d, &["pipeline", "fam.json"]));
    assert_eq!(result["rectangle"]["N"], 25);

    std::fs::write(d.join("broken.json"), r#"{"rectangle": {"op": "nope"}}"#).unwrap();
    assert_eq!(run(d, &["pipeline", "broken.json"]).status.code(), Some(2));
    assert_eq!(run(d, &["pipeline", "missing.json"]).status.code(), Some(4));
}

#[test]
fn usage_errors_are_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["rect", "circular-florentine"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["kind"], "usage");
    let out = run(dir.path(), &["rect", "family", "c2-ii", "--trim", "1"]);
    assert_eq!(out.status.code(), Some(2));
}
