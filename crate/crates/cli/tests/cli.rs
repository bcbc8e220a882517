//! End-to-end tests of the `meandiff` binary: outputs and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn meandiff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meandiff")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn mean_examples() {
    for (args, expected) in [
        (["mean", "A", "1", "3"], "2\n"),
        (["mean", "gini:0:0", "4", "9"], "6\n"),
        (["mean", "lehmer:2", "1", "2"], "1.66666666666667\n"),
    ] {
        let o = meandiff(&args);
        assert_eq!(code(&o), 0, "{args:?}");
        assert_eq!(stdout(&o), expected, "{args:?}");
    }
}

#[test]
fn mean_errors() {
    assert_eq!(code(&meandiff(&["mean", "nonsense", "1", "3"])), 2);
    assert_eq!(code(&meandiff(&["mean", "A", "one", "3"])), 2);
    assert_eq!(code(&meandiff(&["mean", "A", "-1", "3"])), 1);
    assert_eq!(code(&meandiff(&["mean", "A", "1"])), 2);
    assert_eq!(code(&meandiff(&["frobnicate"])), 2);
}

#[test]
fn audit_passes_and_reports_json() {
    let o = meandiff(&["audit", "thm31-44", "--samples", "10", "--seed", "7", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["config"]["samples"], 10);
    assert_eq!(doc["config"]["seed"], 7);
    assert_eq!(doc["verdict"], "pass");
    let checks = doc["checks"].as_array().unwrap();
    let audits: Vec<&Value> = checks.iter().filter(|c| c["name"].as_str().unwrap().starts_with("audit:")).collect();
    assert_eq!(audits.len(), 8);
    assert!(audits.iter().all(|c| c["max_violation"].as_f64().unwrap() <= 1e-10));
}

#[test]
fn audit_default_run_passes() {
    let o = meandiff(&["audit", "thm31-43", "--samples", "100000", "--seed", "42"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS: "));
}

#[test]
fn reversed_custom_chain_fails_with_witness() {
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "custom.chain", "# reversed\nchain reversed\nedge AG <= 1/2 AH\n");
    let o = meandiff(&["audit", &path, "--samples", "1000", "--format", "json"]);
    assert_eq!(code(&o), 1);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let check = &doc["checks"][0];
    assert_eq!(check["verdict"], "fail");
    assert!(check["max_violation"].as_f64().unwrap() > 0.0);
    let w = &check["witness"];
    assert!(w["lhs"].as_f64().unwrap() > w["rhs"].as_f64().unwrap());
}

#[test]
fn audit_usage_errors() {
    assert_eq!(code(&meandiff(&["audit", "no-such-chain"])), 2);
    assert_eq!(code(&meandiff(&["audit", "eq12", "--samples", "0"])), 2);
    assert_eq!(code(&meandiff(&["audit", "eq12", "--range", "10:1"])), 2);
    assert_eq!(code(&meandiff(&["audit", "eq12", "--range", "abc"])), 2);
    assert_eq!(code(&meandiff(&["audit", "eq12", "--tolerance", "-1"])), 2);
    let dir = TempDir::new().unwrap();
    let cyclic = write(dir.path(), "cyclic.chain", "edge AG <= AH\nedge AH <= AG\n");
    assert_eq!(code(&meandiff(&["audit", &cyclic])), 2);
}

#[test]
fn betas_table() {
    let o = meandiff(&["betas", "--format", "json"]);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let checks = doc["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 41);
    let part = |n: usize| &checks[n - 1]["details"];
    assert_eq!(part(5)["beta"], "8/9");
    assert_eq!(part(5)["matches"], true);
    assert_eq!(part(41)["beta"], "1");
    assert_eq!(part(7)["beta"], "4/5");
    assert_eq!(part(7)["printed"], "2/3");
    // Two printed constants disagree with the computed ones, so the table
    // does not pass as a whole.
    assert_eq!(code(&o), 1);
    let text = stdout(&meandiff(&["betas"]));
    assert!(text.contains("part 5: D(AH) <= beta D(P6N2): 8/9, matches printed value"));
}

#[test]
fn certify_examples() {
    let o = meandiff(&["certify", "builtin:h1", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let d = &doc["checks"][0]["details"];
    assert_eq!(d["verdict"], "strictly-positive");
    assert_eq!(d["value_at_one"], "56");
    assert_eq!(d["roots"].as_array().unwrap().len(), 2);
    let o = meandiff(&["certify", "builtin:h3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("value at t=1 is 416"));
    let o = meandiff(&["certify", "t^2 - 4"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("indefinite"));
    assert_eq!(code(&meandiff(&["certify", "t^^2"])), 2);
    assert_eq!(code(&meandiff(&["certify", "builtin:h9"])), 2);
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "p.poly", "# (t-1)^2 (t+1)^2\n1 - 2*t^2 + t^4\n");
    let o = meandiff(&["certify", &path]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("nonnegative-zeros-only-at-one"));
}

#[test]
fn divergence_values_and_errors() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "P.csv", "0.5\n0.5\n");
    let q = write(dir.path(), "Q.csv", "# second\n0.25\n\n0.75\n");
    let qj = write(dir.path(), "Q.json", "[0.25, 0.75]");
    let r = write(dir.path(), "R.csv", "0.2\n0.3\n0.5\n");
    let z = write(dir.path(), "Z.csv", "1\n0\n");
    let u = write(dir.path(), "U.csv", "1\n3\n");
    let o = meandiff(&["divergence", "psi", &p, &q]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "0.583333333333333\n"));
    assert_eq!(stdout(&meandiff(&["divergence", "Psi", &p, &qj])), "0.583333333333333\n");
    let j = stdout(&meandiff(&["divergence", "J", &p, &q]));
    assert!((j.trim().parse::<f64>().unwrap() - 0.25 * 3f64.ln()).abs() < 1e-14);
    for kind in ["I", "J", "T", "Psi", "Delta", "h", "AG", "P6N2"] {
        assert_eq!(stdout(&meandiff(&["divergence", kind, &q, &q])), "0\n", "{kind}");
    }
    assert_eq!(code(&meandiff(&["divergence", "psi", &p, &r])), 1);
    assert_eq!(code(&meandiff(&["divergence", "psi", &z, &p])), 1);
    assert_eq!(code(&meandiff(&["divergence", "--smooth", "psi", &z, &p])), 0);
    assert_eq!(code(&meandiff(&["divergence", "psi", &u, &p])), 1);
    assert_eq!(code(&meandiff(&["divergence", "--normalize", "psi", &u, &q])), 0);
    assert_eq!(code(&meandiff(&["divergence", "psi", &p, "/nonexistent/Q.csv"])), 2);
    assert_eq!(code(&meandiff(&["divergence", "kl", &p, &q])), 2);
    assert_eq!(code(&meandiff(&["divergence", "psi", &p])), 2);
}

#[test]
fn divergence_chain_report() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "P.csv", "0.5\n0.5\n");
    let q = write(dir.path(), "Q.csv", "0.25\n0.75\n");
    let o = meandiff(&["divergence", "--chain", &p, &q, "--format", "json", "--smooth"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["config"]["smooth"], true);
    assert_eq!(doc["config"]["normalize"], false);
    let checks = doc["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 8 + 15);
    assert!(checks[0]["name"].as_str().unwrap().starts_with("eq46: 1/2 AH <= I"));
    for c in checks {
        assert_eq!(c["verdict"], "pass");
        assert!(c["details"]["lhs"].as_f64().unwrap() < c["details"]["rhs"].as_f64().unwrap());
    }
}

#[test]
fn output_file_and_round_trip() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.json");
    let o = meandiff(&["audit", "eq46", "--samples", "200", "--format", "json", "--output", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&out).unwrap();
    let doc: Value = serde_json::from_str(&text).unwrap();
    let again: Value = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
    assert_eq!(again, doc);
    for key in ["tool", "version", "command", "config", "checks", "verdict", "timestamp"] {
        assert!(doc.get(key).is_some(), "{key}");
    }
}

#[test]
fn json_reports_are_deterministic() {
    let args = ["audit", "thm31-43", "--samples", "3000", "--seed", "11", "--format", "json"];
    let strip = |o: &Output| {
        let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v.as_object_mut().unwrap().remove("timestamp");
        serde_json::to_string(&v).unwrap()
    };
    let (a, b) = (meandiff(&args), meandiff(&args));
    assert_eq!(strip(&a), strip(&b));
    let c = meandiff(&["audit", "thm31-43", "--samples", "3000", "--seed", "12", "--format", "json"]);
    assert_ne!(strip(&a), strip(&c));
}

#[test]
fn csv_format() {
    let o = meandiff(&["audit", "eq12", "--samples", "100", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("name,verdict,max_violation,witness,message"));
    assert_eq!(lines.count(), 13);
}
