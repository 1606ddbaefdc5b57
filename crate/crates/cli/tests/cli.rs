use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chebvar"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("chebvar-report.json")).unwrap()).unwrap()
}

#[test]
fn derive_prints_canonical_g2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["derive", "--n", "2", "--d", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "4*p + p^2 - 4*q\n12*p^2 - p^3 - 8*q - 6*p*q + 2*q^2\n");
    let r = report(dir.path());
    assert_eq!(r["passed"], true);
    assert_eq!(r["schema_version"], 1);
}

#[test]
fn derive_real_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["derive", "--n", "2", "--d", "2", "--kind", "real"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "-2*x + x^2 - y^2\n2*y + 2*x*y\n");
}

#[test]
fn cap_violation_fails_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["derive", "--n", "2", "--d", "17"]);
    assert!(!out.status.success());
    let r = report(dir.path());
    assert_eq!(r["passed"], false);
    assert!(r["error"].as_str().unwrap().contains("cap"));
    let out = run(dir.path(), &["--cap", "20", "derive", "--n", "2", "--d", "17"]);
    assert!(out.status.success());
}

#[test]
fn verify_small_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["verify", "--suite", "formulas"]);
    assert!(out.status.success());
    let out = run(dir.path(), &["verify", "--suite", "molien"]);
    assert!(out.status.success());
    let out = run(dir.path(), &["verify", "--entry", "S_A", "--max-d", "4"]);
    assert!(out.status.success());
    let out = run(dir.path(), &["verify", "--entry", "nowhere"]);
    assert!(!out.status.success());
    assert_eq!(report(dir.path())["first_failure"]["check"], "lookup");
}

#[test]
fn runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let out = run(dir, &["--seed", "7", "degree", "--n", "2", "--d", "2", "--trials", "5"]);
        assert!(out.status.success());
    }
    let ra = fs::read(a.path().join("chebvar-report.json")).unwrap();
    let rb = fs::read(b.path().join("chebvar-report.json")).unwrap();
    assert_eq!(ra, rb);
    for dir in [a.path(), b.path()] {
        let out = run(dir, &["plot", "--figure", "kset", "--entry", "S_P", "--samples", "200", "--out-dir", "figs"]);
        assert!(out.status.success());
    }
    for f in ["figs/kset_S_P.csv", "figs/kset_S_P.svg"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn plot_jordan_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["plot", "--figure", "jordan", "--samples", "512"]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("jordan.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "arc_id,theta,p,q");
    assert_eq!(lines.len(), 1 + 2 * 512);
    let svg = fs::read_to_string(dir.path().join("jordan.svg")).unwrap();
    assert!(svg.contains("viewBox=\"0 0 400 400\""));
}

#[test]
fn orbit_reports_status() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["orbit", "--n", "2", "--d", "2", "--start", "10,0", "--csv", "orbit.csv"]);
    assert!(out.status.success());
    let r = report(dir.path());
    assert_eq!(r["data"]["status"], "escaped");
    assert!(fs::read_to_string(dir.path().join("orbit.csv")).unwrap().starts_with("step,p_re,p_im,q_re,q_im\n"));
    run(dir.path(), &["orbit", "--n", "2", "--d", "2", "--start", "1,-1"]);
    assert_eq!(report(dir.path())["data"]["status"], "bounded_horizon");
    let out = run(dir.path(), &["orbit", "--n", "2", "--d", "2", "--start", "1"]);
    assert!(!out.status.success());
}

#[test]
fn conjugate_and_branch() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["conjugate", "--params", "1,1,0,1,2,1,1,0,0"]);
    assert!(out.status.success());
    let out = run(dir.path(), &["conjugate", "--params", "0,0,0,0,1,1,0,0,0"]);
    assert!(!out.status.success());
    let out = run(dir.path(), &["branch", "--n", "3"]);
    assert!(out.status.success());
}
