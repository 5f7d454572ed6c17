use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use widthslab::report::{read_csv, Quantity};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_widthslab")).args(args).output().expect("binary runs")
}

fn rows(path: &Path) -> Vec<widthslab::report::CsvRow> {
    read_csv(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn segment_g_at_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let o = run(&["compute", "--class", &fixture("segment.json"), "--n", "0", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let r = rows(&out);
    assert_eq!(r.len(), 1);
    assert_eq!((r[0].lo, r[0].hi), (1.0, 1.0));
    assert_eq!(r[0].quantity, Quantity::G);
}

#[test]
fn cross_polytope_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let o = run(&["compute", "--class", &fixture("cross4.json"), "--n", "1..3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let r = rows(&out);
    assert_eq!(r.iter().map(|r| r.n).collect::<Vec<_>>(), vec![1, 2, 3]);
    assert!(r.iter().all(|r| (r.hi - 1.0).abs() < 1e-8 && (r.lo - 1.0).abs() < 1e-8));
}

#[test]
fn cube_entropy_at_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.csv");
    let report = dir.path().join("e.json");
    let o = run(&[
        "compute", "--class", &fixture("cube2.json"), "--quantity", "eps", "--n", "0",
        "--out", out.to_str().unwrap(), "--report", report.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let r = rows(&out);
    assert!((r[0].lo - 1.0).abs() < 1e-9 && r[0].hi <= 1.05);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(json["entropy_certificates"].as_array().unwrap().len(), 1);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["compute", "--class", &fixture("malformed.json")]).status.code(), Some(2));
    assert_eq!(run(&["compute", "--class", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(run(&["compute", "--class", &fixture("segment.json"), "--n", "x"]).status.code(), Some(2));
    assert_eq!(run(&["compute", "--class", &fixture("segment.json"), "--n", "2"]).status.code(), Some(2));
    let budget = run(&["compute", "--class", &fixture("sobolev32.json"), "--n", "6", "--budget", "100"]);
    assert_eq!(budget.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&budget.stderr).contains("budget"));
}

#[test]
fn heuristic_fallback_reports_an_upper_bound() {
    let o = run(&["compute", "--class", &fixture("sobolev32.json"), "--n", "5", "--budget", "100", "--heuristic"]);
    assert!(o.status.success());
    let r = read_csv(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(r[0].lo, 0.0);
    assert!(r[0].hi > 0.0 && r[0].hi < 1.0);
}

#[test]
fn sweep_writes_rates_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = run(&["sweep", "--class", &fixture("sobolev32.json"), "--quantity", "g,eps", "--n", "1-4", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(rows(&out).len(), 8);
    let rates = std::fs::read_to_string(dir.path().join("s.csv.rates.csv")).unwrap();
    let mut lines = rates.lines().skip(1);
    let g_exp: f64 = lines.next().unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!((-1.6..=-0.5).contains(&g_exp));
    let plot = std::fs::read_to_string(dir.path().join("s.csv.plot.txt")).unwrap();
    assert_eq!(plot.lines().filter(|l| !l.starts_with('#') && !l.is_empty()).count(), 8);
}

#[test]
fn sweep_of_a_singleton_skips_the_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = run(&["sweep", "--class", &fixture("singleton.json"), "--n", "1-2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let rates = std::fs::read_to_string(dir.path().join("s.csv.rates.csv")).unwrap();
    assert!(rates.contains("fit skipped"));
}

#[test]
fn verify_desk_classes() {
    for class in ["segment.json", "cross4.json", "random6.json", "pball_half.json"] {
        let o = run(&["verify", "--class", &fixture(class), "--n", "0-1", "--report", "/dev/null"]);
        assert_eq!(o.status.code(), Some(0), "{class}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn verify_vacuous_instance_passes_with_note() {
    let o = run(&["verify", "--class", &fixture("singleton.json"), "--n", "0-1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("vacuous"));
}

#[test]
fn verify_rejects_outside_packing() {
    let o = run(&["verify", "--class", &fixture("random6.json"), "--n", "1", "--packing", &fixture("outside_packing.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("\"passed\": false"));
}

#[test]
fn oracle_on_segment() {
    let o = run(&["oracle", "--class", &fixture("segment.json"), "--n", "0-1", "--mesh", "0.01"]);
    assert!(o.status.success());
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["agree"], true);
    let r = json["results"][1]["small_entropy_radius"].as_f64().unwrap();
    assert!((r - 0.5).abs() <= 0.01 + 1e-8);
}

#[test]
fn threads_flag_and_env_do_not_change_output() {
    let a = run(&["compute", "--class", &fixture("random6.json"), "--quantity", "g,eps", "--n", "0-2", "--threads", "1"]);
    let b = Command::new(env!("CARGO_BIN_EXE_widthslab"))
        .args(["compute", "--class", &fixture("random6.json"), "--quantity", "g,eps", "--n", "0-2"])
        .env("WIDTHSLAB_THREADS", "2")
        .output()
        .unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}
