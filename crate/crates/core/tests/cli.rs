//! End-to-end runs of the command-line tool.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cantor-moran"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.toml"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SMALL: [&str; 6] = ["--depth", "8", "--spectrum-depth", "3", "--samples", "8"];

#[test]
fn analyze_prints_json_by_default() {
    let path = fixture("quarter");
    let o = run(&[&["analyze", path.to_str().unwrap()][..], &SMALL].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["verdict"]["outcome"], "spectral");
    assert_eq!(v["numerics"]["product_depth"], 8);
    assert_eq!(v["numerics"]["spectrum"]["size"], 8);
}

#[test]
fn analyze_is_deterministic() {
    let path = fixture("udz_failure");
    let args = [&["analyze", path.to_str().unwrap()][..], &SMALL].concat();
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn analyze_text_and_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let path = fixture("consecutive_not_spectral");
    let o = run(&[
        &[
            "analyze",
            path.to_str().unwrap(),
            "--text",
            "--json",
            out.to_str().unwrap(),
        ][..],
        &SMALL,
    ]
    .concat());
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("verdict: not spectral by consecutive-digits"), "{text}");
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["verdict"]["rule"], "consecutive-digits");
}

#[test]
fn invalid_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[tail]\nkind = \"periodic\"\nperiod = [[4, [0, 0]]]\n").unwrap();
    let o = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("invalid configuration"));

    fs::write(
        &bad,
        "[tail]\nkind = \"periodic\"\nperiod = [[4, [0, 2]]]\nunknown = 1\n",
    )
    .unwrap();
    assert_eq!(run(&["analyze", bad.to_str().unwrap()]).status.code(), Some(2));

    let quarter = fixture("quarter");
    assert_eq!(
        run(&["analyze", quarter.to_str().unwrap(), "--depth", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn missing_file_exits_with_three() {
    let o = run(&["analyze", "/nonexistent/config.toml"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn export_mu_hat_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mu.csv");
    let path = fixture("quarter");
    let o = run(&[
        "export",
        path.to_str().unwrap(),
        "--what",
        "mu_hat",
        "--out",
        out.to_str().unwrap(),
        "--samples",
        "5",
        "--from",
        "-2",
        "--to",
        "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "xi,re,im,abs");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("-2,"));
    assert!(lines[3].starts_with("0,1,0,1"));
    assert!(lines[5].starts_with("2,"));
}

#[test]
fn export_qsum_matches_report() {
    let path = fixture("quarter");
    let csv = stdout(&run(&[
        &["export", path.to_str().unwrap(), "--what", "qsum"][..],
        &SMALL,
    ]
    .concat()));
    let report = run(&[&["analyze", path.to_str().unwrap()][..], &SMALL].concat());
    let v: serde_json::Value = serde_json::from_str(&stdout(&report)).unwrap();
    let q = v["numerics"]["qsum"]["q"].as_array().unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), q.len());
    for (row, value) in rows.iter().zip(q) {
        let exported: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(exported, value.as_f64().unwrap());
    }
}

#[test]
fn export_rejects_unknown_kind() {
    let path = fixture("quarter");
    let o = run(&["export", path.to_str().unwrap(), "--what", "density"]);
    assert!(!o.status.success());
}

#[test]
fn gallery_lists_and_prints_configs() {
    let o = run(&["gallery"]);
    assert!(o.status.success());
    let list = stdout(&o);
    for name in ["quarter", "noncompact", "udz_failure", "uneven_density"] {
        assert!(list.contains(name), "{list}");
    }
    let o = run(&["gallery", "quarter", "--config"]);
    assert_eq!(stdout(&o), fs::read_to_string(fixture("quarter")).unwrap());
    assert_eq!(run(&["gallery", "no_such_fixture"]).status.code(), Some(2));
}
