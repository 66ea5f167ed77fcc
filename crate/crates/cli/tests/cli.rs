use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn rtw(args: &[&Path]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rtw"))
        .args(args)
        .output()
        .unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

#[test]
fn solve_writes_default_paths() {
    let dir = tempfile::tempdir().unwrap();
    let gr = dir.path().join("c5.gr");
    std::fs::copy(golden("c5.gr"), &gr).unwrap();
    let out = rtw(&[Path::new("solve"), &gr]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(text(&out.stdout), "tw = 2\n");
    let td = std::fs::read_to_string(dir.path().join("c5.td")).unwrap();
    assert_eq!(td, std::fs::read_to_string(golden("c5.td")).unwrap());
    let out = rtw(&[Path::new("verify"), &gr, &dir.path().join("c5.cert")]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
}

#[test]
fn tampered_certificate_names_the_failure() {
    let out = rtw(&[
        Path::new("verify"),
        &golden("c5.gr"),
        &golden("c5_tampered.cert"),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(
        text(&out.stderr).contains("does not give the obstruction"),
        "{}",
        text(&out.stderr)
    );
}

#[test]
fn certificate_for_another_graph_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let c6 = dir.path().join("c6.gr");
    std::fs::copy(golden("bench/cycle6.gr"), &c6).unwrap();
    let out = rtw(&[Path::new("verify"), &c6, &golden("c5.cert")]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn malformed_certificate_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cert");
    std::fs::write(&bad, "w 2\ns td 1 3 5\nb 1 1 2 x\n").unwrap();
    let out = rtw(&[Path::new("verify"), &golden("c5.gr"), &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("line 3"));
}

#[test]
fn oracle_refuses_large_inputs() {
    let out = rtw(&[Path::new("oracle"), &golden("hard.gr")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_marks_timeouts_and_keeps_other_rows() {
    const TIMEOUT_S: f64 = 1.0;
    const SLACK: f64 = 0.10;
    let dir = tempfile::tempdir().unwrap();
    for f in ["path4.gr", "k4.gr"] {
        std::fs::copy(golden("bench").join(f), dir.path().join(f)).unwrap();
    }
    std::fs::copy(golden("hard.gr"), dir.path().join("hard.gr")).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_rtw"))
        .args([
            "bench",
            dir.path().to_str().unwrap(),
            "--timeout-s",
            &TIMEOUT_S.to_string(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    let table = text(&out.stdout);
    let rows: Vec<Vec<&str>> = table.lines().map(|l| l.split('\t').collect()).collect();
    assert_eq!(
        rows[0],
        ["instance", "n", "m", "width", "time_s", "timed_out"]
    );
    assert_eq!(rows.len(), 4);
    let hard = rows.iter().find(|r| r[0] == "hard.gr").unwrap();
    assert_eq!((hard[3], hard[5]), ("-", "true"));
    let took: f64 = hard[4].parse().unwrap();
    assert!(took <= TIMEOUT_S * (1.0 + SLACK), "stopped after {took}s");
    let k4 = rows.iter().find(|r| r[0] == "k4.gr").unwrap();
    assert_eq!((k4[1], k4[2], k4[3], k4[5]), ("4", "6", "3", "false"));
}

#[test]
fn flags_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let gr = dir.path().join("grid3.gr");
    std::fs::copy(golden("bench/grid3.gr"), &gr).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_rtw"))
        .args([
            "solve",
            gr.to_str().unwrap(),
            "--budget",
            "10",
            "--seed",
            "4",
            "--no-safe-sep",
        ])
        .args(["--max-solutions", "2", "--log-level", "debug"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert_eq!(text(&out.stdout), "tw = 3\n");
    let out = rtw(&[
        Path::new("solve"),
        &gr,
        Path::new("--log-level"),
        Path::new("loud"),
    ]);
    assert_eq!(out.status.code(), Some(1));
}
