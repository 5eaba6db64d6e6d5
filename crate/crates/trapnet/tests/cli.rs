use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn trapnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trapnet")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

/// Data rows of a CSV report (after the `#` line and the header).
fn rows(text: &str) -> Vec<Vec<String>> {
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with('#'));
    lines.next().unwrap();
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn trap_pi_lattice_three_five() {
    let out = trapnet(&["trap", "--n0", "3", "--len", "5", "--m", "4", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    let certs = v["certificates"].as_array().unwrap();
    assert_eq!(certs.len(), 3);
    for c in certs {
        let nodes: Vec<&str> = c["nodes"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
        assert!(nodes.contains(&"c1") && nodes.contains(&"c5"), "{nodes:?}");
        assert!(c["residual"].as_f64().unwrap() < 1e-10);
    }
}

#[test]
fn isolated_subgraph_warns_and_traps_everything() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(
        dir.path(),
        "g.json",
        r#"{"sites": 4, "hoppings": [[0,1,1.0],[2,3,1.0]], "partition": [0,0,1,1]}"#,
    );
    let out = trapnet(&["trap", "--graph", &g, "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert!(stderr(&out).contains("no joint sites"));
    assert_eq!(json(&out)["certificates"].as_array().unwrap().len(), 2);
}

#[test]
fn malformed_graph_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "bad.json", "{\"sites\": 3,\n  \"hoppings\": [[0, 1,]]\n}");
    let out = trapnet(&["trap", "--graph", &g]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn no_certificates_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    // a dimer hung off one site of a chain: the joint is never a node
    let g = write(
        dir.path(),
        "g.json",
        r#"{"sites": 4, "hoppings": [[0,1,1.0],[1,2,1.0],[2,3,1.0]], "partition": [0,0,1,1]}"#,
    );
    let out = trapnet(&["trap", "--graph", &g]);
    assert_eq!(code(&out), 3);
    assert!(rows(&stdout(&out)).is_empty());
}

#[test]
fn evolve_rows_and_classes() {
    let out = trapnet(&["evolve", "--n0", "2", "--len", "4", "--m", "120", "--samples", "60"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rows = rows(&stdout(&out));
    assert_eq!(rows.len(), 8 * 60);
    for n in ["3", "6"] {
        let mode: Vec<&Vec<String>> = rows.iter().filter(|r| r[2] == n).collect();
        assert!(mode.iter().all(|r| r[5] == "unitary"), "mode {n}");
        assert!(mode.iter().all(|r| (r[4].parse::<f64>().unwrap() - 1.0).abs() < 1e-8));
    }
}

#[test]
fn evolve_at_time_zero_is_certain() {
    let out = trapnet(&["evolve", "--n0", "2", "--len", "4", "--m", "10", "--times", "0", "--modes", "1,2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rows = rows(&stdout(&out));
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert!((r[4].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r[5], "unclassified");
    }
}

#[test]
fn evolve_past_horizon_is_refused() {
    let out = trapnet(&["evolve", "--n0", "2", "--len", "4", "--m", "10", "--t-max", "50", "--samples", "5"]);
    assert_eq!(code(&out), 4);
    let out = trapnet(&[
        "evolve", "--n0", "2", "--len", "4", "--m", "10", "--t-max", "50", "--samples", "5", "--allow-reflections",
    ]);
    assert_eq!(code(&out), 0);
}

#[test]
fn bound_state_counts() {
    let v = json(&trapnet(&["bound", "--n0", "3", "--len", "5", "--format", "json"]));
    let kinds: Vec<&str> = v["states"].as_array().unwrap().iter().map(|s| s["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds.iter().filter(|k| **k == "resonant").count(), 3);
    assert_eq!(kinds.iter().filter(|k| **k == "evanescent").count(), 4);
    assert_eq!(v["states"][0]["overlaps"].as_array().unwrap().len(), 11);

    let v = json(&trapnet(&["bound", "--n0", "2", "--len", "5", "--format", "json"]));
    assert!(v["states"].as_array().unwrap().iter().all(|s| s["kind"] == "evanescent"));
}

#[test]
fn bound_long_time_value() {
    let v = json(&trapnet(&["bound", "--n0", "2", "--len", "4", "--long-time", "1", "--format", "json"]));
    let p = v["long_time"]["value"].as_f64().unwrap();
    assert!((p - 0.5032).abs() < 5e-4, "{p}");
    let out = trapnet(&["bound", "--n0", "2", "--len", "4", "--long-time", "9"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn transmit_sweep_and_band_check() {
    let out = trapnet(&["transmit", "--n0", "3", "--len", "5", "--steps", "2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rows = rows(&stdout(&out));
    assert_eq!(rows.len(), 2);
    for r in &rows {
        let t: f64 = r[2].parse().unwrap();
        let rr: f64 = r[3].parse().unwrap();
        assert!((t + rr - 1.0).abs() < 1e-12);
    }
    assert!(stderr(&out).contains("transmission zeros"));

    let out = trapnet(&["transmit", "--n0", "3", "--len", "5", "--e-min", "-2.5", "--e-max", "0"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn transmit_momentum_sweep() {
    let out = trapnet(&["transmit", "--n0", "3", "--len", "5", "--k-min", "0.5", "--k-max", "1.5", "--steps", "3"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let ks: Vec<f64> = rows(&stdout(&out)).iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(ks, [0.5, 1.0, 1.5]);
    let out = trapnet(&["transmit", "--n0", "3", "--len", "5", "--k-min", "0", "--k-max", "1"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn transmit_compare_writes_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("t.csv");
    let b = base.to_str().unwrap();
    let out = trapnet(&["transmit", "--n0", "3", "--len", "5", "--steps", "50", "--compare", "6", "-o", b]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(rows(&fs::read_to_string(&base).unwrap()).len(), 50);
    assert_eq!(rows(&fs::read_to_string(dir.path().join("t.L6.csv")).unwrap()).len(), 50);
    let zeros: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("t.zeros.json")).unwrap()).unwrap();
    assert!(zeros["zeros"].as_array().unwrap().iter().any(|z| z["provenance"] == "L-dependent" && z["method"] == "bisection"));
    let pd: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("t.peakdip.json")).unwrap()).unwrap();
    assert_eq!(pd["len_b"], 6);

    let out = trapnet(&["transmit", "--n0", "3", "--len", "5", "--compare", "6"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn output_is_deterministic() {
    let args = ["evolve", "--n0", "2", "--len", "4", "--m", "40", "--samples", "30"];
    assert_eq!(trapnet(&args).stdout, trapnet(&args).stdout);
    let args = ["transmit", "--n0", "2", "--len", "7", "--steps", "40"];
    assert_eq!(trapnet(&args).stdout, trapnet(&args).stdout);
}

#[test]
fn config_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "run.json", r#"{"command": "bound", "n0": 3, "len": 5, "format": "json"}"#);
    let from_file = trapnet(&["--config", &c]);
    assert_eq!(code(&from_file), 0, "{}", stderr(&from_file));
    assert_eq!(from_file.stdout, trapnet(&["bound", "--n0", "3", "--len", "5", "--format", "json"]).stdout);

    let bad = write(dir.path(), "bad.json", r#"{"command": "bound", "nzero": 3}"#);
    assert_eq!(code(&trapnet(&["--config", &bad])), 2);
    assert_eq!(code(&trapnet(&["--config", &c, "bound"])), 2);
    assert_eq!(code(&trapnet(&[])), 2);
}
