//! Figure sweeps regenerated through the binary must match the stored CSVs
//! byte for byte. Set `UPDATE_GOLDEN=1` to rewrite them.

use std::path::{Path, PathBuf};
use std::process::Command;

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn check(name: &str) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join(format!("{name}.csv"));
    let status = Command::new(env!("CARGO_BIN_EXE_ecs"))
        .args(["sweep", "--jobs", "3", "--config"])
        .arg(golden_dir().join(format!("{name}.json")))
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let fresh = std::fs::read_to_string(&out).unwrap();
    let stored_path = golden_dir().join(format!("{name}.csv"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&stored_path, &fresh).unwrap();
    }
    let stored = std::fs::read_to_string(&stored_path).unwrap();
    assert!(fresh == stored, "{name}.csv differs from the stored golden file");
}

#[test]
fn fig1_qubit_surface() {
    check("fig1");
}

#[test]
fn fig5_partitions() {
    check("fig5");
}

#[test]
fn tau_paper_family() {
    check("tau");
}

/// The stored surfaces carry the features the figures show.
#[test]
fn golden_contents() {
    let read = |n: &str| std::fs::read_to_string(golden_dir().join(n)).unwrap();
    let rows = |text: &str| -> Vec<Vec<String>> {
        text.lines().skip(2).map(|l| l.split(',').map(String::from).collect()).collect()
    };

    // ridge C = 1 along μ = -1 for every p
    let fig1 = rows(&read("fig1.csv"));
    let ridge: Vec<_> = fig1.iter().filter(|r| r[0] == "-1").collect();
    assert_eq!(ridge.len(), 34);
    for r in ridge {
        assert!((r[2].parse::<f64>().unwrap() - 1.0).abs() < 1e-9, "{r:?}");
    }

    // C_{1,9} ≤ C_{2,8} ≤ … ≤ C_{5,5} at every μ
    let fig5 = rows(&read("fig5.csv"));
    for k in 0..81 {
        let col: Vec<f64> = (0..5).map(|m| fig5[m * 81 + k][2].parse().unwrap()).collect();
        assert!(col.windows(2).all(|w| w[0] <= w[1] + 1e-12), "{col:?}");
    }
}
