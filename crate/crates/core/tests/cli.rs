use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn iqc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iqc"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = iqc(dir.path(), &["validate", "--model", "cyclic", "--D", "16"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("identity.json").exists());
    assert!(dir.path().join("charfn.csv").exists());

    let out = iqc(dir.path(), &["validate", "--model", "piecewise-linear"]);
    assert_eq!(out.status.code(), Some(0));

    let out = iqc(dir.path(), &["validate", "--model", "cyclic", "--D", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("D >= 8") || err.contains("grid"), "{err}");
}

#[test]
fn bad_config_is_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[model]\nmodel = \"cyclic\"\nwobble = 3\n").unwrap();
    let out = iqc(dir.path(), &["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = iqc(dir.path(), &["validate", "--panels", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn export_pc_is_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let out = iqc(dir.path(), &["export", "--which", "PC", "--model", "piecewise-linear", "--index-min", "-3", "--index-max", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("PC.csv")).unwrap();
    for r in rows(&csv) {
        let (i, j): (i64, i64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        let re: f64 = r[2].parse().unwrap();
        let im: f64 = r[3].parse().unwrap();
        if i == j {
            assert_eq!(re, i as f64);
        } else {
            assert_eq!((re, im), (0.0, 0.0));
        }
        assert_eq!(im, 0.0);
    }
    assert!(dir.path().join("PC.json").exists());
}

#[test]
fn export_h_cyclic_is_hermitian() {
    let dir = tempfile::tempdir().unwrap();
    let out = iqc(dir.path(), &["export", "--which", "H", "--model", "cyclic", "--D", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("H.csv")).unwrap();
    let mut entries = std::collections::HashMap::new();
    for r in rows(&csv) {
        let key: (i64, i64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        entries.insert(key, (r[2].parse::<f64>().unwrap(), r[3].parse::<f64>().unwrap()));
    }
    assert_eq!(entries.len(), 64);
    for (&(i, j), &(re, im)) in &entries {
        let (tr, ti) = entries[&(j, i)];
        assert!((re - tr).abs() <= 1e-12 && (im + ti).abs() <= 1e-12);
    }
}

#[test]
fn export_tc_piecewise_linear_first_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = iqc(dir.path(), &["export", "--which", "TC", "--model", "piecewise-linear", "--index-min", "-4", "--index-max", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("TC.csv")).unwrap();
    let nonzero = rows(&csv)
        .into_iter()
        .filter(|r| r[0] == "0")
        .filter(|r| r[2].parse::<f64>().unwrap() != 0.0 || r[3].parse::<f64>().unwrap() != 0.0)
        .count();
    assert_eq!(nonzero, 2);
}

#[test]
fn report_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["report", "--model", "two-component-cos", "--index-min", "-12", "--index-max", "12"];
    assert_eq!(iqc(a.path(), &args).status.code(), Some(0));
    assert_eq!(iqc(b.path(), &args).status.code(), Some(0));
    for f in ["report.json", "report.txt", "reading.csv", "charfn.csv"] {
        let x = fs::read(a.path().join(f)).unwrap();
        let y = fs::read(b.path().join(f)).unwrap();
        assert!(x == y, "{f} differs between runs");
    }
    let doc: serde_json::Value = serde_json::from_slice(&fs::read(a.path().join("report.json")).unwrap()).unwrap();
    assert!(doc["summary"]["sigma_T"].is_number());
    assert!(doc["summary"]["bound_check"].as_str().unwrap().ends_with("pass"));
}

#[test]
fn sweep_commutator_error_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let out = iqc(dir.path(), &["sweep", "--model", "cyclic", "--d-values", "32,64,128"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let errs: Vec<f64> = rows(&csv).iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(errs.len(), 3);
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn read_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = iqc(dir.path(), &["read", "--model", "cyclic", "--D", "32", "--t", "-1.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let r = v["reading"].as_f64().unwrap();
    assert!((r + 1.5).abs() < 0.2, "{v}");
}
