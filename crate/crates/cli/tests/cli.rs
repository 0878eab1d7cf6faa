use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_discordbench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json_of(args: &[&str]) -> Value {
    serde_json::from_str(&stdout_of(args)).expect("valid JSON")
}

/// Data rows of a CSV with `#` comments, split on commas (header excluded).
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn matrix_entry(m: &Value, part: &str, i: usize, j: usize) -> f64 {
    m[part][i][j].as_f64().unwrap()
}

fn assert_matrix_schema(m: &Value, dim: usize) {
    assert_eq!(m["dim"].as_u64().unwrap() as usize, dim);
    let basis: Vec<&str> = m["basis"].as_array().unwrap().iter().map(|b| b.as_str().unwrap()).collect();
    if dim == 4 {
        assert_eq!(basis, ["HH", "HV", "VH", "VV"]);
    } else {
        assert_eq!(basis, ["H", "V"]);
    }
    for part in ["re", "im"] {
        let rows = m[part].as_array().unwrap();
        assert_eq!(rows.len(), dim);
        assert!(rows.iter().all(|r| r.as_array().unwrap().len() == dim));
    }
}

#[test]
fn incoherent_state_report() {
    let r = json_of(&["state", "incoherent"]);
    assert_matrix_schema(&r["rho"], 4);
    assert_matrix_schema(&r["reduced_a"], 2);
    assert_matrix_schema(&r["reduced_b"], 2);
    assert!((r["discord"].as_f64().unwrap() - 0.3113).abs() < 1e-4);
    assert_eq!(r["concurrence"].as_f64().unwrap(), 0.0);
    assert!((r["purity"].as_f64().unwrap() - 0.375).abs() < 1e-12);
    let rho = &r["rho"];
    assert!((matrix_entry(rho, "re", 1, 2) + 0.25).abs() < 1e-12);
    assert!((matrix_entry(rho, "re", 0, 0) - 0.25).abs() < 1e-12);
    assert!((matrix_entry(&r["reduced_b"], "re", 1, 1) - 0.5).abs() < 1e-12);
}

#[test]
fn coherent_state_has_no_correlations() {
    let r = json_of(&["state", "coherent", "--phi", "0"]);
    assert!(r["discord"].as_f64().unwrap() <= 1e-6);
    assert!(r["concurrence"].as_f64().unwrap() <= 1e-8);
    // pure state with every entry of magnitude 1/4 at φ = 0
    for i in 0..4 {
        for j in 0..4 {
            let re = matrix_entry(&r["rho"], "re", i, j);
            let im = matrix_entry(&r["rho"], "im", i, j);
            assert!(((re * re + im * im).sqrt() - 0.25).abs() < 1e-12);
        }
    }
    let a = json_of(&["state", "coherent", "--phi", "-1.3", "--measure", "a"]);
    assert_eq!(a["measured_subsystem"], "A");
    assert!(a["discord"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn long_delay_gives_maximally_mixed_state() {
    let r = json_of(&["state", "delayed", "--delta", "500"]);
    for i in 0..4 {
        for j in 0..4 {
            let want = if i == j { 0.25 } else { 0.0 };
            assert!((matrix_entry(&r["rho"], "re", i, j) - want).abs() < 1e-6);
            assert!(matrix_entry(&r["rho"], "im", i, j).abs() < 1e-6);
        }
    }
    assert!(r["discord"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn state_csv_layout() {
    let text = stdout_of(&["state", "incoherent", "--format", "csv"]);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# generated-by discordbench state incoherent"));
    assert_eq!(lines.next().unwrap(), "quantity,value");
    let discord: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("discord,"))
        .unwrap()
        .parse()
        .unwrap();
    assert!((discord - 0.3113).abs() < 1e-4);
    assert!(text.lines().any(|l| l == "rho_re_HV_VH,-0.25"));
}

#[test]
fn homdip_csv() {
    let text = stdout_of(&["homdip"]);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# generated-by discordbench homdip"));
    let meta = lines[1].strip_prefix("# ").unwrap();
    let fwhm: f64 = meta.split("fwhm_um=").nth(1).unwrap().parse().unwrap();
    assert!((170.0..=215.0).contains(&fwhm));
    assert!(meta.starts_with("visibility=0.5 "));
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["delta_um", "coincidence_norm"]);
    assert_eq!(rows.len(), 161);
    let min = rows.iter().map(|r| r[1]).fold(f64::INFINITY, f64::min);
    assert!((min - 0.5).abs() < 1e-9);
    assert!((rows[0][1] - 1.0).abs() < 1e-5);
    assert!((rows[160][1] - 1.0).abs() < 1e-5);

    let narrow = stdout_of(&["homdip", "--min", "-1000", "--max", "1000", "--points", "3"]);
    let (_, rows) = csv_rows(&narrow);
    assert_eq!(rows.len(), 3);
    assert!((rows[0][1] - 1.0).abs() < 1e-12);
}

#[test]
fn delay_scan_csv() {
    let text = stdout_of(&["delay-scan"]);
    assert!(text.starts_with("# generated-by discordbench delay-scan"));
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["delta_um", "purity", "discord"]);
    let first = &rows[0];
    assert_eq!(first[0], 0.0);
    assert!((first[1] - 0.375).abs() < 1e-12);
    assert!((first[2] - 0.3113).abs() < 1e-4);
    let last = rows.last().unwrap();
    assert_eq!(last[0], 500.0);
    assert!((last[1] - 0.25).abs() < 1e-6);
    assert!(last[2] <= 1e-6);
    for w in rows.windows(2) {
        assert!(w[1][1] <= w[0][1] && w[1][2] <= w[0][2] + 1e-9);
    }
}

#[test]
fn error_curve_csv() {
    let text = stdout_of(&["error-curve"]);
    assert!(text.starts_with("# generated-by discordbench error-curve"));
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["mu", "error_fraction"]);
    let at = |mu: f64| rows.iter().find(|r| (r[0] - mu).abs() < 1e-9).unwrap()[1];
    assert!((at(0.1) - 0.096).abs() < 1e-3);
    assert!(at(0.001) < 0.002);
    assert!(rows.windows(2).all(|w| w[1][1] > w[0][1]));
}

#[test]
fn tomography_report_for_coherent_state() {
    let r = json_of(&["tomography", "coherent", "--resamples", "8"]);
    assert_matrix_schema(&r["true_state"], 4);
    assert_matrix_schema(&r["reconstructed"], 4);
    assert_eq!(r["counts"].as_array().unwrap().len(), 16);
    assert_eq!(r["counts"][0]["setting"], "HH");
    assert!(r["converged"].as_bool().unwrap());
    assert!(r["fidelity"].as_f64().unwrap() >= 0.99);
    assert!(r["concurrence"]["value"].as_f64().unwrap() <= 0.02);
    assert!(r["discord"]["value"].as_f64().unwrap() <= 0.02);
    for key in ["mean", "std"] {
        assert!(r["discord"][key].as_f64().unwrap().is_finite());
        assert!(r["concurrence"][key].as_f64().unwrap().is_finite());
    }
}

#[test]
fn tomography_at_high_counts() {
    let r = json_of(&["tomography", "incoherent", "--mean-total", "1e6", "--resamples", "2"]);
    assert!(r["fidelity"].as_f64().unwrap() >= 0.999);
}

#[test]
fn repeated_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 3] = [
        &["tomography", "incoherent", "--resamples", "4", "--seed", "7"],
        &["delay-scan", "--points", "11"],
        &["state", "delayed", "--delta", "90", "--format", "csv"],
    ];
    for (k, args) in cases.iter().enumerate() {
        let a = dir.path().join(format!("{k}a"));
        let b = dir.path().join(format!("{k}b"));
        for p in [&a, &b] {
            let mut full: Vec<&str> = args.to_vec();
            full.extend(["--output", p.to_str().unwrap()]);
            assert!(run(&full).status.success());
        }
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{args:?}");
        let mut dash: Vec<&str> = args.to_vec();
        dash.extend(["--output", "-"]);
        assert_eq!(stdout_of(&dash).into_bytes(), std::fs::read(&a).unwrap());
    }
}

#[test]
fn different_seeds_give_different_counts() {
    let a = json_of(&["tomography", "incoherent", "--resamples", "2", "--seed", "1"]);
    let b = json_of(&["tomography", "incoherent", "--resamples", "2", "--seed", "2"]);
    assert_ne!(a["counts"], b["counts"]);
}

#[test]
fn records_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.csv");
    let p = path.to_str().unwrap();
    assert!(run(&["tomography", "incoherent", "--format", "csv", "--seed", "3", "-o", p]).status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# generated-by discordbench tomography"));
    assert_eq!(text.lines().nth(1).unwrap(), "setting,count");
    assert_eq!(text.lines().count(), 18);

    let simulated = json_of(&["tomography", "incoherent", "--seed", "3", "--resamples", "2"]);
    let loaded = json_of(&["tomography", "incoherent", "--records", p, "--resamples", "2"]);
    assert_eq!(simulated["reconstructed"], loaded["reconstructed"]);
    assert_eq!(simulated["fidelity"], loaded["fidelity"]);
}

#[test]
fn malformed_records_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad_label = dir.path().join("bad.csv");
    std::fs::write(&bad_label, "setting,count\nHX,4\n").unwrap();
    let zeros = dir.path().join("zeros.csv");
    let body: String = ["H", "V", "D", "R"]
        .iter()
        .flat_map(|a| ["H", "V", "D", "R"].iter().map(move |b| format!("{a}{b},0\n")))
        .collect();
    std::fs::write(&zeros, format!("setting,count\n{body}")).unwrap();
    for path in [&bad_label, &zeros] {
        let out = run(&["tomography", "incoherent", "--records", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(
        run(&["tomography", "incoherent", "--records", "/nonexistent/records.csv"]).status.code(),
        Some(1)
    );
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["state"]).status.code(), Some(2));
    assert_eq!(run(&["state", "incoherent", "--phi", "1"]).status.code(), Some(2));
    assert_eq!(run(&["state", "coherent", "--delta", "1"]).status.code(), Some(2));
    assert_eq!(run(&["state", "incoherent", "--mu", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["homdip", "--points", "1"]).status.code(), Some(2));
    assert_eq!(run(&["delay-scan", "--min", "-5"]).status.code(), Some(2));
    assert_eq!(run(&["error-curve", "--mu-min", "0"]).status.code(), Some(2));
    assert_eq!(run(&["error-curve", "--mu-min", "0.5", "--mu-max", "0.1"]).status.code(), Some(2));
    assert_eq!(run(&["tomography", "coherent", "--resamples", "1"]).status.code(), Some(2));

    let capped = run(&["tomography", "incoherent", "--max-iter", "3", "--resamples", "2"]);
    assert_eq!(capped.status.code(), Some(3));
    let report: Value = serde_json::from_slice(&capped.stdout).unwrap();
    assert_eq!(report["converged"], false);

    let unwritable = Path::new("/nonexistent-dir/out.json");
    assert_eq!(
        run(&["state", "incoherent", "-o", unwritable.to_str().unwrap()]).status.code(),
        Some(1)
    );
}
