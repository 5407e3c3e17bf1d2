use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use aperture_forge::output::csv_payload_of;
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    run_with_env(args, &[])
}

fn run_with_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_aperture-forge"));
    cmd.args(args).env_remove("APERTURE_FORGE_SEED").env("RUST_LOG", "error");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn out_dir(tmp: &TempDir, name: &str) -> String {
    tmp.path().join(name).display().to_string()
}

/// Parses the numeric payload of a CSV file into header and rows.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = csv_payload_of(&text).lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn spacing_summary_matches_closed_form_mean() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "s");
    ok(&["spacing", "--ports", "8", "--aperture", "10", "--samples", "20000", "--seed", "3", "--out", &dir]);
    let doc = read_json(&Path::new(&dir).join("spacing_summary_M8.json"));
    let data = &doc["data"];
    assert!((data["expected_theory"].as_f64().unwrap() - 10.0 / 63.0).abs() < 1e-15);
    assert_eq!(data["M"], 8);
    assert_eq!(data["W_max"], 10.0);
    assert_eq!(data["samples"], 20000);
    assert_eq!(data["seed"], 3);
    assert_eq!(doc["seed"], 3);
    assert_eq!(doc["tool"], "aperture-forge");
    assert!(doc["version"].is_string());
    assert_eq!(doc["config"]["samples"], 20000);

    let (header, rows) = read_csv(&Path::new(&dir).join("spacing_M8.csv"));
    assert_eq!(header, ["delta", "pdf_theory", "pdf_empirical", "ccdf_theory", "ccdf_empirical"]);
    assert_eq!(rows.len(), 50);
}

#[test]
fn spacing_without_samples_is_theory_only() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "s");
    ok(&["spacing", "--ports", "4", "--samples", "0", "--out", &dir]);
    let (header, rows) = read_csv(&Path::new(&dir).join("spacing_M4.csv"));
    let (pe, ce, pt) = (col(&header, "pdf_empirical"), col(&header, "ccdf_empirical"), col(&header, "pdf_theory"));
    for row in &rows {
        assert!(row[pe].is_empty() && row[ce].is_empty());
        assert!(num(&row[pt]) >= 0.0);
    }
    let summary = read_json(&Path::new(&dir).join("spacing_summary_M4.json"));
    assert!(summary["data"]["expected_empirical"].is_null());
}

#[test]
fn spacing_sweep_has_one_row_per_port_count() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "s");
    ok(&["spacing", "--ports", "3..16", "--samples", "2000", "--out", &dir]);
    let (header, rows) = read_csv(&Path::new(&dir).join("spacing_sweep.csv"));
    assert_eq!(rows.len(), 14);
    let (m, w, e) = (col(&header, "M"), col(&header, "W_max"), col(&header, "expected_times_m_plus_1"));
    for row in &rows {
        let ports: f64 = num(&row[m]);
        assert_eq!(num(&row[w]), (ports - 1.0) / 2.0);
        assert!((num(&row[e]) - 0.5).abs() < 1e-11);
    }
    // Per-M seeds are the root seed plus the sweep index.
    let s16 = read_json(&Path::new(&dir).join("spacing_summary_M16.json"));
    assert_eq!(s16["data"]["seed"], 13);
}

#[test]
fn design_two_ports_is_trivial() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "d");
    ok(&["design", "--ports", "2", "--out", &dir]);
    let doc = read_json(&Path::new(&dir).join("design_M2.json"));
    assert_eq!(doc["data"]["optimized"]["positions"], serde_json::json!([0.0, 0.5]));
    assert_eq!(doc["data"]["iterations"], 0);
    let (_, rows) = read_csv(&Path::new(&dir).join("trace_M2.csv"));
    assert_eq!(rows.len(), 1);
}

#[test]
fn design_reduces_objective_and_stays_feasible() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "d");
    ok(&["design", "--ports", "5,9", "--log-every", "10", "--out", &dir]);
    for m in [5usize, 9] {
        let doc = read_json(&Path::new(&dir).join(format!("design_M{m}.json")));
        let data = &doc["data"];
        assert!(data["optimized"]["J"].as_f64().unwrap() < data["initial"]["J"].as_f64().unwrap());
        let p: Vec<f64> = data["optimized"]["positions"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap())
            .collect();
        let w = (m as f64 - 1.0) / 2.0;
        let d = data["d_min"].as_f64().unwrap();
        assert_eq!(p.len(), m);
        assert_eq!(p[0], 0.0);
        assert_eq!(p[m - 1], w);
        assert!(p.windows(2).all(|g| g[1] - g[0] >= d - 1e-12));
        assert!(data["ula"]["positions"].is_array());
        assert!(data["scaled_mra"]["positions"].is_array());

        let (header, rows) = read_csv(&Path::new(&dir).join(format!("trace_M{m}.csv")));
        assert_eq!(header, ["iter", "J", "gamma_max", "lambda_bar_sq"]);
        assert!(rows.len() <= 1001);
        let iters: Vec<usize> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
        assert_eq!(iters[0], 0);
        assert_eq!(*iters.last().unwrap(), data["iterations"].as_u64().unwrap() as usize);
        assert!(iters[..iters.len() - 1].iter().all(|i| i % 10 == 0));

        let sidecar = read_json(&Path::new(&dir).join(format!("trace_M{m}_placements.json")));
        let entries = sidecar["data"].as_array().unwrap();
        assert_eq!(entries.len(), rows.len());
        assert_eq!(entries[0]["positions"].as_array().unwrap().len(), m);
    }
}

#[test]
fn design_beyond_mra_table_falls_back_to_ula() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "d");
    ok(&["design", "--ports", "12", "--max-iters", "3", "--out", &dir]);
    let doc = read_json(&Path::new(&dir).join("design_M12.json"));
    assert_eq!(doc["data"]["init"], "ula");
    assert!(doc["data"]["scaled_mra"].is_null());
}

#[test]
fn design_random_init_depends_on_seed_only() {
    let tmp = TempDir::new().unwrap();
    let args = |dir: &str, seed: &str| {
        ok(&["design", "--ports", "6", "--init", "random", "--seed", seed, "--max-iters", "5", "--out", dir]);
        read_json(&Path::new(dir).join("design_M6.json"))["data"]["initial"]["positions"].clone()
    };
    let a = args(&out_dir(&tmp, "a"), "11");
    let b = args(&out_dir(&tmp, "b"), "11");
    let c = args(&out_dir(&tmp, "c"), "12");
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn crb_table_matches_reference_values() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "c");
    ok(&["crb", "--ports", "5,11", "--out", &dir]);
    let (header, rows) = read_csv(&Path::new(&dir).join("crb.csv"));
    assert_eq!(header, ["scheme", "M", "gamma_max", "L_geo", "CRB"]);
    assert_eq!(rows.len(), 6);
    let crb_of = |scheme: &str, m: &str| {
        num(&rows.iter().find(|r| r[0] == scheme && r[1] == m).unwrap()[4])
    };
    let ula11 = crb_of("ula", "11");
    let expected = 1.0 / (2.0 * 100.0 * 10.0 * 4.0 * std::f64::consts::PI.powi(2) * 15f64.to_radians().sin().powi(2) * 27.5);
    assert!((ula11 - expected).abs() / expected < 1e-10);
    assert!((ula11 - 6.88e-6).abs() < 0.01e-6);
    for row in &rows {
        let m: f64 = num(&row[1]);
        assert!(num(&row[2]) >= m * m * (1.0 - 1e-12));
    }
    for m in ["5", "11"] {
        assert!(crb_of("optimized", m) <= crb_of("ula", m));
    }
}

#[test]
fn crb_rejects_endfire_before_computing() {
    for theta in ["0", "180"] {
        let out = run(&["crb", "--theta-deg", theta]);
        assert_eq!(out.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&out.stderr).contains("endfire"));
    }
}

#[test]
fn crb_accepts_custom_placement() {
    let tmp = TempDir::new().unwrap();
    let file = tmp.path().join("p.txt");
    fs::write(&file, "# hand-made\n0\n0.3\n1.6\n2\n").unwrap();
    let dir = out_dir(&tmp, "c");
    ok(&["crb", "--ports", "4", "--placement-file", file.to_str().unwrap(), "--out", &dir]);
    let (_, rows) = read_csv(&Path::new(&dir).join("crb.csv"));
    let schemes: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(schemes, ["ula", "scaled-mra", "optimized", "custom"]);
}

#[test]
fn mse_bound_sweep_rows_and_noise_scaling() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "m");
    ok(&["mse-bound", "--snr-db-range=-10:20:2", "--out", &dir]);
    let (header, rows) = read_csv(&Path::new(&dir).join("mse_bound.csv"));
    let (s, snr, bound) = (col(&header, "scheme"), col(&header, "snr_db"), col(&header, "bound"));
    let ula: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r[s] == "ula")
        .map(|r| (num(&r[snr]), num(&r[bound])))
        .collect();
    assert_eq!(ula.len(), 16);
    // Only the noise changes, so bound ∝ σ_z⁴ = 10^(−SNR/5).
    for w in ula.windows(2) {
        let ratio = w[1].1 / w[0].1;
        let expected = 10f64.powf(-(w[1].0 - w[0].0) / 5.0);
        assert!((ratio - expected).abs() / expected < 1e-9);
    }
    let summary = read_json(&Path::new(&dir).join("mse_bound_summary.json"));
    let reductions = summary["data"]["mean_relative_reduction"].as_array().unwrap();
    let optimized = reductions.iter().find(|r| r[0] == "optimized").unwrap()[1].as_f64().unwrap();
    assert!(optimized >= 0.30, "mean reduction {optimized}");
}

#[test]
fn demo_estimate_noiseless_on_grid_is_exact() {
    let grid_angle = 60.0 * 180.0 / 179.0;
    let out = ok(&["demo-estimate", "--noiseless", "--theta-deg", &grid_angle.to_string(), "--snapshots", "10"]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["data"]["grid_error_cells"], 0);
    assert!(doc["data"]["abs_error_deg"].as_f64().unwrap() < 1e-9);
}

#[test]
fn demo_estimate_high_snr_within_one_cell() {
    let args = ["demo-estimate", "--ports", "5", "--theta-deg", "60", "--snr-db", "20", "--snapshots", "1000", "--seed", "9"];
    let a = ok(&args);
    let doc: Value = serde_json::from_slice(&a.stdout).unwrap();
    let err = doc["data"]["abs_error_deg"].as_f64().unwrap();
    assert!(err <= 180.0 / 179.0, "error {err}°");
    let b = ok(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn flags_override_config_file_and_env_sets_default_seed() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"ports": "5", "samples": 100, "bins": 4, "seed": 8}"#).unwrap();
    let out = ok(&["spacing", "--config", cfg.to_str().unwrap(), "--bins", "6", "--format", "json"]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["config"]["bins"], 6);
    assert_eq!(doc["config"]["samples"], 100);
    assert_eq!(doc["seed"], 8);
    assert_eq!(doc["data"].as_array().unwrap().len(), 6);

    let env = run_with_env(&["spacing", "--samples", "10", "--format", "json"], &[("APERTURE_FORGE_SEED", "77")]);
    let doc: Value = serde_json::from_slice(&env.stdout).unwrap();
    assert_eq!(doc["seed"], 77);
    let flag = run_with_env(
        &["spacing", "--samples", "10", "--seed", "5", "--format", "json"],
        &[("APERTURE_FORGE_SEED", "77")],
    );
    let doc: Value = serde_json::from_slice(&flag.stdout).unwrap();
    assert_eq!(doc["seed"], 5);
}

#[test]
fn config_errors_exit_with_code_two() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"sampels": 100}"#).unwrap();
    assert_eq!(run(&["spacing", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["spacing", "--ports", "1"]).status.code(), Some(2));
    assert_eq!(run(&["design", "--alpha", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["mse-bound", "--snr-db-range", "5:0:1"]).status.code(), Some(2));
    assert_eq!(run(&["spacing", "--bogus"]).status.code(), Some(2));
    let bad = run_with_env(&["spacing", "--samples", "1"], &[("APERTURE_FORGE_SEED", "abc")]);
    assert_eq!(bad.status.code(), Some(2));

    let file = tmp.path().join("p.txt");
    fs::write(&file, "0\n0.5\nnope\n").unwrap();
    let out = run(&["design", "--init", "custom", "--placement-file", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn infeasible_custom_placement_exits_with_code_three() {
    let tmp = TempDir::new().unwrap();
    let file = tmp.path().join("p.txt");
    fs::write(&file, "0\n0.01\n2\n").unwrap();
    let out = run(&["design", "--init", "custom", "--placement-file", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["design", "--ports", "5", "--d-min", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reruns_reproduce_csv_payloads_byte_for_byte() {
    let tmp = TempDir::new().unwrap();
    for (name, args) in [
        ("spacing", vec!["spacing", "--ports", "3..6", "--samples", "5000", "--seed", "21"]),
        ("design", vec!["design", "--ports", "6", "--init", "random", "--seed", "4", "--max-iters", "40"]),
        ("mse", vec!["mse-bound", "--ports", "4"]),
    ] {
        let mut payloads = Vec::new();
        for run_idx in 0..2 {
            let dir = out_dir(&tmp, &format!("{name}{run_idx}"));
            let mut a = args.clone();
            a.extend(["--out", &dir]);
            ok(&a);
            let mut files: Vec<_> = fs::read_dir(&dir)
                .unwrap()
                .map(|e| e.unwrap().path())
                .filter(|p| p.extension().is_some_and(|e| e == "csv"))
                .collect();
            files.sort();
            let texts: Vec<(String, String)> = files
                .iter()
                .map(|p| {
                    let text = fs::read_to_string(p).unwrap();
                    (p.file_name().unwrap().to_string_lossy().into_owned(), csv_payload_of(&text).to_string())
                })
                .collect();
            payloads.push(texts);
        }
        assert!(!payloads[0].is_empty());
        assert_eq!(payloads[0], payloads[1], "{name} payloads differ");
    }
}
