// Copyright 2026 The nvscalar Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::process::Command;

use nvscalar::pipeline::{
    point_seed, read_rows_csv, record_paths, run_sweep, ExclusionTable, Mode, SweepConfig,
    TableFormat, TABLE_HEADER,
};
use nvscalar::spin::{Branch, NvSpinModel, ScalingExponents};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nvscalar"))
}

#[test]
fn analytic_limits_rise_linearly_with_frequency() {
    let table = run_sweep(&SweepConfig::default(), 1).unwrap();
    let (xs, ys): (Vec<f64>, Vec<f64>) = table
        .rows
        .iter()
        .map(|r| (r.freq_hz.ln(), r.dalpha_up.ln()))
        .unzip();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    assert!((slope - 1.0).abs() < 0.1, "slope {slope}");
}

#[test]
fn every_row_carries_the_coefficient_ratio() {
    let mut cfg = SweepConfig::from_toml_str(
        "[sweep]\npoints = 12\n[[overrides]]\nindex = 4\nb0_tesla = 0.02\n",
    )
    .unwrap();
    cfg.sweep.mode = Mode::Synthetic;
    let table = run_sweep(&cfg, 2).unwrap();
    assert_eq!(table.rows.len(), 12);
    for (i, r) in table.rows.iter().enumerate() {
        let b0 = if i == 4 { 0.02 } else { 0.051 };
        let k = NvSpinModel::with_field(b0)
            .unwrap()
            .sensitivity_coefficients(&ScalingExponents::default(), Branch::EMinus)
            .unwrap();
        assert!((r.dme_up / r.dalpha_up - k.k_alpha / k.k_me).abs() < 1e-9);
        assert!(r.dalpha_up.is_finite() && r.dalpha_up > 0.0);
    }
}

#[test]
fn ingest_matches_synthetic_records() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = SweepConfig::from_toml_str("[sweep]\npoints = 5\nmaster_seed = 11\n").unwrap();
    cfg.sweep.mode = Mode::Synthetic;
    let synthetic = run_sweep(&cfg, 1).unwrap();

    for (i, f) in cfg.frequencies().iter().enumerate() {
        let plan = cfg.plan(i, *f);
        let decay = 2.0 * plan.noise.gamma1;
        let (s, r) = record_paths(dir.path(), i);
        let sig = plan.design.synthesize(decay, point_seed(11, i, 0));
        let rf = plan.design.synthesize(decay, point_seed(11, i, 1));
        sig.write_csv(fs::File::create(s).unwrap()).unwrap();
        rf.write_csv(fs::File::create(r).unwrap()).unwrap();
    }
    cfg.sweep.mode = Mode::Ingest;
    cfg.sweep.records_dir = Some(dir.path().to_path_buf());
    let ingested = run_sweep(&cfg, 1).unwrap();
    assert_eq!(ingested.rows, synthetic.rows);

    fs::remove_file(record_paths(dir.path(), 2).1).unwrap();
    let partial = run_sweep(&cfg, 1).unwrap();
    assert_eq!(partial.rows.len(), 4);
    assert_eq!(partial.failures[0].index, 2);
}

#[test]
fn json_round_trip_and_provenance() {
    let mut cfg = SweepConfig::from_toml_str("[sweep]\npoints = 3\nensemble_factor = 2.8e4\n").unwrap();
    cfg.darkmatter.rho_gev_cm3 = 0.3;
    let table = run_sweep(&cfg, 1).unwrap();
    assert_eq!(table.rows.len(), 6);
    let mut buf = Vec::new();
    table.write(&mut buf, TableFormat::Json).unwrap();
    let back = ExclusionTable::read_json(&buf[..]).unwrap();
    assert_eq!(back, table);
    assert_eq!(back.provenance.rho_dm_gev_cm3, 0.3);
    assert_eq!(back.provenance.config_sha256, cfg.fingerprint());
    assert!(back.provenance.schedule.contains("reconstruction"));

    let mut csv = Vec::new();
    table.write(&mut csv, TableFormat::Csv).unwrap();
    let rows = read_rows_csv(&csv[..]).unwrap();
    for (a, b) in rows.iter().zip(&table.rows) {
        assert!((a.inv_lambda_e_gev / b.inv_lambda_e_gev - 1.0).abs() < 1e-12);
    }
}

#[test]
fn cli_sweep_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    fs::write(&cfg, "[sweep]\npoints = 4\n").unwrap();
    let out = dir.path().join("table.csv");
    let status = bin()
        .args(["sweep", "--workers", "2", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), TABLE_HEADER.join(","));
    assert_eq!(text.lines().count(), 5);

    let projected = dir.path().join("projected.csv");
    let status = bin()
        .arg("project")
        .arg(&out)
        .arg("--output")
        .arg(&projected)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert_eq!(fs::read_to_string(&projected).unwrap().lines().count(), 9);

    let converted = bin().arg("dm-convert").arg(&out).output().unwrap();
    assert_eq!(converted.status.code(), Some(0));
    assert_eq!(String::from_utf8(converted.stdout).unwrap(), text);

    fs::write(&cfg, "[sweep]\npoints = 4\nbogus = 1\n").unwrap();
    let bad = bin().arg("sweep").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("bogus"));

    // The second grid point sits on the spin transition.
    let fs_hz = NvSpinModel::with_field(0.051).unwrap().transition_frequencies().minus_hz;
    fs::write(
        &cfg,
        format!("[sweep]\nfrequencies_hz = [1e9, {fs_hz}, 3e9]\n"),
    )
    .unwrap();
    let partial = bin().arg("sweep").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(partial.status.code(), Some(2));
    assert_eq!(String::from_utf8(partial.stdout).unwrap().lines().count(), 3);
}

#[test]
fn cli_fit_reports_both_conventions() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SweepConfig::default();
    let plan = cfg.plan(0, 1e9);
    let rec = plan.design.synthesize(200.0, 5);
    let path = dir.path().join("rec.csv");
    rec.write_csv(fs::File::create(&path).unwrap()).unwrap();
    let out = bin().arg("fit").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let lam = v["decay_constant"].as_f64().unwrap();
    let per_dir = v["transition_rate"].as_f64().unwrap();
    assert_eq!(per_dir, lam / 2.0);
    assert!((lam / 200.0 - 1.0).abs() < 0.3);

    fs::write(&path, "t_s,counts,shots\n1e-5,3\n").unwrap();
    let out = bin().arg("fit").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}
