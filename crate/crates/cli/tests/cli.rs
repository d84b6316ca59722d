use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn waveheat(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_waveheat"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_slice(&fs::read(dir.join("manifest.json")).unwrap()).unwrap()
}

fn data_rows(path: &Path) -> Vec<String> {
    let text = fs::read_to_string(path).unwrap();
    text.lines().filter(|l| !l.starts_with('#')).skip(1).map(String::from).collect()
}

#[test]
fn spectrum_writes_both_branches_and_digests() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = waveheat(&out, &["spectrum", "--k", "1..50"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(data_rows(&out.join("spectrum.csv")).len(), 100);

    let m = manifest(&out);
    assert_eq!(m["subcommand"], "spectrum");
    let outputs = m["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 2);
    for f in outputs {
        let bytes = fs::read(out.join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["bytes"].as_u64().unwrap() as usize, bytes.len());
        assert_eq!(f["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)));
    }
    let asym: Value = serde_json::from_slice(&fs::read(out.join("asymptotics.json")).unwrap()).unwrap();
    assert_eq!(asym["upper"]["k0"], 1);
}

#[test]
fn csv_header_block_names_digest_and_units() {
    let tmp = tempfile::tempdir().unwrap();
    let o = waveheat(tmp.path(), &["spectrum", "--k", "1..3", "--branches", "upper"]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(tmp.path().join("spectrum.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# waveheat "));
    let digest = manifest(tmp.path())["config_digest"].as_str().unwrap().to_string();
    assert_eq!(lines[1], format!("# config_digest: sha256:{digest}"));
    assert!(lines[2].starts_with("# columns: k, sign, re_lambda"));
    assert!(lines[3].starts_with("# units: "));
    assert_eq!(data_rows(&tmp.path().join("spectrum.csv")).len(), 3);
}

#[test]
fn invalid_usage_exits_64_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("never");
    for args in [
        &["spectrum", "--k", "5..3"][..],
        &["simulate", "--dt", "0"],
        &["simulate", "--dt", "-1"],
        &["scan", "--s", "0.5..3"],
        &["resolve", "--k", "0"],
        &["nonsense"],
        &["--jobs", "0", "spectrum", "--k", "1..2"],
    ] {
        let o = waveheat(&out, args);
        assert_eq!(code(&o), 64, "{args:?}");
        assert!(!out.exists(), "{args:?} left outputs behind");
    }
}

#[test]
fn help_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let o = waveheat(tmp.path(), &["--help"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("simulate"));
}

#[test]
fn config_file_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("spectrum.toml");
    fs::write(&cfg, "k = \"1..3\"\nbranches = \"upper\"\n").unwrap();
    let a = tmp.path().join("a");
    assert_eq!(code(&waveheat(&a, &["spectrum", "--config", cfg.to_str().unwrap()])), 0);
    assert_eq!(data_rows(&a.join("spectrum.csv")).len(), 3);

    let b = tmp.path().join("b");
    let o = waveheat(&b, &["spectrum", "--config", cfg.to_str().unwrap(), "--k", "1..5"]);
    assert_eq!(code(&o), 0);
    assert_eq!(data_rows(&b.join("spectrum.csv")).len(), 5);
    assert_eq!(manifest(&b)["config"]["k"], "1..5");
}

#[test]
fn json_config_accepted() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("resolve.json");
    fs::write(&cfg, r#"{"k": 2, "s": 3.0, "n": 64}"#).unwrap();
    let o = waveheat(tmp.path(), &["resolve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(manifest(tmp.path())["notes"]["n"], 64);
}

#[test]
fn config_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "k = \"1..3\"\ncolour = 4\n").unwrap();
    let out = tmp.path().join("out");
    assert_eq!(code(&waveheat(&out, &["spectrum", "--config", cfg.to_str().unwrap()])), 64);
    let missing = tmp.path().join("missing.toml");
    assert_eq!(code(&waveheat(&out, &["spectrum", "--config", missing.to_str().unwrap()])), 66);
    assert!(!out.exists());
}

#[test]
fn scan_sweep_without_peaks_has_no_fit() {
    let tmp = tempfile::tempdir().unwrap();
    let o = waveheat(tmp.path(), &["scan", "--s", "0.5..3", "--step", "0.5", "--m", "8", "--n", "64"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(&tmp.path().join("scan.csv"));
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.ends_with(",sweep")));
    assert!(!tmp.path().join("fit.json").exists());
    assert!(manifest(tmp.path())["notes"]["cubic_bound_constant"].as_f64().unwrap() > 0.0);
}

#[test]
fn scan_with_empty_fit_window_exits_65() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = waveheat(&out, &["scan", "--peaks", "3..8", "--window", "500..600", "--m", "8", "--n", "64"]);
    assert_eq!(code(&o), 65);
    assert!(!out.exists());
}

#[test]
fn resolve_near_degenerate_frequency_is_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let o = waveheat(tmp.path(), &["resolve", "--k", "3", "--s", "9.42"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("near the degenerate point"));
    let m = manifest(tmp.path());
    assert_eq!(m["notes"]["s_requested"], 9.42);
    assert_eq!(m["notes"]["s_used"], 9.42);
    assert_eq!(m["notes"]["perturbed"], false);
    assert_eq!(m["warnings"].as_array().unwrap().len(), 1);
}

#[test]
fn resolve_exact_degeneracy_is_perturbed() {
    let tmp = tempfile::tempdir().unwrap();
    let s = format!("{}", 3.0 * std::f64::consts::PI);
    let o = waveheat(tmp.path(), &["resolve", "--k", "3", "--s", &s]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let notes = &manifest(tmp.path())["notes"];
    assert_eq!(notes["perturbed"], true);
    assert_ne!(notes["s_used"].as_f64().unwrap(), notes["s_requested"].as_f64().unwrap());
}

#[test]
fn resolve_reads_data_file() {
    let tmp = tempfile::tempdir().unwrap();
    let n = 62;
    let h = 1.0 / (n + 1) as f64;
    let mut csv = String::from("x,f_re,f_im,g_re,g_im,h_re,h_im\n");
    for j in 0..n + 2 {
        let x = -1.0 + j as f64 * h;
        csv.push_str(&format!("{x},0,0,{},0,1,0\n", (std::f64::consts::PI * x).sin()));
    }
    let rhs = tmp.path().join("rhs.csv");
    fs::write(&rhs, csv).unwrap();
    let out = tmp.path().join("out");
    let o = waveheat(&out, &["resolve", "--k", "2", "--s", "5", "--rhs", rhs.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(manifest(&out)["notes"]["n"], n);

    let missing = tmp.path().join("missing.csv");
    assert_eq!(code(&waveheat(&out, &["resolve", "--rhs", missing.to_str().unwrap()])), 66);
    fs::write(&rhs, "x,f_re,f_im,g_re,g_im,h_re,h_im\n-1,0,0,0,0,0,0\n").unwrap();
    assert_eq!(code(&waveheat(&out, &["resolve", "--rhs", rhs.to_str().unwrap()])), 65);
}

#[test]
fn resolve_self_test_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = waveheat(tmp.path(), &["resolve", "--self-test", "--cases", "5"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("max relative error"));
    assert_eq!(data_rows(&tmp.path().join("selftest.csv")).len(), 5);
    assert!(manifest(tmp.path())["notes"]["max_relative_error"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn simulate_writes_trace_and_fit() {
    let tmp = tempfile::tempdir().unwrap();
    let o = waveheat(
        tmp.path(),
        &["simulate", "--modes", "4", "--n", "32", "--dt", "2e-2", "--T", "400", "--per-mode"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(tmp.path().join("trace.csv")).unwrap();
    assert!(text.contains("t,E_total,dissipation,E_1,E_2,E_3,E_4\n"));
    assert_eq!(data_rows(&tmp.path().join("trace.csv")).len(), 401);
    let fit: Value = serde_json::from_slice(&fs::read(tmp.path().join("fit.json")).unwrap()).unwrap();
    assert!(fit["exponent"].as_f64().unwrap() < 0.0);
    assert_eq!(fit["truncation"].as_array().unwrap().len(), 3);
    assert!(manifest(tmp.path())["notes"]["max_relative_increase"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn simulate_eigenmode() {
    let tmp = tempfile::tempdir().unwrap();
    let o = waveheat(tmp.path(), &["simulate", "--eigenmode", "k=2", "--n", "64", "--dt", "1e-2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let e: Value = serde_json::from_slice(&fs::read(tmp.path().join("eigenmode.json")).unwrap()).unwrap();
    assert_eq!(e["k"], 2);
    assert!(e["final_deviation"].as_f64().unwrap().abs() < 0.05);
    assert_eq!(data_rows(&tmp.path().join("trace.csv")).len(), 51);
}

#[test]
fn short_simulation_without_fit_window() {
    let tmp = tempfile::tempdir().unwrap();
    let o = waveheat(tmp.path(), &["simulate", "--modes", "2", "--n", "32", "--T", "5"]);
    assert_eq!(code(&o), 0);
    assert!(!tmp.path().join("fit.json").exists());
    let o = waveheat(tmp.path(), &["simulate", "--modes", "2", "--n", "32", "--T", "5", "--fit-window", "1..5"]);
    assert_eq!(code(&o), 65);
}
