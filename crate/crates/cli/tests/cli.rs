use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn colem(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_colem"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("SIM_WORKERS")
        .output()
        .expect("spawn colem")
}

fn ok(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_json(o: &Output) -> Value {
    assert!(!o.status.success());
    let stderr = String::from_utf8_lossy(&o.stderr);
    // log lines may precede the report
    let last = stderr.lines().last().unwrap_or_default();
    serde_json::from_str(last).unwrap_or_else(|e| panic!("{e}: {stderr}"))
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for job in fs::read_dir(dir).unwrap() {
        let job = job.unwrap().path();
        for f in fs::read_dir(&job).unwrap() {
            let f = f.unwrap().path();
            files.insert(f.strip_prefix(dir).unwrap().display().to_string(), fs::read(&f).unwrap());
        }
    }
    files
}

fn meta(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn spectrum_writes_one_artifact_per_temperature_and_method() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&colem(&["spectrum", "--N", "2", "--T", "1,10,25,50", "--methods", "concatenation"], dir.path()));
    assert_eq!(stdout.lines().count(), 4);
    for t in ["1", "10", "25", "50"] {
        let csv = dir.path().join(format!("spectrum/spectrum_T{t}K_concatenation.csv"));
        let text = fs::read_to_string(&csv).unwrap();
        assert!(text.starts_with("detuning_ueV,total,zpl,sideband\n"));
        let m = meta(&csv.with_extension("meta.json"));
        assert_eq!(m["parameters"]["temperature_K"].as_f64().unwrap(), t.parse::<f64>().unwrap());
        assert_eq!(m["config"]["chain"]["n_emitters"], 2);
    }
}

#[test]
fn repeated_runs_are_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["g1", "--T", "4,25", "--methods", "concatenation,polaron", "--json"];
    ok(&colem(&[&args[..], &["--workers", "1"]].concat(), dir.path()));
    let first = snapshot(dir.path());
    ok(&colem(&[&args[..], &["--workers", "4"]].concat(), dir.path()));
    let second = snapshot(dir.path());
    assert_eq!(first.len(), 12);
    assert_eq!(first, second);
}

#[test]
fn modes_of_eight_emitters() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&colem(&["modes", "--N", "8", "--spacing", "lambda/25", "--T", "1"], dir.path()));
    assert!(stdout.starts_with("modes N=8 T=1 K"));
    let m = meta(&dir.path().join("modes/modes_N8_T1K.meta.json"));
    let ratio = m["results"]["enhancement_ratio_concatenation"].as_f64().unwrap();
    assert!(ratio > 500.0, "{ratio}");
    let rows = fs::read_to_string(dir.path().join("modes/modes_N8_T1K.csv")).unwrap();
    assert_eq!(rows.lines().count(), 9);
}

#[test]
fn compare_table_covers_every_spacing_and_temperature() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&colem(
        &["compare", "--N", "2", "--spacings", "lambda/25,lambda/20,lambda/15", "--T", "1..60:1"],
        dir.path(),
    ));
    assert_eq!(stdout.lines().count(), 1);
    let text = fs::read_to_string(dir.path().join("compare/delta_lambda25_lambda20_lambda15.csv")).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 180);
    assert_eq!(rows[0][0], "lambda/25");
    assert_eq!(rows[179][0], "lambda/15");
    let m = meta(&dir.path().join("compare/delta_lambda25_lambda20_lambda15.meta.json"));
    let peaks: Vec<f64> =
        m["results"]["peaks"].as_array().unwrap().iter().map(|p| p["max_delta_percent"].as_f64().unwrap()).collect();
    assert!(peaks[0] > peaks[1] && peaks[1] > peaks[2], "{peaks:?}");
}

#[test]
fn sweep_over_chain_length_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    ok(&colem(
        &["sweep", "--axis", "N", "--values", "1..8", "--T", "1", "--quantity", "enhancement_ratio"],
        dir.path(),
    ));
    let text = fs::read_to_string(dir.path().join("sweep/enhancement_ratio_vs_N.csv")).unwrap();
    let ys: Vec<f64> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(ys.len(), 8);
    assert_eq!(ys[0], 1.0);
    assert!(ys.windows(2).all(|w| w[1] > w[0]), "{ys:?}");
    // one artifact per grid point plus the aggregate
    assert_eq!(fs::read_dir(dir.path().join("sweep")).unwrap().count(), 2 * 9);
}

#[test]
fn temperature_sweep_of_zpl_fraction_decreases() {
    let dir = tempfile::tempdir().unwrap();
    ok(&colem(&["sweep", "--axis", "T", "--values", "1,25,50,100", "--quantity", "zpl_fraction"], dir.path()));
    let m = meta(&dir.path().join("sweep/zpl_fraction_vs_T.meta.json"));
    assert_eq!(m["results"]["series"][0]["trend"], "decreasing");
}

#[test]
fn sweep_reports_failed_points() {
    let dir = tempfile::tempdir().unwrap();
    let o = colem(&["sweep", "--axis", "N", "--values", "2,3", "--T", "4", "--quantity", "delta_percent"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let e = error_json(&o);
    assert_eq!(e["error"]["kind"], "partial_failure");
    assert_eq!(e["error"]["failed"][0]["index"], 1);
    assert_eq!(e["error"]["failed"][0]["point"], "N=3, T=4");
    // the surviving point is still written
    assert!(dir.path().join("sweep/delta_percent_N2_T4K.csv").exists());
}

#[test]
fn errors_are_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[material]\nalpah = 0.02\n").unwrap();
    let e = error_json(&colem(&["modes", "--config", cfg.to_str().unwrap()], dir.path()));
    assert_eq!(e["error"]["kind"], "config");
    assert!(e["error"]["message"].as_str().unwrap().contains("material.alpah"));

    let e = error_json(&colem(&["modes", "--T", "-3"], dir.path()));
    assert_eq!(e["error"]["kind"], "config");

    let o = colem(&["concurrence", "--N", "3"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_json(&o)["error"]["kind"], "domain");

    let o = colem(&["modes", "--bogus"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"]["kind"], "usage");
}

#[test]
fn worker_variable_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_colem"))
        .args(["modes", "--T", "1", "--out"])
        .arg(dir.path())
        .env("SIM_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(error_json(&o)["error"]["kind"], "usage");
    let o = Command::new(env!("CARGO_BIN_EXE_colem"))
        .args(["modes", "--T", "1", "--out"])
        .arg(dir.path())
        .env("SIM_WORKERS", "2")
        .output()
        .unwrap();
    assert!(o.status.success());
}

#[test]
fn concurrence_starts_at_one_for_symmetric_state() {
    let dir = tempfile::tempdir().unwrap();
    ok(&colem(&["concurrence", "--state", "symmetric", "--T", "4"], dir.path()));
    let m = meta(&dir.path().join("concurrence/concurrence_T4K_concatenation.meta.json"));
    let seam = m["results"]["at_seam"].as_f64().unwrap();
    assert!(seam > 0.9 && seam < 0.95, "{seam}");
    assert!(dir.path().join("concurrence/concurrence_T4K_markovian.csv").exists());
}

#[test]
fn shipped_profile_parses() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/gaas.toml");
    let stdout = ok(&colem(&["modes", "--config", cfg.to_str().unwrap()], dir.path()));
    assert_eq!(stdout.lines().count(), 4);
}
