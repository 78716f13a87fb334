use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

use meltmap::api::{self, FitRequest};
use meltmap::dataset::{load_csv, synth_generate, write_csv, SynthOptions};
use meltmap::zoo;
use serde_json::Value;
use tempfile::TempDir;

fn meltmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meltmap")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn synth_csv(dir: &TempDir, model: &str, sigma: f64) -> PathBuf {
    let eq = zoo::get(model).unwrap().equation.clone();
    let ds = synth_generate(&eq, &SynthOptions { noise_sigma: sigma, ..Default::default() }).unwrap();
    let path = dir.path().join(format!("{model}-{sigma}.csv"));
    write_csv(&ds, &path).unwrap();
    path
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).filter(|r| r.starts_with(' ')))
        .unwrap_or_else(|| panic!("no `{key}` line in:\n{text}"))
        .trim()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn fit_zero_noise_depth_prints_unit_r2() {
    let dir = TempDir::new().unwrap();
    let csv = synth_csv(&dir, "depth_pv", 0.0);
    let text = stdout(&meltmap(&["fit", p(&csv), "--target", "depth", "--degree", "2"]));
    assert_eq!(field(&text, "r2_train"), "1.000000");
    assert_eq!(field(&text, "degree"), "2");
}

#[test]
fn fit_auto_selects_quadratic() {
    let dir = TempDir::new().unwrap();
    let csv = synth_csv(&dir, "depth_pv", 0.0);
    let text = stdout(&meltmap(&["fit", p(&csv), "--target", "depth", "--degree", "auto"]));
    assert_eq!(field(&text, "degree"), "2");
}

#[test]
fn malformed_csv_exits_2_with_schema_error() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("bad.csv");
    std::fs::write(&csv, "power,speed\n1,2\n").unwrap();
    let o = meltmap(&["fit", p(&csv), "--target", "depth"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schema error"));
}

#[test]
fn saved_equation_predicts_like_in_memory_fit() {
    let dir = TempDir::new().unwrap();
    let csv = synth_csv(&dir, "depth_pv", 3.0);
    let out = dir.path().join("eq.json");
    stdout(&meltmap(&["fit", p(&csv), "--target", "depth", "--degree", "3", "--out", p(&out)]));

    let mut req = FitRequest::new("depth");
    req.degree = "3".parse().unwrap();
    let fitted = api::fit(&load_csv(&csv).unwrap(), &req).unwrap().equation;
    for (pw, v) in [(80.0, 300.0), (250.0, 1200.0), (480.0, 1900.0)] {
        let o = meltmap(&["predict", "--equation", p(&out), "-P", &pw.to_string(), "-V", &v.to_string()]);
        let got: f64 = stdout(&o).trim().parse().unwrap();
        let want = fitted.evaluate(&[pw, v]).unwrap();
        assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "{got} vs {want}");
    }
}

#[test]
fn predict_near_origin_returns_intercept() {
    let got: f64 = stdout(&meltmap(&["predict", "--zoo", "depth_pv", "-P", "1e-9", "-V", "1e-9"])).trim().parse().unwrap();
    assert!((got - 53.7694).abs() < 1e-6);
}

#[test]
fn predict_json_and_named_inputs() {
    let o = meltmap(&["predict", "--zoo", "spatter_logdims", "--input", "length=1", "-W", "1", "-D", "1", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["target"], "spatter");
    assert!(v["prediction"].is_f64());
}

#[test]
fn predict_unknown_zoo_id_lists_ids() {
    let o = meltmap(&["predict", "--zoo", "nope", "-P", "1", "-V", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    for id in zoo::model_ids() {
        assert!(err.contains(id), "{err}");
    }
}

#[test]
fn predict_rejects_non_positive_power() {
    let o = meltmap(&["predict", "--zoo", "depth_pv", "-P", "0", "-V", "100"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn train_knn_memorises_training_rows() {
    let dir = TempDir::new().unwrap();
    let csv = synth_csv(&dir, "width_pv", 2.0);
    let text = stdout(&meltmap(&["train", p(&csv), "--target", "width", "--family", "knn", "--n-neighbors", "1"]));
    assert_eq!(field(&text, "r2_train"), "1.000000");
}

#[test]
fn train_gradient_boost_spatter_row_is_fast() {
    let dir = TempDir::new().unwrap();
    let csv = synth_csv(&dir, "spatter_pv", 50.0);
    let model = dir.path().join("gb.json");
    let start = Instant::now();
    let o = meltmap(&[
        "train", p(&csv), "--target", "spatter", "--family", "gb", "--n-estimators", "35", "--max-depth", "2",
        "--lr", "0.1", "--out", p(&model), "--json",
    ]);
    let elapsed = start.elapsed();
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["learning_rate"], 0.1);
    assert!(elapsed < Duration::from_secs(5), "{elapsed:?}");
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(model).unwrap()).unwrap();
    assert_eq!(saved["model"]["trees"].as_array().unwrap().len(), 35);
}

#[test]
fn train_preset_and_usage_errors() {
    let dir = TempDir::new().unwrap();
    let csv = synth_csv(&dir, "spatter_pv", 50.0);
    let text = stdout(&meltmap(&["train", p(&csv), "--target", "spatter", "--family", "rf", "--preset"]));
    assert!(field(&text, "model").contains("random_forest"));

    let missing_family = meltmap(&["train", p(&csv), "--target", "spatter"]);
    assert_eq!(missing_family.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing_family.stderr).contains("--family"));

    let missing_depth = meltmap(&["train", p(&csv), "--target", "spatter", "--family", "rf", "--n-estimators", "3"]);
    assert_eq!(missing_depth.status.code(), Some(2));

    let lr_on_forest = meltmap(&[
        "train", p(&csv), "--target", "spatter", "--family", "rf", "--n-estimators", "3", "--max-depth", "2",
        "--lr", "0.5",
    ]);
    assert_eq!(lr_on_forest.status.code(), Some(2));
}

#[test]
fn correlate_is_symmetric_with_unit_diagonal() {
    let dir = TempDir::new().unwrap();
    let csv = synth_csv(&dir, "volume_pv", 1.0);
    let v: Value = serde_json::from_str(&stdout(&meltmap(&["correlate", p(&csv), "--json"]))).unwrap();
    let names = v["correlation"]["names"].as_array().unwrap();
    assert_eq!(names.len(), 3);
    let k = names.len();
    let m: Vec<f64> = v["correlation"]["matrix"]["data"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for i in 0..k {
        assert_eq!(m[i * k + i], 1.0);
        for j in 0..k {
            assert_eq!(m[i * k + j], m[j * k + i]);
        }
    }
    let table = stdout(&meltmap(&["correlate", p(&csv)]));
    assert_eq!(table.lines().count(), k + 1);
}

#[test]
fn importance_table_for_depth() {
    let v: Value = serde_json::from_str(&stdout(&meltmap(&["importance", "--zoo", "depth_pv", "--json"]))).unwrap();
    let entries = v["entries"].as_array().unwrap();
    let pct: Vec<f64> = entries.iter().map(|e| e["percent"].as_f64().unwrap()).collect();
    assert!((pct.iter().sum::<f64>() - 100.0).abs() < 1e-9);
    assert!(pct.windows(2).all(|w| w[0] >= w[1]));
    assert!(entries[0]["exponents"][0].as_u64().unwrap() > 0);
    let table = stdout(&meltmap(&["importance", "--zoo", "depth_pv"]));
    assert_eq!(table.lines().count(), 6);
}

#[test]
fn sweep_limits_exit_2() {
    let o = meltmap(&["sweep", "--resolution", "513"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("too large"));
    let o = meltmap(&["sweep", "--power", "500:50"]);
    assert_eq!(o.status.code(), Some(2));
}

/// Starts `meltmap serve` and returns the child with its bound address.
fn spawn_server(args: &[&str], env: &[(&str, &str)]) -> (std::process::Child, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_meltmap"));
    cmd.arg("serve").args(args).stderr(Stdio::piped()).stdout(Stdio::null());
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().unwrap();
    let mut line = String::new();
    BufReader::new(child.stderr.take().unwrap()).read_line(&mut line).unwrap();
    let addr = line.trim().strip_prefix("listening on http://").unwrap_or_else(|| panic!("{line}")).to_string();
    (child, addr)
}

fn http_get(addr: &str, path: &str) -> String {
    let mut s = TcpStream::connect(addr).unwrap();
    write!(s, "GET {path} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n").unwrap();
    let mut out = String::new();
    s.read_to_string(&mut out).unwrap();
    out
}

#[test]
fn serve_binds_from_env_and_flags_win() {
    let (mut child, addr) = spawn_server(&[], &[("MELTMAP_HOST", "127.0.0.1"), ("MELTMAP_PORT", "0")]);
    let resp = http_get(&addr, "/models");
    child.kill().unwrap();
    assert!(resp.starts_with("HTTP/1.1 200"), "{resp}");
    assert!(resp.contains("depth_pv"));

    // The env port is unusable; the flag overrides it.
    let (mut child, addr) = spawn_server(&["--port", "0"], &[("MELTMAP_PORT", "not-a-port")]);
    let resp = http_get(&addr, "/equations/depth_pv");
    child.kill().unwrap();
    assert!(resp.starts_with("HTTP/1.1 200"), "{resp}");
}
