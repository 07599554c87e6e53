// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const STROB: &str = r#"
eta = 0.95

[pulse]
beta_bar = 1.0
tau = 1.0

[[cavities]]
kappa = 200.0
delta = 40.0
g = 2.0

[[cavities]]
kappa = 200.0
delta = 40.0
g = 2.0

[[signals]]
variant = "continuous_harmonic"
params = { amplitude = 1.0, omega_m = 0.01 }

[[signals]]
variant = "continuous_harmonic"
params = { amplitude = 1.0, omega_m = 0.01 }
"#;

fn cascade(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cascade"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

#[test]
fn simulate_auto_resolves_stroboscopic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", STROB);
    let out = cascade(dir.path(), &["--config", &cfg, "--out", "run", "simulate"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sol = json(&dir.path().join("run/solution.json"));
    assert_eq!(sol["solution"]["method"], "strob-weak");
    assert_eq!(sol["requested_method"], "auto");
    let manifest = json(&dir.path().join("run/manifest.json"));
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    let outputs: Vec<&str> = manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(outputs.len(), 2);
    for o in outputs {
        assert!(dir.path().join(o).exists(), "{o}");
    }
}

#[test]
fn direct_method_writes_oracle_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", STROB);
    let out = cascade(
        dir.path(),
        &["--config", &cfg, "--out", "run", "--method", "direct", "simulate"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sol = json(&dir.path().join("run/solution.json"));
    assert_eq!(sol["solution"]["method"], "direct");
    let csv = fs::read_to_string(dir.path().join("run/spectrum.csv")).unwrap();
    assert!(csv.lines().count() > 100);
}

#[test]
fn malformed_config_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", &STROB.replacen("kappa", "kapa", 1));
    let out = cascade(dir.path(), &["--config", &cfg, "simulate"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["key"], "cavities[0].kapa");
    assert_eq!(err["error"]["kind"], "config");

    let out = cascade(dir.path(), &["--config", &cfg, "--method", "fast", "simulate"]);
    assert_eq!(out.status.code(), Some(2));
    let good = write_config(dir.path(), "c.toml", STROB);
    let out = cascade(dir.path(), &["--config", &good, "sweep", "--param", "speed=1,2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numeric_failure_exits_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    let coarse = format!("{STROB}\n[grid]\nkappa_dt = 0.2\n");
    let cfg = write_config(dir.path(), "c.toml", &coarse);
    let out = cascade(dir.path(), &["--config", &cfg, "--method", "direct", "simulate"]);
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "numeric");
}

#[test]
fn outputs_are_deterministic_and_hash_tracks_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", STROB);
    let args = ["sweep", "--param", "eta=1,0.9", "--param", "N=1..4"];
    for run in ["a", "b"] {
        let mut full = vec!["--config", cfg.as_str(), "--out", run];
        full.extend(args);
        assert!(cascade(dir.path(), &full).status.success());
    }
    let a = fs::read(dir.path().join("a/sweep.csv")).unwrap();
    let b = fs::read(dir.path().join("b/sweep.csv")).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert!(text.starts_with("eta,N,g,kappa,delta,tau,regime,ratio,snr_bound,qfi"));
    assert!(dir.path().join("a/nopt.csv").exists());
    let ha = json(&dir.path().join("a/manifest.json"))["config_hash"].clone();
    let hb = json(&dir.path().join("b/manifest.json"))["config_hash"].clone();
    assert_eq!(ha, hb);

    let changed = write_config(dir.path(), "d.toml", &STROB.replacen("g = 2.0", "g = 2.5", 1));
    let mut full = vec!["--config", changed.as_str(), "--out", "c"];
    full.extend(args);
    assert!(cascade(dir.path(), &full).status.success());
    let hc = json(&dir.path().join("c/manifest.json"))["config_hash"].clone();
    assert_ne!(ha, hc);

    let explicit = write_config(
        dir.path(),
        "e.toml",
        &format!("{STROB}\n[solver]\nmemory_cutoff = 40.0\n"),
    );
    let mut full = vec!["--config", explicit.as_str(), "--out", "e"];
    full.extend(args);
    assert!(cascade(dir.path(), &full).status.success());
    let he = json(&dir.path().join("e/manifest.json"))["config_hash"].clone();
    assert_eq!(ha, he);
}

#[test]
fn compare_thermal_nopt_and_app() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", STROB);
    let out = cascade(dir.path(), &["--config", &cfg, "--out", "cmp", "compare"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = fs::read_to_string(dir.path().join("cmp/compare.csv")).unwrap();
    assert_eq!(table.lines().count(), 6);

    let out = cascade(dir.path(), &["--config", &cfg, "--out", "th", "thermal", "--temperature", "1"]);
    assert_eq!(out.status.code(), Some(2), "two cavities are rejected");

    let out = cascade(dir.path(), &["--out", "n", "nopt", "--eta", "0.9,0.99"]);
    assert!(out.status.success());
    let rows = json(&dir.path().join("n/nopt.json"));
    assert_eq!(rows[0]["n_opt"], 9);

    let out = cascade(dir.path(), &["--out", "app", "app", "--preset", "dm"]);
    assert!(out.status.success());
    let r = json(&dir.path().join("app/app.json"));
    assert!(r["result"]["q_amplitude"].as_f64().unwrap() > 0.0);
    let out = cascade(dir.path(), &["--config", &cfg, "--out", "app2", "app", "--preset", "lhc"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&dir.path().join("app2/app.json"));
    assert!(r["metrology"]["snr_bound"].as_f64().unwrap() > 0.0);
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            cascade_core::config::RunConfig::from_path(&path)
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            count += 1;
        }
    }
    assert!(count >= 4);
}
