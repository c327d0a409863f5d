//! End-to-end runs of the `cb` binary.

use std::path::Path;
use std::process::{Command, Output};

use causal_bounds::bounds::BoundReport;
use causal_bounds::cli::RunManifest;
use causal_bounds::model::EffectEstimate;
use serde_json::Value;
use tempfile::TempDir;

fn cb(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cb"))
        .args(args)
        .current_dir(cwd)
        .env("RUST_LOG", "error")
        .env_remove("CB_SEED")
        .env_remove("CB_OUT")
        .env_remove("CB_TIMESTAMP")
        .output()
        .expect("cb runs")
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = cb(args, cwd);
    assert!(out.status.success(), "cb {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path).unwrap()
}

fn error_of(out: &Output) -> Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().find(|l| l.starts_with("{\"error\"")).expect("structured error on stderr");
    serde_json::from_str(line).unwrap()
}

/// Simulates into `name` under `dir` from a JSON config string.
fn simulate(dir: &Path, name: &str, config: &str, seed: &str) {
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, config).unwrap();
    ok(&["--seed", seed, "--out", name, "simulate", "--config", path.to_str().unwrap()], dir);
}

#[test]
fn simulate_supp_e_writes_truth_and_manifest() {
    let dir = TempDir::new().unwrap();
    ok(&["--seed", "7", "--out", "a", "simulate", "--preset", "supp-e"], dir.path());
    ok(&["--seed", "7", "--out", "b", "simulate", "--preset", "supp-e"], dir.path());
    assert_eq!(read(dir.path().join("a/ground_truth.json")), "{\"ace\":1.0}");
    let data = read(dir.path().join("a/data.csv"));
    assert!(data.starts_with("w_0,t,y\n"));
    assert_eq!(data.lines().count(), 10_001);
    assert_eq!(data, read(dir.path().join("b/data.csv")));
    let manifest = RunManifest::read(&dir.path().join("a")).unwrap();
    assert_eq!(manifest.command, "simulate");
    assert_eq!(manifest.seeds, vec![7]);
    assert_eq!(manifest.outputs, vec!["data.csv", "ground_truth.json", "config.json"]);
}

#[test]
fn missing_config_names_the_path() {
    let dir = TempDir::new().unwrap();
    let out = cb(&["--out", "o", "simulate", "--config", "no/such/config.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(error_of(&out)["error"]["message"].as_str().unwrap().contains("no/such/config.json"));
}

#[test]
fn out_of_range_eta_is_rejected() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("c.json"), r#"{"preset":"supp-e","eta":0.7}"#).unwrap();
    let out = cb(&["--out", "o", "simulate", "--config", "c.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let message = error_of(&out)["error"]["message"].as_str().unwrap().to_string();
    assert!(message.contains("eta") && message.contains("0.7"), "{message}");
    assert!(!dir.path().join("o").exists());
}

#[test]
fn ipw_on_randomized_data_matches_truth() {
    let dir = TempDir::new().unwrap();
    simulate(dir.path(), "r", r#"{"preset":"sec6","psi":[0,0,0,0,0],"n":20000}"#, "5");
    let truth: Value = serde_json::from_str(&read(dir.path().join("r/ground_truth.json"))).unwrap();
    let stdout = ok(&["estimate", "--data", "r/data.csv", "--estimator", "ipw"], dir.path());
    let estimate: EffectEstimate = serde_json::from_str(&stdout).unwrap();
    assert_eq!(estimate.estimator, "ipw");
    assert_eq!(estimate.n_treated + estimate.n_control, 20_000);
    // Binary outcomes: the standard error at this size is about 0.015.
    assert!((estimate.value - truth["ace"].as_f64().unwrap()).abs() < 0.05, "{stdout}");
}

#[test]
fn clipped_ipw_needs_rho() {
    let dir = TempDir::new().unwrap();
    simulate(dir.path(), "s", r#"{"preset":"sec6","n":500}"#, "1");
    let out = cb(&["estimate", "--data", "s/data.csv", "--estimator", "clipped-ipw"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--rho"));
    let stdout = ok(
        &[
            "estimate",
            "--data",
            "s/data.csv",
            "--estimator",
            "clipped-ipw",
            "--rho",
            "0.05",
            "--propensity",
            "logistic",
        ],
        dir.path(),
    );
    let estimate: EffectEstimate = serde_json::from_str(&stdout).unwrap();
    assert_eq!(estimate.clip, Some(0.05));
}

#[test]
fn robust_ipw_on_contaminated_data() {
    let dir = TempDir::new().unwrap();
    simulate(dir.path(), "e", r#"{"preset":"supp-e","eta":0.05}"#, "3");
    let args = ["estimate", "--data", "e/data.csv", "--estimator", "robust-ipw", "--eta", "0.05", "--sigma", "0.5"];
    let estimate: EffectEstimate = serde_json::from_str(&ok(&args, dir.path())).unwrap();
    assert_eq!(estimate.estimator, "robust-ipw");
    assert!((estimate.value - 1.0).abs() < 0.2, "{}", estimate.value);
    let out = cb(&["estimate", "--data", "e/data.csv", "--estimator", "robust-ipw"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bound_pipelines() {
    let dir = TempDir::new().unwrap();
    simulate(dir.path(), "s", r#"{"preset":"sec6"}"#, "2");
    let run = |extra: &[&str]| -> BoundReport {
        let mut args = vec!["bound", "--data", "s/data.csv", "--propensity", "logistic"];
        args.extend_from_slice(extra);
        serde_json::from_str(&ok(&args, dir.path())).unwrap()
    };
    let ipw = run(&[]);
    let clipped = run(&["--beta", "clipped-ipw", "--clip", "0.2"]);
    let uniform = run(&["--beta", "uniform"]);
    for r in [&ipw, &clipped, &uniform] {
        assert!((r.total - (r.wld_t1.abs() + r.wld_t0.abs() + r.vr_t1 + r.vr_t0)).abs() < 1e-12);
        assert_eq!((r.p, r.rho, r.n), (0.95, 0.01, 2000));
    }
    assert!(uniform.wld_t1.abs() + uniform.wld_t0.abs() > ipw.wld_t1.abs() + ipw.wld_t0.abs());
    let robust = run(&["--eta", "0.05", "--sigma", "1"]);
    let gamma = robust.gamma.expect("robust bound records gamma");
    assert!((robust.vr_t1 - ipw.vr_t1 - gamma).abs() < 1e-12);

    ok(&["--out", "b", "--format", "csv", "bound", "--data", "s/data.csv", "--beta", "uniform"], dir.path());
    assert!(read(dir.path().join("b/bound.csv")).starts_with("wld_t1,wld_t0,vr_t1,vr_t0,total,p,rho,n"));
    assert_eq!(RunManifest::read(&dir.path().join("b")).unwrap().outputs, vec!["bound.csv"]);
}

#[test]
fn tune_clip_pipeline() {
    let dir = TempDir::new().unwrap();
    simulate(dir.path(), "c", r#"{"preset":"clip-tune","n":1000}"#, "4");
    ok(&["--out", "t", "tune-clip", "--data", "c/data.csv", "--rhos", "0.01,0.1,0.3"], dir.path());
    let csv = read(dir.path().join("t/tune.csv"));
    assert!(csv.starts_with("rho,total\n"));
    assert_eq!(csv.lines().count(), 4);
    let best: Value = serde_json::from_str(&read(dir.path().join("t/best_rho.json"))).unwrap();
    let best = best["best_rho"].as_f64().unwrap();
    assert!([0.01, 0.1, 0.3].contains(&best));
    let reports: Vec<BoundReport> = serde_json::from_str(&read(dir.path().join("t/reports.json"))).unwrap();
    // Reports follow candidate order; each carries the reference threshold.
    let smallest = reports.iter().map(|r| r.total).fold(f64::INFINITY, f64::min);
    let argmin = reports.iter().position(|r| r.total == smallest).unwrap();
    assert_eq!([0.01, 0.1, 0.3][argmin], best);
    assert!(reports.iter().all(|r| r.rho == 0.01));
}

#[test]
fn reproduce_fig3_marks_one_argmin_per_curve() {
    let dir = TempDir::new().unwrap();
    ok(&["--out", "f", "reproduce", "fig3", "--seeds", "2"], dir.path());
    let csv = read(dir.path().join("f/fig3.csv"));
    assert!(csv.starts_with("n,replicate,seed,rho,total,argmin\n"));
    assert_eq!(csv.lines().filter(|l| l.ends_with(",1")).count(), 4 * 2);
}

#[test]
fn reproduce_fig2_bound_covers_error() {
    let dir = TempDir::new().unwrap();
    ok(&["--out", "f", "reproduce", "fig2", "--seeds", "5"], dir.path());
    let mut reader = csv::Reader::from_path(dir.path().join("f/fig2.csv")).unwrap();
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (error, bound) = (col("abs_error"), col("bound"));
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3 * 3 * 5);
    let covered = rows.iter().filter(|r| r[error].parse::<f64>().unwrap() <= r[bound].parse::<f64>().unwrap()).count();
    assert!(covered as f64 >= 0.9 * rows.len() as f64, "{covered}/{}", rows.len());
}

#[test]
fn unknown_experiment_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = cb(&["--out", "x", "reproduce", "fig9"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(error_of(&out)["error"]["message"].as_str().unwrap().contains("fig9"));
}
