//! End-to-end tests of the `tvd` binary: flag handling, exit codes, file
//! outputs, and determinism.

use std::path::Path;
use std::process::{Command, Output};

fn tvd(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tvd"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn simulate_fixture(dir: &Path, n: usize, seed: u64) -> std::path::PathBuf {
    let out = dir.join("counts.csv");
    let status = tvd(
        &[
            "simulate",
            "--beta0",
            "3",
            "--beta1",
            "0.3",
            "--beta2",
            "0.15",
            "--alpha0",
            "0.1",
            "--alpha1",
            "0.2",
            "--alpha2",
            "0.3",
            "--n",
            &n.to_string(),
            "--seed",
            &seed.to_string(),
            "--out",
            out.to_str().unwrap(),
        ],
        dir,
    );
    assert!(status.status.success(), "simulate failed: {status:?}");
    out
}

#[test]
fn simulate_writes_deterministic_files() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "simulate", "--beta0", "15", "--beta1", "0.2", "--beta2", "0.25", "--alpha0", "0.5",
        "--alpha1", "0.1", "--alpha2", "0.3", "--n", "500", "--seed", "7", "--out", "a.csv",
    ];
    let out = tvd(&args, dir.path());
    assert!(out.status.success());
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let latent = std::fs::read_to_string(dir.path().join("a_latent.csv")).unwrap();
    // 500 data rows + header + manifest comment
    assert_eq!(a.iter().filter(|&&b| b == b'\n').count(), 502);
    assert!(latent.lines().nth(1).unwrap().starts_with("t,count,lambda,phi"));

    let mut args2 = args;
    args2[18] = "b.csv";
    let out2 = tvd(&args2, dir.path());
    assert!(out2.status.success());
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b, "same flags and seed must give byte-identical output");
}

#[test]
fn simulate_iid_defaults_for_rates() {
    let dir = tempfile::tempdir().unwrap();
    let out = tvd(
        &[
            "simulate", "--beta0", "2", "--alpha0", "1", "--n", "100", "--seed", "1", "--out",
            "iid.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("iid.csv")).unwrap();
    assert_eq!(text.lines().count(), 102);
}

#[test]
fn simulate_burnin_discards_prefix() {
    let dir = tempfile::tempdir().unwrap();
    let out = tvd(
        &[
            "simulate", "--beta0", "2", "--alpha0", "1", "--beta1", "0.2", "--alpha1", "0.1",
            "--n", "50", "--burnin", "30", "--seed", "5", "--out", "burn.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let text = std::fs::read_to_string(dir.path().join("burn.csv")).unwrap();
    // still exactly n rows after discarding the burn-in prefix
    assert_eq!(text.lines().count(), 52);
}

#[test]
fn fit_emits_full_json() {
    let dir = tempfile::tempdir().unwrap();
    let counts = simulate_fixture(dir.path(), 400, 5);
    let out = tvd(
        &[
            "fit",
            "--input",
            counts.to_str().unwrap(),
            "--out",
            "fit.json",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fit.json")).unwrap())
            .unwrap();
    let est = doc["estimates"].as_object().unwrap();
    assert_eq!(est.len(), 6);
    assert!(doc["aic"].is_number() && doc["bic"].is_number());
    assert!(doc["manifest"]["input_digest"].is_string());
    // stdout carries the same document
    let stdout_doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc, stdout_doc);
}

#[test]
fn fit_ordinary_has_four_estimates() {
    let dir = tempfile::tempdir().unwrap();
    let counts = simulate_fixture(dir.path(), 300, 8);
    let out = tvd(
        &[
            "fit",
            "--input",
            counts.to_str().unwrap(),
            "--model",
            "ordinary",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["estimates"].as_object().unwrap().len(), 4);
    assert_eq!(doc["model"], "ordinary");
}

#[test]
fn malformed_csv_exits_2_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "count\n3\n7\nbanana\n5\n").unwrap();
    let out = tvd(&["fit", "--input", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "stderr: {err}");
}

#[test]
fn degenerate_data_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let constant = dir.path().join("constant.csv");
    std::fs::write(&constant, "5\n".repeat(60)).unwrap();
    let out = tvd(&["fit", "--input", constant.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn test_subcommand_validates_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let counts = simulate_fixture(dir.path(), 120, 2);

    // B below the floor is a usage error
    let out = tvd(
        &[
            "test",
            "--input",
            counts.to_str().unwrap(),
            "-B",
            "10",
            "--seed",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));

    let out = tvd(
        &[
            "test",
            "--input",
            counts.to_str().unwrap(),
            "-B",
            "19",
            "--seed",
            "1",
            "--threads",
            "2",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let p = doc["p_value"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p));
    assert!(doc["reject"].is_boolean());
    assert_eq!(doc["variant"], "restricted");
    // failed replicates are excluded from the statistic list
    let failed = doc["failed_replicates"].as_u64().unwrap() as usize;
    assert_eq!(doc["lr_replicates"].as_array().unwrap().len(), 19 - failed);
    assert!(failed <= 1, "unexpectedly many failed replicates: {failed}");
}

#[test]
fn forecast_boundary_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let counts = simulate_fixture(dir.path(), 60, 3);
    let out = tvd(
        &[
            "forecast",
            "--input",
            counts.to_str().unwrap(),
            "--n0",
            "59",
            "--point",
            "median",
            "--trace-out",
            "trace.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["predictions"], 1);
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    // manifest + header + 1 row
    assert_eq!(trace.lines().count(), 3);
    assert!(trace.lines().nth(1).unwrap().starts_with("t,y,yhat"));
}

#[test]
fn pit_masses_sum_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let counts = simulate_fixture(dir.path(), 250, 4);
    let out = tvd(
        &[
            "pit",
            "--input",
            counts.to_str().unwrap(),
            "--bins",
            "10",
            "--hist-out",
            "pit.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let masses: Vec<f64> = doc["bin_masses"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(masses.len(), 10);
    assert!((masses.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    let hist = std::fs::read_to_string(dir.path().join("pit.csv")).unwrap();
    assert_eq!(hist.lines().count(), 12);
}

#[test]
fn mc_estimation_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let out = tvd(
        &[
            "mc",
            "--experiment",
            "estimation",
            "--setting",
            "ii",
            "--n",
            "150",
            "--replications",
            "10",
            "--seed",
            "3",
            "--csv-out",
            "mc.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["summary"]["parameters"].as_array().unwrap().len(), 6);
    let csv = std::fs::read_to_string(dir.path().join("mc.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("parameter,truth"));
    assert_eq!(csv.lines().count(), 8);
}

#[test]
fn outputs_embed_manifest_and_reingest() {
    let dir = tempfile::tempdir().unwrap();
    let counts = simulate_fixture(dir.path(), 100, 11);
    let text = std::fs::read_to_string(&counts).unwrap();
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("# manifest: "));
    let manifest: serde_json::Value =
        serde_json::from_str(first.trim_start_matches("# manifest: ")).unwrap();
    assert_eq!(manifest["subcommand"], "simulate");
    assert_eq!(manifest["seed"], 11);
    // the simulated file reads back in as fit input
    let out = tvd(
        &[
            "fit",
            "--input",
            counts.to_str().unwrap(),
            "--model",
            "ordinary",
        ],
        dir.path(),
    );
    assert!(out.status.success());
}
