use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_contact-reduce");

fn cli(args: &[&str], dir: &Path) -> Output {
    Command::new(BIN).args(args).current_dir(dir).output().expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn list_shows_registry() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["list"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for id in ["E1", "E2", "S3", "S5-T2", "S5-T3", "SL2-bookkeeping"] {
        assert!(text.contains(id), "{id} missing from:\n{text}");
    }
}

#[test]
fn e1_albert_is_the_circle() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["run", "E1", "--mu", "1", "--checks", "albert", "--samples", "20"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = json(&dir.path().join("E1-report.json"));
    assert_eq!(r["albert"]["albert_quotient_dim"], 1);
    assert_eq!(r["albert"]["level_dim"], 1);
}

#[test]
fn e2_albert_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["run", "E2", "--checks", "albert", "--samples", "20", "--out", "e2.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = json(&dir.path().join("e2.json"));
    assert_eq!(r["albert"]["albert_quotient_dim"], 3);
    assert!(r["albert"]["witness_residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn config_file_run() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.toml"),
        r#"
scenario = "S5-T2"
samples = 30
seed = 4
out = "s5.json"
[mu]
coords = ["2", "1"]
[checks]
enabled = ["hypotheses", "transversality", "reduced_kernel"]
"#,
    )
    .unwrap();
    let out = cli(&["run", "--config", "run.toml"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = json(&dir.path().join("s5.json"));
    assert_eq!(r["quotient_dim"], 3);
    assert_eq!(r["reduced_kernel_ok"], true);
    assert_eq!(r["seed"], 4);
}

#[test]
fn sl2_fails_with_named_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["run", "SL2-bookkeeping", "--checks", "hypotheses,transversality"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("does not span g"), "{text}");
    assert!(text.contains("even"), "{text}");
    let r = json(&dir.path().join("SL2-bookkeeping-report.json"));
    assert_eq!(r["quotient_dim"], 4);
}

#[test]
fn omitted_checks_run_the_scenario_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["run", "SL2-bookkeeping"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let r = json(&dir.path().join("SL2-bookkeeping-report.json"));
    assert_eq!(r["checks"], serde_json::json!(["hypotheses", "transversality", "gs"]));
    let out = cli(&["run", "S3", "--samples", "10", "--out", "s3.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = json(&dir.path().join("s3.json"));
    assert_eq!(r["checks"].as_array().unwrap().len(), 7);
}

#[test]
fn empty_check_set_is_a_no_op() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["run", "E2", "--checks", "", "--out", "noop.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = json(&dir.path().join("noop.json"));
    assert_eq!(r["checks"], serde_json::json!([]));
    assert_eq!(r["failures"], serde_json::json!([]));
    assert!(r["samples_accepted"].is_null());
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cli(&["run", "E1", "--mu", "1,2"], dir.path()).status.code(), Some(2));
    assert_eq!(cli(&["run", "nope"], dir.path()).status.code(), Some(2));
    assert_eq!(cli(&["run", "E1", "--checks", "albert,bogus"], dir.path()).status.code(), Some(2));
    assert_eq!(cli(&["run", "E1", "--samples", "0"], dir.path()).status.code(), Some(2));
    assert_eq!(cli(&["frobnicate"], dir.path()).status.code(), Some(2));
}

#[test]
fn corrupted_catalog_is_rejected_at_load() {
    let dir = tempfile::tempdir().unwrap();
    let good = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/lie_catalog.toml")).unwrap();
    let bad = good.replace(
        r#"{ left = "E", right = "F", result = [["1", "H"]] }"#,
        r#"{ left = "E", right = "F", result = [["1", "H"], ["1", "E"]] }"#,
    );
    assert_ne!(good, bad);
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, bad).unwrap();
    let out = cli(&["--catalog", path.to_str().unwrap(), "check-all"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("Jacobi"), "{err}");
}

#[test]
fn reports_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str| {
        vec![
            "run".to_string(),
            "E2".into(),
            "--samples".into(),
            "30".into(),
            "--seed".into(),
            "9".into(),
            "--checks".into(),
            "transversality,reduced_kernel,strata,albert".into(),
            "--out".into(),
            out.into(),
        ]
    };
    for (threads, out) in [("1", "a.json"), ("4", "b.json"), ("4", "c.json")] {
        let out = Command::new(BIN)
            .args(args(out))
            .env("RAYON_NUM_THREADS", threads)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.json")).unwrap());
    assert_eq!(a, std::fs::read(dir.path().join("c.json")).unwrap());
}

#[test]
fn check_all_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["check-all", "--out", "all.json"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 11);
    let r = json(&dir.path().join("all.json"));
    assert_eq!(r["criteria"].as_array().unwrap().len(), 11);
}
