use std::path::Path;
use std::process::{Command, Output};

fn nogaps(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nogaps"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn config(experiment: &str, sd: f64, extra: &str) -> String {
    format!(
        r#"
experiment = "{experiment}"
trials = 8
base_seed = 11
output_path = "out/run"
[ensemble]
n_rows = 10
n_cols = 10
entry_dist = {{ kind = "gaussian", mean = 0.0, sd = {sd:e} }}
[parameters]
epsilon = 0.2
{extra}
"#
    )
}

#[test]
fn run_writes_reports_and_summarize_reads_them() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("smin.toml"), config("smin", 1.0, "tau_grid = [0.01, 0.1]")).unwrap();
    let out = nogaps(&["run", "smin.toml"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for ext in ["jsonl", "csv", "meta.toml"] {
        assert!(dir.path().join(format!("out/run.{ext}")).exists(), "missing {ext}");
    }

    let out = nogaps(
        &["summarize", "out/run.jsonl", "--metric", "smin_scaled", "--thresholds", "0.01,10", "--flag", "boundedness_held"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let stats: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(stats["n"], 8);
    assert_eq!(stats["threshold_grid"].as_array().unwrap().len(), 2);
}

#[test]
fn output_flag_overrides_config_path() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.toml"), config("smin", 1.0, "")).unwrap();
    let out = nogaps(&["run", "c.toml", "--output", "elsewhere/x"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("elsewhere/x.jsonl").exists());
}

#[test]
fn config_errors_exit_2_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let missing_eps = config("smin", 1.0, "").replace("epsilon = 0.2", "");
    std::fs::write(dir.path().join("bad.toml"), missing_eps).unwrap();
    let out = nogaps(&["run", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parameters.epsilon"));

    let out = nogaps(&["run", "does_not_exist.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn too_many_failed_trials_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    // Entries this large overflow the singular value computation.
    std::fs::write(dir.path().join("inf.toml"), config("smin", 1e300, "")).unwrap();
    let out = nogaps(&["run", "inf.toml"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stdout));
    let jsonl = std::fs::read_to_string(dir.path().join("out/run.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 8);
    assert!(jsonl.contains("\"error\""));
}

#[test]
fn audit_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = nogaps(&["audit", "--suite", "all", "--instances", "10", "--seed", "4"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 5);

    let out = nogaps(&["audit", "--suite", "nonsense"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn lcd_and_net_print_json() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("v.txt"), "[0.5, 0.5, 0.5, 0.5]").unwrap();
    let out = nogaps(&["lcd", "--vector", "v.txt", "--L", "0.5"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let est: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(est["value"].as_f64().unwrap() > 0.0);

    let out = nogaps(&["net", "--M", "2", "--n", "16", "--delta", "0.1", "--probes", "2000"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let net: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(net["covering_failures"], 0);
    assert!(net["cardinality"].as_f64().unwrap() <= net["cardinality_limit"].as_f64().unwrap());
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = nogaps::harness::ExperimentConfig::from_path(&path).unwrap();
            cfg.validate().unwrap();
            seen += 1;
        }
    }
    assert_eq!(seen, 6);
}
