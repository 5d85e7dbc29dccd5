use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn edamcc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edamcc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("exp.cfg");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const SMALL: &str = "problem = F2\nn = 6\nalgorithm = eda-mcc\npopulation_sizes = 20, 30\n\
                     runs = 2\nbudget_fes = 600\nc = 3\nm_corr = 10\n";

#[test]
fn run_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("res");
    let o = edamcc(&["run", &cfg, "--out", out.to_str().unwrap(), "--jobs", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_dir(out.join("records")).unwrap().count(), 4);
    assert_eq!(fs::read_dir(out.join("traces")).unwrap().count(), 4);
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.starts_with("algorithm,problem,n,pop_size"));
    assert_eq!(summary.lines().count(), 3);
    let timing = fs::read_to_string(out.join("timing.csv")).unwrap();
    assert!(timing.starts_with("algorithm,pop_size,run,phase,seconds"));
    assert!(String::from_utf8_lossy(&o.stdout).contains("(best)"));
}

#[test]
fn seed_flag_changes_results_and_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(edamcc(&["run", &cfg, "--out", a.to_str().unwrap(), "--seed", "1"]).status.success());
    assert!(edamcc(&["run", &cfg, "--out", b.to_str().unwrap(), "--seed", "2", "--format", "json"])
        .status
        .success());
    assert!(b.join("summary.json").exists());
    let text = fs::read_to_string(b.join("summary.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["cells"].as_array().unwrap().len(), 2);

    let o = edamcc(&["compare", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains(" vs "));
}

#[test]
fn sweep_and_characterize() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("res");
    let o = edamcc(&["sweep", &cfg, "--theta", "0.2,0.4", "--c", "2,3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let sweep = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 5);

    let o = edamcc(&["characterize", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let q = fs::read_to_string(out.join("q_matrix_M20.csv")).unwrap();
    assert_eq!(q.lines().count(), 6);
    assert!(out.join("strong_M30.csv").exists());
}

#[test]
fn diagnostics_have_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    let bad = write_config(dir.path(), "problem = F1\nn = 5\nalgorithm = umda\ngamma = 2\n");
    let o = edamcc(&["run", &bad]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("config") && err.contains("gamma"), "{err}");

    let o = edamcc(&["run", dir.path().join("missing.cfg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));

    let o = edamcc(&["compare", dir.path().to_str().unwrap(), dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));

    let o = edamcc(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));

    let umda = write_config(dir.path(), "problem = F1\nn = 5\nalgorithm = umda\nruns = 1\n");
    let o = edamcc(&["characterize", &umda, "--out", dir.path().join("x").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}
