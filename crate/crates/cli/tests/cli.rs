use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lsxgc(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lsxgc"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn simulate_writes_dataset_and_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |out: &str, jobs: &str| {
        let o = lsxgc(
            &["simulate", "--nodes", "15", "--realizations", "50", "--seed", "7", "--snr-db", "20", "--jobs", jobs, "--out", out],
            tmp.path(),
        );
        assert!(o.status.success(), "{}", stderr(&o));
    };
    run("a", "0");
    run("b", "1");
    let files = |d: &str| {
        let mut v: Vec<String> = fs::read_dir(tmp.path().join(d))
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        v.sort();
        v
    };
    assert_eq!(files("a").len(), 101);
    assert_eq!(files("a"), files("b"));
    for f in files("a") {
        assert_eq!(fs::read(tmp.path().join("a").join(&f)).unwrap(), fs::read(tmp.path().join("b").join(&f)).unwrap(), "{f}");
    }
    let manifest = read_json(&tmp.path().join("a/manifest.json"));
    assert_eq!(manifest["config"]["snr_db"], 20.0);
    assert_eq!(manifest["config"]["seed"], 7);
    assert_eq!(manifest["realizations"].as_array().unwrap().len(), 50);
}

fn small_dataset(dir: &Path) {
    let o = lsxgc(&["simulate", "--nodes", "8", "--realizations", "8", "--seed", "2", "--out", "d"], dir);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn analyze_writes_one_matrix_per_method() {
    let tmp = tempfile::tempdir().unwrap();
    small_dataset(tmp.path());
    let o = lsxgc(&["analyze", "--method", "lsxgc", "--p", "1", "--m", "2", "d/real_0_ts.csv", "--out", "one"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(tmp.path().join("one/lsxgc.csv")).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 8);
    assert!((0..8).all(|i| rows[i][i] == 0.0));

    let o = lsxgc(&["analyze", "--method", "all", "--format", "json", "d/real_0_ts.csv", "--out", "all"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    for m in ["lsxgc", "gc", "te", "mi"] {
        let v = read_json(&tmp.path().join(format!("all/{m}.json")));
        assert_eq!(v["method"], m);
        assert_eq!(v["scores"].as_array().unwrap().len(), 8);
    }
}

#[test]
fn estimator_failure_exits_with_code_two() {
    let tmp = tempfile::tempdir().unwrap();
    // 100 nodes × 50 samples, rows are time
    let mut csv = String::new();
    for t in 0..50u64 {
        let row: Vec<String> = (0..100u64)
            .map(|n| (((t * 7919 + n * 104_729) % 1000) as f64 / 1000.0).to_string())
            .collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    fs::write(tmp.path().join("wide.csv"), csv).unwrap();
    let o = lsxgc(&["analyze", "--method", "gc", "wide.csv"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("UnderdeterminedSystem"), "{}", stderr(&o));
}

#[test]
fn config_and_io_errors_exit_with_code_one() {
    let tmp = tempfile::tempdir().unwrap();
    let o = lsxgc(&["analyze", "missing.csv"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    fs::write(tmp.path().join("bad.json"), r#"{"analysis": {"lags": 3}}"#).unwrap();
    let o = lsxgc(&["analyze", "--config", "bad.json", "x.csv"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("lags"), "{}", stderr(&o));
    let o = lsxgc(&["analyze", "--method", "pcmci", "x.csv"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    let o = lsxgc(&["simulate", "--density", "1.5", "--out", "s"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    let o = lsxgc(&["frobnicate"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("c.json"),
        r#"{"simulation": {"n_nodes": 6, "n_realizations": 3, "seed": 11}, "out": "from_file"}"#,
    )
    .unwrap();
    let o = lsxgc(&["simulate", "--config", "c.json", "--nodes", "5"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = read_json(&tmp.path().join("from_file/manifest.json"));
    assert_eq!(manifest["config"]["n_nodes"], 5);
    assert_eq!(manifest["config"]["n_realizations"], 3);
    assert_eq!(manifest["config"]["seed"], 11);
}

#[test]
fn bench_reports_every_method_in_rank_order() {
    let tmp = tempfile::tempdir().unwrap();
    small_dataset(tmp.path());
    let o = lsxgc(&["bench", "--data", "d", "--out", "r"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let lines: Vec<String> = stdout(&o).lines().map(str::to_owned).collect();
    assert_eq!(lines.len(), 4);
    let medians: Vec<f64> = lines
        .iter()
        .map(|l| l.split_whitespace().nth(3).unwrap().parse().unwrap())
        .collect();
    assert!(medians.windows(2).all(|w| w[0] >= w[1]), "{lines:?}");

    let report = read_json(&tmp.path().join("r/report.json"));
    for other in ["gc", "te", "mi"] {
        assert!(report["wilcoxon_p"][format!("lsxgc_vs_{other}")].is_number());
    }
    assert_eq!(report["config"]["simulation"]["n_nodes"], 8);
    assert!(fs::read_to_string(tmp.path().join("r/report.txt")).unwrap().contains("AUROC"));
}

#[test]
fn bench_method_subset_and_rerun_from_recorded_config() {
    let tmp = tempfile::tempdir().unwrap();
    small_dataset(tmp.path());
    let o = lsxgc(&["bench", "--data", "d", "--methods", "lsxgc,gc", "--m", "3", "--out", "r1"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let first = read_json(&tmp.path().join("r1/report.json"));
    let names: Vec<&str> = first["methods"].as_array().unwrap().iter().map(|m| m["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["lsxgc", "gc"]);
    assert_eq!(first["wilcoxon_p"].as_object().unwrap().len(), 1);

    // rebuild the run from the report's own config block, simulating afresh
    let c = &first["config"];
    let cfg = serde_json::json!({"simulation": c["simulation"], "analysis": c["analysis"], "methods": c["methods"]});
    fs::write(tmp.path().join("again.json"), cfg.to_string()).unwrap();
    let o = lsxgc(&["bench", "--config", "again.json", "--out", "r2", "--jobs", "1"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let second = read_json(&tmp.path().join("r2/report.json"));
    for i in 0..2 {
        assert_eq!(first["methods"][i]["auroc"], second["methods"][i]["auroc"]);
    }
    assert_eq!(first["wilcoxon_p"], second["wilcoxon_p"]);
}
