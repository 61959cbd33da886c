use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use costbench::document::ResultsDocument;
use costbench_core::metrics::curve_area;
use costbench_core::runner::MetricKind;

fn costbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_costbench"))
        .args(args)
        .env("COSTBENCH_LOG", "error")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

const ROSTER_FIX: &str = r#"[{"name": "FIX", "learner": {"kind": "fix"}}]"#;

/// Two products in different projects, six defective instances each.
fn toy_workspace(dir: &Path, roster: &str) -> PathBuf {
    let data = dir.join("data");
    fs::create_dir_all(&data).unwrap();
    fs::write(
        data.join("manifest.json"),
        r#"{"name": "toy", "features": ["m1", "m2"], "products": [
            {"product_id": "one", "project_id": "a", "csv_path": "one.csv"},
            {"product_id": "two", "project_id": "b", "csv_path": "two.csv"}]}"#,
    )
    .unwrap();
    for (file, shift) in [("one.csv", 0u64), ("two.csv", 3)] {
        let mut csv = String::from("name,m1,m2,loc,defects\n");
        for i in 0..14u64 {
            let defects = if i % 2 == 0 && i < 12 { 1 + (i + shift) % 3 } else { 0 };
            csv.push_str(&format!(
                "C{i:02},{},{},{},{defects}\n",
                i + shift,
                (i * 7) % 5,
                10 + (i * 13 + shift) % 37
            ));
        }
        fs::write(data.join(file), csv).unwrap();
    }
    fs::write(dir.join("roster.json"), roster).unwrap();
    let manifest = dir.join("run.json");
    fs::write(
        &manifest,
        r#"{"datasets": ["data/manifest.json"], "roster": "roster.json", "output_dir": "out"}"#,
    )
    .unwrap();
    manifest
}

#[test]
fn fix_only_run_populates_every_table() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = toy_workspace(dir.path(), ROSTER_FIX);
    stdout(&costbench(&["run", manifest.to_str().unwrap()]));
    let results = dir.path().join("out/results.json");
    let doc = ResultsDocument::read(&results).unwrap();
    let ds = doc.dataset("toy").unwrap();
    assert_eq!(ds.tables.len(), 10);
    for table in &ds.tables {
        assert_eq!(table.approaches, ["FIX"]);
        assert_eq!(table.products, ["one", "two"]);
        if table.metric != MetricKind::Mcc {
            assert!(table.values[0].iter().all(Option::is_some), "{:?}", table.metric);
        }
    }
    for m in ["necm", "relb", "aucec"] {
        assert!(dir.path().join(format!("out/toy_{m}_defect_counts.csv")).exists());
        assert!(dir.path().join(format!("out/toy_{m}_binary.csv")).exists());
    }
    assert!(dir.path().join("out/ranking_toy_necm.csv").exists());
    assert!(dir.path().join("out/run.log").exists());

    let rank = stdout(&costbench(&[
        "rank",
        results.to_str().unwrap(),
        "--metric",
        "necm",
        "--dataset",
        "toy",
    ]));
    let lines: Vec<&str> = rank.lines().collect();
    assert_eq!(lines.len(), 1);
    assert!(lines[0].starts_with("FIX") && lines[0].ends_with("(1)"), "{rank}");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let roster = r#"[{"name": "FIX", "learner": {"kind": "fix"}},
                     {"name": "RANDOM", "learner": {"kind": "random"}, "randomized": true},
                     {"name": "NB", "treatment": {"kind": "watanabe"}, "learner": {"kind": "gaussian_naive_bayes"}}]"#;
    let manifest = toy_workspace(dir.path(), roster);
    stdout(&costbench(&["run", manifest.to_str().unwrap()]));
    let first = fs::read(dir.path().join("out/results.json")).unwrap();
    let first_log = fs::read(dir.path().join("out/run.log")).unwrap();
    stdout(&costbench(&["run", manifest.to_str().unwrap()]));
    assert_eq!(first, fs::read(dir.path().join("out/results.json")).unwrap());
    assert_eq!(first_log, fs::read(dir.path().join("out/run.log")).unwrap());
}

#[test]
fn missing_dataset_exits_3_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = toy_workspace(dir.path(), ROSTER_FIX);
    fs::remove_file(dir.path().join("data/two.csv")).unwrap();
    let out = costbench(&["run", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn malformed_dataset_row_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = toy_workspace(dir.path(), ROSTER_FIX);
    fs::write(dir.path().join("data/two.csv"), "name,m1,m2,loc,defects\nX,1,2,10,-1\n").unwrap();
    let out = costbench(&["run", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 2"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn invalid_manifests_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = toy_workspace(dir.path(), r#"[{"name": "X", "learner": {"kind": "svm"}}]"#);
    assert_eq!(costbench(&["run", manifest.to_str().unwrap()]).status.code(), Some(2));

    fs::write(dir.path().join("roster.json"), ROSTER_FIX).unwrap();
    fs::write(
        &manifest,
        r#"{"datasets": [], "roster": "roster.json", "output_dir": "out"}"#,
    )
    .unwrap();
    assert_eq!(costbench(&["run", manifest.to_str().unwrap()]).status.code(), Some(2));

    fs::write(
        &manifest,
        r#"{"datasets": ["data/manifest.json"], "roster": "roster.json", "output_dir": "out", "config": {"alpha": 2}}"#,
    )
    .unwrap();
    assert_eq!(costbench(&["run", manifest.to_str().unwrap()]).status.code(), Some(2));

    assert_eq!(costbench(&["run", "/nonexistent/run.json"]).status.code(), Some(2));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn report_commands() {
    let dir = tempfile::tempdir().unwrap();
    let roster = r#"[{"name": "FIX", "learner": {"kind": "fix"}},
                     {"name": "RANDOM", "learner": {"kind": "random"}, "randomized": true}]"#;
    let manifest = toy_workspace(dir.path(), roster);
    stdout(&costbench(&["run", manifest.to_str().unwrap()]));
    let results = dir.path().join("out/results.json");
    let r = results.to_str().unwrap();
    let doc = ResultsDocument::read(&results).unwrap();

    // every printed number is stored verbatim in the document
    let entry = doc.dataset("toy").unwrap().ranking(MetricKind::Relb).unwrap();
    let printed = stdout(&costbench(&["rank", r, "--metric", "relb", "--dataset", "toy"]));
    assert_eq!(printed.lines().count(), 2);
    for (line, row) in printed.lines().zip(&entry.rows) {
        assert_eq!(
            line,
            format!("{:<6}  {} ({})", row.approach, row.mean_display, row.rankscore_display)
        );
    }

    // curves integrate to the stored AUCEC cell
    let aucec = doc
        .dataset("toy")
        .unwrap()
        .tables
        .iter()
        .find(|t| t.metric == MetricKind::Aucec)
        .unwrap();
    for approach in ["FIX", "RANDOM"] {
        for product in ["one", "two"] {
            let csv = stdout(&costbench(&["curves", r, "--approach", approach, "--product", product]));
            let points: Vec<costbench_core::metrics::CurvePoint> = csv
                .lines()
                .skip(1)
                .map(|l| {
                    let (e, d) = l.split_once(',').unwrap();
                    costbench_core::metrics::CurvePoint {
                        effort: e.parse().unwrap(),
                        defects: d.parse().unwrap(),
                    }
                })
                .collect();
            assert_eq!(csv.lines().nth(1), Some("0,0"));
            assert_eq!(csv.lines().last(), Some("1,1"));
            let stored = aucec.get(approach, product).unwrap();
            assert!((curve_area(&points) - stored).abs() < 1e-12);
        }
    }

    let modes = stdout(&costbench(&["compare-modes", r]));
    assert_eq!(modes.lines().count(), 4);
    assert!(modes.lines().nth(1).unwrap().starts_with("toy"));

    let corr = stdout(&costbench(&[
        "correlate",
        r,
        "--set-a",
        "necm,relb",
        "--set-b",
        "aucec",
    ]));
    assert!(corr.lines().last().unwrap().starts_with("tau"));

    for bad in [
        vec!["rank", r, "--metric", "nope", "--dataset", "toy"],
        vec!["rank", r, "--metric", "necm", "--dataset", "nope"],
        vec!["curves", r, "--approach", "FIX", "--product", "three"],
        vec!["correlate", r, "--set-a", "necm", "--set-b", "bogus"],
    ] {
        assert_eq!(costbench(&bad).status.code(), Some(2), "{bad:?}");
    }
}
