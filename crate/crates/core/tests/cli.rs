use std::path::Path;
use std::process::{Command, Output};

fn multimatch(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multimatch"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn sample_match_analyze_verify_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = multimatch(&["sample", "--n", "150", "--law", "const:2", "--seed", "3", "--out", "config.txt"], d);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let config = std::fs::read_to_string(d.join("config.txt")).unwrap();
    assert!(config.starts_with("geometry cycle 300.0\nmode two\n"));
    assert_eq!(config.lines().count(), 2 + 300);

    let o = multimatch(&["match", "--input", "config.txt", "--engine", "rounds", "--out", "edges.txt"], d);
    assert!(o.status.success());
    let rounds = std::fs::read_to_string(d.join("edges.txt")).unwrap();
    assert!(rounds.lines().count() > 250);
    assert!(rounds.lines().all(|l| l.split(' ').count() == 4 && !l.contains(" - ")));

    let o = multimatch(&["match", "--input", "config.txt", "--format", "json"], d);
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["edges"].as_array().unwrap().len(), rounds.lines().count());

    let o = multimatch(&["analyze", "--input", "config.txt", "--matching", "edges.txt"], d);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert!(csv.starts_with("component_id,size,red,blue\n"));
    let total: usize = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(total, 300);

    let o = multimatch(&["analyze", "--input", "config.txt", "--report", "roles"], d);
    assert!(stdout(&o).starts_with("role,count\nbird,"));
    let o = multimatch(
        &["analyze", "--input", "config.txt", "--report", "desire", "--windows", "5,50", "--color", "blue"],
        d,
    );
    assert!(stdout(&o).starts_with("window,count\n5,"));

    let o = multimatch(&["verify", "--input", "config.txt", "--format", "json"], d);
    assert!(o.status.success());
    let reports: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(reports.as_array().unwrap().iter().all(|r| r["pass"].is_boolean() && r["witnesses"].is_array()));
}

#[test]
fn random_verify_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = multimatch(&["verify", "--n", "200", "--instances", "50", "--seed", "7"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("stability[greedy],50,0,"));
}

#[test]
fn table1_has_eight_rows_and_replicate_dump() {
    let dir = tempfile::tempdir().unwrap();
    let o = multimatch(
        &["table1", "--sizes", "300", "--replicates", "3", "--seed", "42", "--out", "t1.csv", "--reps-out", "reps.csv"],
        dir.path(),
    );
    assert!(o.status.success());
    let agg = std::fs::read_to_string(dir.path().join("t1.csv")).unwrap();
    assert_eq!(agg.lines().next(), Some("row_label,size,mean,std,paper_mean,paper_std,verdict"));
    assert_eq!(agg.lines().count(), 9);
    let reps = std::fs::read_to_string(dir.path().join("reps.csv")).unwrap();
    assert_eq!(reps.lines().count(), 1 + 8 * 3);
    // The aggregate is recomputable from the replicate rows.
    let first: Vec<f64> = reps
        .lines()
        .skip(1)
        .filter(|l| l.starts_with("2,"))
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    let mean = first.iter().sum::<f64>() / first.len() as f64;
    assert!(agg.lines().nth(1).unwrap().starts_with(&format!("2,300,{mean:.4},")));
}

#[test]
fn experiment_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("exp.txt"),
        "name = small\ngeometry = line\nhalfwidth = 200\nlaw = const:3\nreplicates = 3\nseed = 9\nout = runs.csv\n",
    )
    .unwrap();
    let o = multimatch(&["run", "--spec", "exp.txt"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let runs = std::fs::read_to_string(dir.path().join("runs.csv")).unwrap();
    assert_eq!(runs.lines().filter(|l| l.starts_with("small,")).count(), 3);
}

#[test]
fn desire_growth_and_contrast_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = multimatch(&["desire-growth", "--windows", "10,20", "--seeds", "3"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 3);
    let o = multimatch(&["contrast", "--sizes", "200", "--replicates", "2", "--format", "json"], dir.path());
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows[0]["n"], 200);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = multimatch(&["table1", "--sizez", "5000"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--sizez"));
    let o = multimatch(&["sample", "--law", "two:3:2:0.5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--law"));
    let o = multimatch(&[], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn io_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = multimatch(&["match", "--input", "missing.txt"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.txt"));
}
