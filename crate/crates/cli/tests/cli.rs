use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nfl_core::{RngStream, TableFunction};

fn nfl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nfl-evolve"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = nfl(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SMALL: [&str; 8] = ["--population", "4", "--generations", "1", "--runs", "6", "--meta-runs", "2"];

#[test]
fn self_pair_gp_summary_is_zero() {
    let mut args = vec!["evolve-gp", "--pair", "A1,A1", "--paired-seeds"];
    args.extend(SMALL);
    let out = ok(&args);
    assert!(out.contains("mean_fitness=0\n"), "{out}");
}

#[test]
fn table_artifacts_reload() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["evolve-table", "--pair", "B16,B16", "--paired-seeds", "--out", path(dir.path())];
    args.extend(SMALL);
    let out = ok(&args);
    assert!(out.contains("mean_fitness=0\n"));
    for m in 0..2 {
        let t = TableFunction::load(dir.path().join(format!("run_{m:03}.nflf"))).unwrap();
        assert_eq!(t.values().len(), 65536);
        let meta = fs::read_to_string(dir.path().join(format!("run_{m:03}.nflf.meta"))).unwrap();
        assert!(meta.contains("# pair=B16,B16\n"));
        assert!(meta.contains("# paired_seeds=true\n"));
    }
    let csv = fs::read_to_string(dir.path().join("fitness.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "meta_run,fitness,replacements");
    assert_eq!(rows.len(), 3);
}

#[test]
fn matrix_marks_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["matrix", "--algorithms", "B1,B8,B16", "--out", path(dir.path())];
    args.extend(SMALL);
    let table = ok(&args);
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 4);
    for (i, line) in lines[1..].iter().enumerate() {
        assert_eq!(line.split_whitespace().nth(i + 1), Some("-"));
    }
    let csv = fs::read_to_string(dir.path().join("matrix.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 7);
}

#[test]
fn landscape_rows_and_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let flat = dir.path().join("flat.nflf");
    TableFunction::constant(16, 8, 3).unwrap().save(&flat).unwrap();
    let rand = dir.path().join("rand.nflf");
    TableFunction::random(16, 8, &mut RngStream::new(1)).unwrap().save(&rand).unwrap();
    let csv = ok(&["landscape", path(&flat), path(&rand), "--random-baseline"]);
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "file,peaks,fraction");
    assert!(rows[1].ends_with(",0,0"));
    assert!(rows[3].starts_with("mean,"));
    assert!(rows[4].starts_with("iid_uniform_baseline,"));
}

#[test]
fn replay_constant_function() {
    let dir = tempfile::tempdir().unwrap();
    let flat = dir.path().join("zero.nflf");
    TableFunction::constant(16, 8, 0).unwrap().save(&flat).unwrap();
    let csv = ok(&["replay", path(&flat), "--algorithm", "B5", "--runs", "10"]);
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r.split(',').nth(1) == Some("0")));
    assert_eq!(csv, ok(&["replay", path(&flat), "--algorithm", "B5", "--runs", "10"]));
}

#[test]
fn replay_tree_file() {
    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("f.sexp");
    fs::write(&tree, "# comment\n(mul x x)\n").unwrap();
    let csv = ok(&["replay", path(&tree), "--algorithm", "A2", "--runs", "3"]);
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 4);
}

#[test]
fn evolved_winner_replays_with_same_sign() {
    // An evolved (B16, B1) table should still favour B16 on fresh seeds.
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "evolve-table", "--pair", "B16,B1", "--count-rejected", "--population", "6", "--generations", "2",
        "--runs", "40", "--meta-runs", "1", "--out", path(dir.path()),
    ]);
    let table = dir.path().join("run_000.nflf");
    let mean = |alg: &str| -> f64 {
        let csv = ok(&["replay", path(&table), "--algorithm", alg, "--runs", "400", "--count-rejected", "--seed", "77"]);
        let vals: Vec<f64> = csv
            .lines()
            .filter(|l| !l.starts_with('#'))
            .skip(1)
            .map(|r| r.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        vals.iter().sum::<f64>() / vals.len() as f64
    };
    let fitness: f64 = fs::read_to_string(dir.path().join("fitness.csv"))
        .unwrap()
        .lines()
        .last()
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    let replayed = mean("B16") - mean("B1");
    // Selection favours lucky duels, so only require the same sign when the
    // evolved advantage is clear.
    if fitness < -0.5 {
        assert!(replayed < 0.0, "evolved {fitness}, replayed {replayed}");
    }
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "pair = B2,B3\nruns = 5\nmeta_runs = 1\npopulation = 3\ngenerations = 1\nseed = 4\n").unwrap();
    let out = dir.path().join("o");
    ok(&["evolve-table", "--config", path(&cfg), "--seed", "6", "--out", path(&out)]);
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("# seed=6\n"));
    assert!(summary.contains("# pair=B2,B3\n"));
    assert!(summary.contains("# runs=5\n"));
    assert!(!summary.contains("out="));
}

#[test]
fn precondition_errors_exit_nonzero() {
    let unknown = nfl(&["evolve-table", "--pair", "B1,B99", "--meta-runs", "1"]);
    assert!(!unknown.status.success());
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("B99"));

    let missing = nfl(&["landscape", "/nonexistent/t.nflf"]);
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/nonexistent/t.nflf"));

    let no_pair = nfl(&["evolve-gp", "--meta-runs", "1"]);
    assert!(!no_pair.status.success());
    assert!(String::from_utf8_lossy(&no_pair.stderr).contains("pair"));

    let foreign = nfl(&["landscape", "x.nflf", "--max-depth", "3"]);
    assert!(!foreign.status.success());
}

#[test]
fn positive_fitness_is_not_an_error() {
    // (B16, B1) at tiny scale usually ends positive; still exit 0.
    let mut args = vec!["evolve-table", "--pair", "B16,B1"];
    args.extend(SMALL);
    ok(&args);
}
