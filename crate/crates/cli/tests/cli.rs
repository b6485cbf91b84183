use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lscr::bench::{Algo, BenchReport};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn lscr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lscr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn fixture_query(to: &str, extra: &[&str]) -> Output {
    let graph = data("fixture_a.tsv");
    let constraint = data("s0.q");
    let mut args = vec![
        "query",
        "--graph",
        graph.to_str().unwrap(),
        "--from",
        "v0",
        "--to",
        to,
        "--labels",
        "likes,follows",
        "--constraint",
        constraint.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    lscr(&args)
}

#[test]
fn query_exit_codes() {
    let yes = fixture_query("v4", &["--algo", "uis"]);
    assert_eq!(yes.status.code(), Some(0));
    assert!(stdout(&yes).starts_with("true\n"));

    let no = fixture_query("v3", &[]);
    assert_eq!(no.status.code(), Some(1));
    assert!(stdout(&no).starts_with("false\n"));

    let star = fixture_query("v4", &["--algo", "uis-star"]);
    assert_eq!(star.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_2() {
    let o = fixture_query("v4", &["--algo", "ins"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--index"));

    let o = fixture_query("nowhere", &[]);
    assert_eq!(o.status.code(), Some(2));

    let o = lscr(&["query", "--graph", "missing.tsv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ingest_summary() {
    let dir = tempfile::tempdir().unwrap();
    let canon = dir.path().join("canon.tsv");
    let o = lscr(&[
        "ingest",
        "--graph",
        data("fixture_a.tsv").to_str().unwrap(),
        "--out",
        canon.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("vertices=5\n"));
    assert!(out.contains("edges=8\n"));
    assert_eq!(std::fs::read_to_string(&canon).unwrap().lines().count(), 8);
}

#[test]
fn index_inspect_and_informed_query() {
    let dir = tempfile::tempdir().unwrap();
    let graph = data("fixture_a.tsv");
    let idx = dir.path().join("a.idx");
    let o = lscr(&[
        "index",
        "--graph",
        graph.to_str().unwrap(),
        "--k",
        "2",
        "--seed",
        "3",
        "--out",
        idx.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("landmarks=2\n"));

    let o = lscr(&["inspect", "--graph", graph.to_str().unwrap(), "--index", idx.to_str().unwrap()]);
    assert!(o.status.success());
    let report = stdout(&o);
    assert!(report.starts_with("landmarks=2 seed=3"));
    assert!(report.ends_with('\n'));
    // landmarks are listed by name
    assert_eq!(report.lines().filter(|l| l.trim_start().starts_with('v')).count(), 2);

    for (to, code) in [("v4", 0), ("v3", 1)] {
        let o = fixture_query(to, &["--algo", "ins", "--index", idx.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(code), "to {to}");
    }
}

#[test]
fn generate_and_bench() {
    let dir = tempfile::tempdir().unwrap();
    let path = |n: &str| dir.path().join(n).to_str().unwrap().to_owned();
    let o = lscr(&["gen", "graph", "--vertices", "1000", "--seed", "1", "--out", &path("g.tsv")]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("edges=3600"));

    let o = lscr(&[
        "gen", "queries", "--graph", &path("g.tsv"), "--true", "6", "--false", "6", "--seed", "1", "--out",
        &path("qs.tsv"),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("true=6 false=6"));
    assert!(dir.path().join("qs.q").exists());

    let o = lscr(&["index", "--graph", &path("g.tsv"), "--out", &path("g.idx")]);
    assert!(o.status.success());

    let o = lscr(&[
        "bench",
        "--graph",
        &path("g.tsv"),
        "--index",
        &path("g.idx"),
        "--queries",
        &path("qs.tsv"),
        "--parallel",
        "--out",
        &path("rows.txt"),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = BenchReport::parse_machine(&std::fs::read_to_string(path("rows.txt")).unwrap()).unwrap();
    assert_eq!(report.rows.len(), 36);
    assert_eq!(report.algos(), Algo::ALL.to_vec());
    assert!(report.disagreements().is_empty());
    assert_eq!(report.env.queries, 12);
    assert!(report.env.k.is_some());
}
