use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn magicsq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magicsq"))
        .args(args)
        .env_remove("MAGICSQ_WORKERS")
        .env_remove("MAGICSQ_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn json_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("valid json line")).collect()
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn count_assoc_order5() {
    let out = magicsq(&["--format", "json-lines", "count", "assoc", "--order", "5", "--mode", "raw"]);
    assert_eq!(out.status.code(), Some(0));
    let rec = &json_lines(&out)[0];
    assert_eq!(rec["raw_total"], 388_352);
    assert_eq!(rec["reduced_total"], 48_544);
    assert_eq!(rec["complete"], true);
}

#[test]
fn oracle_count_order3_magic() {
    let out = magicsq(&["--format", "tsv", "oracle", "count", "--order", "3", "--kind", "magic"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
    let values: Vec<&str> = lines.next().unwrap().split('\t').collect();
    let col = header.iter().position(|&h| h == "reduced_count").unwrap();
    assert_eq!(values[col], "1");
}

#[test]
fn semi_order4_matches_table() {
    let out = magicsq(&["--format", "json-lines", "count", "semi", "--order", "4", "--workers", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_lines(&out)[0]["reduced_total"], 68_688);
}

#[test]
fn aggregate_over_partial_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.ckpt");
    let b = dir.path().join("b.ckpt");
    for (ids, path) in [("1..300", &a), ("301..792", &b)] {
        let out = magicsq(&["count", "assoc", "--order", "5", "--ids", ids, "--checkpoint", path_arg(path)]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let out = magicsq(&["--format", "json-lines", "verify", "aggregate", path_arg(&a), path_arg(&b)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_lines(&out)[0]["reduced_total"], 48_544);

    let gap = magicsq(&["verify", "aggregate", path_arg(&a)]);
    assert_eq!(gap.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&gap.stderr).contains("301-792"));

    let dup = magicsq(&["verify", "aggregate", path_arg(&a), path_arg(&a), path_arg(&b)]);
    assert_eq!(dup.status.code(), Some(3));

    let report = magicsq(&["--format", "json-lines", "report", path_arg(&a), path_arg(&b), "--chunks", "3"]);
    assert_eq!(report.status.code(), Some(0));
    let rows: Vec<Value> = json_lines(&report).into_iter().filter(|r| r.get("raw").is_some()).collect();
    assert_eq!(rows.len(), 3);
    let raw: u64 = rows.iter().map(|r| r["raw"].as_u64().unwrap()).sum();
    assert_eq!(raw, 388_352);
}

#[test]
fn rerun_over_complete_checkpoint_changes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("c.ckpt");
    let args = ["count", "assoc", "--order", "5", "--ids", "1..50", "--checkpoint", path_arg(&cp)];
    assert_eq!(magicsq(&args).status.code(), Some(0));
    let before = std::fs::read_to_string(&cp).unwrap();
    let again = magicsq(&args);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&cp).unwrap(), before);
}

#[test]
fn checkpoint_from_another_workload_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("c.ckpt");
    assert_eq!(
        magicsq(&["count", "assoc", "--order", "5", "--ids", "1..5", "--checkpoint", path_arg(&cp)]).status.code(),
        Some(0)
    );
    let out = magicsq(&["count", "semi", "--order", "4", "--ids", "1..5", "--checkpoint", path_arg(&cp)]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exit_codes() {
    assert_eq!(magicsq(&["--help"]).status.code(), Some(0));
    assert_eq!(magicsq(&["count", "assoc", "--help"]).status.code(), Some(0));
    assert_eq!(magicsq(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(magicsq(&["count", "assoc", "--order", "5", "--mode", "sideways"]).status.code(), Some(1));
    assert_eq!(magicsq(&["count", "assoc", "--order", "5", "--ids", "700..900"]).status.code(), Some(1));
    assert_eq!(magicsq(&["count", "semi", "--order", "6"]).status.code(), Some(1));
    let budget = magicsq(&["oracle", "count", "--order", "5", "--kind", "associative", "--max-nodes", "1000"]);
    assert_eq!(budget.status.code(), Some(2));
}

#[test]
fn orbit_and_canonical_of_found_square() {
    let out = magicsq(&["--format", "json-lines", "verify", "orbit"]);
    assert_eq!(out.status.code(), Some(0));
    let checks = json_lines(&out);
    assert!(checks.iter().all(|c| c["result"] == "PASS"));
    assert_eq!(checks[0]["detail"], 2304);

    let dir = tempfile::tempdir().unwrap();
    let sq = dir.path().join("sq.txt");
    let found = magicsq(&["oracle", "find-one", "--order", "7", "--kind", "associative"]);
    std::fs::write(&sq, &found.stdout).unwrap();
    let canon = magicsq(&["verify", "canonical", "--square", path_arg(&sq)]);
    assert_eq!(canon.status.code(), Some(0));
}

#[test]
fn pairs_listing() {
    let out =
        magicsq(&["--format", "json-lines", "pairs", "list", "--order", "7", "--mode", "canonical", "--ids", "1..2"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json_lines(&out);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["id"], 1);
    assert_eq!(rows[0]["center"].as_array().unwrap().len(), 21);

    let show = magicsq(&["--format", "json-lines", "pairs", "show", "--order", "5", "--id", "2", "--count"]);
    assert_eq!(show.status.code(), Some(0));
    assert_eq!(json_lines(&show)[0]["count"], 640);
}

#[test]
fn families_written_to_cache() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_magicsq"))
        .args(["--format", "json-lines", "families", "gen", "--order", "5"])
        .env("MAGICSQ_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_lines(&out)[0]["members"], 552);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}
