mod common;

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;

use magicsq::assoc::CountMode;
use magicsq::runner::{
    aggregate, default_chunks, run_range, AssocCounter, Checkpoint, JobRange, PairCounter, RunOptions, SemiCounter,
    Workload,
};
use magicsq::semi::PairScope;
use magicsq::Error;
use proptest::prelude::*;

fn counts(cp: &Checkpoint) -> BTreeMap<u64, u64> {
    cp.records.iter().map(|(&id, r)| (id, r.count)).collect()
}

fn order5() -> (AssocCounter, JobRange) {
    let counter = AssocCounter::new(5, CountMode::Raw).unwrap();
    let range = JobRange::new(counter.workload(), 1..=792, counter.total_ids()).unwrap();
    (counter, range)
}

#[test]
fn worker_count_does_not_change_records() {
    let (counter, range) = order5();
    let dir = tempfile::tempdir().unwrap();
    let one =
        run_range(&range, &counter, RunOptions { workers: 1, stop_after: None }, Some(&dir.path().join("1"))).unwrap();
    let four =
        run_range(&range, &counter, RunOptions { workers: 4, stop_after: None }, Some(&dir.path().join("4"))).unwrap();
    assert_eq!(one.records.len(), 792);
    assert_eq!(counts(&one), counts(&four));
    let memory = run_range(&range, &counter, RunOptions { workers: 2, stop_after: None }, None).unwrap();
    assert_eq!(counts(&one), counts(&memory));
}

#[test]
fn resume_after_interruption_matches_uninterrupted_run() {
    let (counter, range) = order5();
    let dir = tempfile::tempdir().unwrap();
    let clean = run_range(&range, &counter, RunOptions::default(), Some(&dir.path().join("clean"))).unwrap();

    let path = dir.path().join("crashy");
    let err = run_range(&range, &counter, RunOptions { workers: 3, stop_after: Some(250) }, Some(&path)).unwrap_err();
    assert!(matches!(err, Error::Interrupted { completed: 250 }));
    let partial = Checkpoint::load(&path).unwrap();
    assert!(partial.records.len() >= 250 && partial.records.len() < 792);
    // A write cut off mid-record.
    OpenOptions::new().append(true).open(&path).unwrap().write_all(b"791\t12").unwrap();

    let resumed = run_range(&range, &counter, RunOptions { workers: 2, stop_after: None }, Some(&path)).unwrap();
    assert_eq!(counts(&resumed), counts(&clean));
    let reloaded = Checkpoint::load(&path).unwrap();
    assert_eq!(counts(&reloaded), counts(&clean));
}

#[test]
fn rerun_over_complete_checkpoint_is_a_no_op() {
    let (counter, range) = order5();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cp");
    let first = run_range(&range, &counter, RunOptions::default(), Some(&path)).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    let second = run_range(&range, &counter, RunOptions { workers: 4, stop_after: None }, Some(&path)).unwrap();
    assert_eq!(first, second);
    assert_eq!(std::fs::read(&path).unwrap(), bytes);
}

#[test]
fn checkpoint_from_other_workload_is_rejected() {
    let (counter, range) = order5();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cp");
    let semi = SemiCounter::new(4, PairScope::All).unwrap();
    let semi_range = JobRange::new(semi.workload(), 1..=3, semi.total_ids()).unwrap();
    run_range(&semi_range, &semi, RunOptions::default(), Some(&path)).unwrap();
    let err = run_range(&range, &counter, RunOptions::default(), Some(&path)).unwrap_err();
    assert!(matches!(err, Error::DigestMismatch { .. }));
    // A counter for one workload cannot serve another's range.
    assert!(matches!(run_range(&semi_range, &counter, RunOptions::default(), None), Err(Error::DigestMismatch { .. })));
}

#[test]
fn aggregate_needs_input_and_coverage() {
    assert!(matches!(aggregate(&[], None), Err(Error::Coverage(_))));
    let (counter, _) = order5();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("part");
    let range = JobRange::new(counter.workload(), 10..=20, 792).unwrap();
    run_range(&range, &counter, RunOptions::default(), Some(&path)).unwrap();
    match aggregate(&[path], None) {
        Err(Error::Coverage(msg)) => assert!(msg.contains("1-9") && msg.contains("21-792"), "{msg}"),
        other => panic!("expected coverage error, got {other:?}"),
    }
}

#[test]
fn published_chunk_totals_aggregate_to_the_order7_total() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("published");
    common::write_published_chunks_checkpoint(&path);
    let report = aggregate(&[path], None).unwrap();
    assert_eq!(report.reduced_total, common::ORDER7_REDUCED_TOTAL);
    assert!(report.all_passed());
    assert!(report.checks.iter().any(|c| c.name.contains("576")));
    assert_eq!(report.chunks.len(), 16);
    for (row, (first, last, reduced)) in report.chunks.iter().zip(common::PUBLISHED_CHUNKS) {
        assert_eq!((*row.ids.start(), *row.ids.end()), (first, last));
        assert_eq!(row.reduced(), Some(reduced as u128));
    }
}

#[test]
fn default_report_layout() {
    let w = Workload::assoc(7, CountMode::Canonical);
    let chunks = default_chunks(&w, 817_190).unwrap();
    assert_eq!(chunks.len(), 16);
    assert_eq!(chunks[15], 750_001..=817_190);
    let small = default_chunks(&Workload::assoc(5, CountMode::Raw), 792).unwrap();
    assert_eq!(small.len(), 16);
    assert!(small.iter().all(|r| r.end() - r.start() + 1 >= 49));
}

fn order5_records() -> &'static BTreeMap<u64, u64> {
    static R: std::sync::OnceLock<BTreeMap<u64, u64>> = std::sync::OnceLock::new();
    R.get_or_init(|| {
        let (counter, range) = order5();
        counts(&run_range(&range, &counter, RunOptions::default(), None).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn aggregation_is_independent_of_split_and_order(
        mut cuts in proptest::collection::btree_set(1u64..792, 0..6),
        reverse in any::<bool>(),
    ) {
        let (counter, _) = order5();
        let dir = tempfile::tempdir().unwrap();
        cuts.insert(792);
        let mut paths: Vec<PathBuf> = Vec::new();
        let mut start = 1;
        for (i, &end) in cuts.iter().enumerate() {
            let path = dir.path().join(format!("part{i}"));
            let records: Vec<_> = (start..=end)
                .map(|id| magicsq::runner::ResultRecord { pair_id: id, count: order5_records()[&id], elapsed_micros: 1 })
                .collect();
            let header = magicsq::runner::CheckpointHeader::new(counter.workload(), 792);
            magicsq::runner::write_checkpoint(&path, &header, &records).unwrap();
            paths.push(path);
            start = end + 1;
        }
        if reverse {
            paths.reverse();
        }
        let report = aggregate(&paths, None).unwrap();
        prop_assert_eq!(report.raw_total, 388_352);
        prop_assert_eq!(report.reduced_total, 48_544);
        prop_assert!(report.all_passed());
    }
}
