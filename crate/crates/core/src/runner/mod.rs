//! Job partitioning, checkpointed parallel runs and aggregation.

mod checkpoint;
mod partition;

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use sha2::{Digest, Sha256};

use crate::assoc::{AssocContext, CountMode, PairIndex, CANONICAL_GROUP_ORDER};
use crate::error::{Error, Result};
use crate::semi::{gen_ul_pairs, PairScope, SemiContext, UlPairSet};

pub use checkpoint::{write_checkpoint, Checkpoint, CheckpointHeader, CheckpointWriter, ResultRecord};
pub use partition::{partition, PartitionPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    Assoc,
    Semi,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Assoc => "assoc",
            Engine::Semi => "semi",
        }
    }
}

/// What a run counts: the engine, the order and the engine's mode or scope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Workload {
    pub engine: Engine,
    pub order: usize,
    /// Associative engine only.
    pub mode: CountMode,
    /// Semi-magic engine only.
    pub scope: PairScope,
}

/// Version tag of the pair-ID orderings; part of every config digest.
const ID_SCHEME: &str = "lex-minima-v1";

impl Workload {
    pub fn assoc(order: usize, mode: CountMode) -> Self {
        Workload { engine: Engine::Assoc, order, mode, scope: PairScope::All }
    }

    pub fn semi(order: usize, scope: PairScope) -> Self {
        Workload { engine: Engine::Semi, order, mode: CountMode::Raw, scope }
    }

    pub fn mode_name(&self) -> &'static str {
        match self.engine {
            Engine::Assoc => self.mode.name(),
            Engine::Semi => "-",
        }
    }

    pub fn scope_name(&self) -> &'static str {
        match self.engine {
            Engine::Assoc => "-",
            Engine::Semi => self.scope.name(),
        }
    }

    pub fn from_names(engine: &str, order: usize, mode: &str, scope: &str) -> Result<Self> {
        match engine {
            "assoc" => Ok(Workload::assoc(order, mode.parse()?)),
            "semi" => Ok(Workload::semi(order, scope.parse()?)),
            other => Err(Error::InvalidPair(format!("unknown engine {other:?}"))),
        }
    }

    /// Hex SHA-256 over everything that gives pair IDs and counts their
    /// meaning.
    pub fn digest(&self) -> String {
        let text = format!(
            "magicsq|engine={}|order={}|mode={}|scope={}|ids={ID_SCHEME}|version={}",
            self.engine.name(),
            self.order,
            self.mode_name(),
            self.scope_name(),
            env!("CARGO_PKG_VERSION")
        );
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    /// Factor from the sum of per-pair counts to the number of squares.
    pub fn weight(&self) -> u64 {
        match (self.engine, self.mode, self.scope) {
            (Engine::Assoc, CountMode::Canonical, _) => CANONICAL_GROUP_ORDER,
            (Engine::Semi, _, PairScope::RowMinOrdered) => {
                crate::assoc::binomial(self.order as u64, self.order as u64 / 2)
            }
            _ => 1,
        }
    }

    /// Size of the pair-ID space. Cheap for the associative engine; the
    /// semi-magic engine has to generate its pairs.
    pub fn total_ids(&self) -> Result<u64> {
        match self.engine {
            Engine::Assoc => Ok(PairIndex::new(self.order, self.mode)?.len()),
            Engine::Semi => Ok(gen_ul_pairs(self.order, self.scope)?.len()),
        }
    }
}

/// An inclusive range of pair IDs within one workload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JobRange {
    pub first_id: u64,
    pub last_id: u64,
    pub workload: Workload,
}

impl JobRange {
    pub fn new(workload: Workload, ids: RangeInclusive<u64>, total_ids: u64) -> Result<Self> {
        let (first, last) = (*ids.start(), *ids.end());
        if first == 0 || first > last || last > total_ids {
            return Err(Error::InvalidRange(format!("{first}..{last} outside 1..={total_ids}")));
        }
        Ok(JobRange { first_id: first, last_id: last, workload })
    }

    pub fn ids(&self) -> RangeInclusive<u64> {
        self.first_id..=self.last_id
    }

    pub fn len(&self) -> u64 {
        self.last_id - self.first_id + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Counts one pair; implementations must be pure in the pair ID.
pub trait PairCounter: Sync {
    fn workload(&self) -> Workload;
    fn total_ids(&self) -> u64;
    fn count(&self, id: u64) -> Result<u64>;
}

pub struct AssocCounter {
    ctx: AssocContext,
    index: PairIndex,
}

impl AssocCounter {
    pub fn new(order: usize, mode: CountMode) -> Result<Self> {
        Ok(AssocCounter { ctx: AssocContext::new(order)?, index: PairIndex::new(order, mode)? })
    }
}

impl PairCounter for AssocCounter {
    fn workload(&self) -> Workload {
        Workload::assoc(self.ctx.order(), self.index.mode())
    }

    fn total_ids(&self) -> u64 {
        self.index.len()
    }

    fn count(&self, id: u64) -> Result<u64> {
        self.ctx.count_pair(&self.index.get(id)?, self.index.mode())
    }
}

pub struct SemiCounter {
    ctx: SemiContext,
    pairs: UlPairSet,
}

impl SemiCounter {
    pub fn new(order: usize, scope: PairScope) -> Result<Self> {
        Ok(SemiCounter { ctx: SemiContext::new(order)?, pairs: gen_ul_pairs(order, scope)? })
    }
}

impl PairCounter for SemiCounter {
    fn workload(&self) -> Workload {
        Workload::semi(self.ctx.order(), self.pairs.scope())
    }

    fn total_ids(&self) -> u64 {
        self.pairs.len()
    }

    fn count(&self, id: u64) -> Result<u64> {
        self.ctx.count_pair(&self.pairs.get(id)?, self.pairs.scope())
    }
}

pub fn make_counter(workload: Workload) -> Result<Box<dyn PairCounter>> {
    Ok(match workload.engine {
        Engine::Assoc => Box::new(AssocCounter::new(workload.order, workload.mode)?),
        Engine::Semi => Box::new(SemiCounter::new(workload.order, workload.scope)?),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub workers: usize,
    /// Stop (with [`Error::Interrupted`]) after this many new records; used to
    /// simulate a crash.
    pub stop_after: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { workers: 1, stop_after: None }
    }
}

/// Counts every pair of `range` not yet in the checkpoint, appending one
/// record per pair. Returns the checkpoint as stored on disk, or the records
/// held in memory when no path is given.
pub fn run_range(
    range: &JobRange,
    counter: &dyn PairCounter,
    opts: RunOptions,
    path: Option<&Path>,
) -> Result<Checkpoint> {
    if opts.workers == 0 {
        return Err(Error::InvalidRange("need at least one worker".into()));
    }
    if counter.workload() != range.workload {
        return Err(Error::DigestMismatch { expected: range.workload.digest(), found: counter.workload().digest() });
    }
    let header = CheckpointHeader::new(range.workload, counter.total_ids());
    let existing = match path {
        Some(p) if p.exists() => Some(Checkpoint::load(p)?),
        _ => None,
    };
    if let Some(cp) = &existing {
        if cp.header.digest != header.digest || cp.header.total_ids != header.total_ids {
            return Err(Error::DigestMismatch { expected: header.digest.clone(), found: cp.header.digest.clone() });
        }
    }
    let todo: Vec<u64> =
        range.ids().filter(|id| existing.as_ref().is_none_or(|cp| !cp.records.contains_key(id))).collect();
    log::info!("{} pairs to count, {} already recorded", todo.len(), range.len() - todo.len() as u64);
    let mut writer = match path {
        Some(p) => Some(CheckpointWriter::open(p, &header, existing.as_ref())?),
        None => None,
    };
    let mut memory: BTreeMap<u64, ResultRecord> = BTreeMap::new();

    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let mut written = 0usize;
    let mut failure: Option<Error> = None;
    std::thread::scope(|s| {
        let (tx, rx) = mpsc::channel::<(u64, Result<u64>, u64)>();
        for _ in 0..opts.workers.min(todo.len().max(1)) {
            let tx = tx.clone();
            let (next, stop, todo) = (&next, &stop, &todo);
            s.spawn(move || loop {
                if stop.load(Ordering::Relaxed) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&id) = todo.get(i) else { break };
                let t = Instant::now();
                let result = counter.count(id);
                if tx.send((id, result, t.elapsed().as_micros() as u64)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for (id, result, micros) in rx {
            if failure.is_some() {
                continue;
            }
            let stored = result.and_then(|count| {
                let rec = ResultRecord { pair_id: id, count, elapsed_micros: micros };
                match writer.as_mut() {
                    Some(w) => w.append(&rec),
                    None => {
                        memory.insert(id, rec);
                        Ok(())
                    }
                }
            });
            match stored {
                Ok(()) => {
                    written += 1;
                    if opts.stop_after.is_some_and(|limit| written >= limit) {
                        stop.store(true, Ordering::Relaxed);
                        failure = Some(Error::Interrupted { completed: written });
                    }
                }
                Err(e) => {
                    stop.store(true, Ordering::Relaxed);
                    failure = Some(e);
                }
            }
        }
    });
    if let Some(w) = writer.as_mut() {
        w.sync()?;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    match path {
        Some(p) => Checkpoint::load(p),
        None => Ok(Checkpoint { header, records: memory, valid_len: 0 }),
    }
}

/// Sum of the counts recorded for `ids`, failing on any missing ID.
pub fn sum_range(cp: &Checkpoint, ids: RangeInclusive<u64>) -> Result<u128> {
    let mut sum: u128 = 0;
    let mut missing = Vec::new();
    for id in ids {
        match cp.records.get(&id) {
            Some(rec) => sum = sum.checked_add(rec.count as u128).ok_or(Error::Overflow("range sum"))?,
            None => missing.push(id),
        }
    }
    if !missing.is_empty() {
        return Err(Error::Coverage(format!("{} missing ids: {}", missing.len(), describe_ranges(&missing))));
    }
    Ok(sum)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkRow {
    pub ids: RangeInclusive<u64>,
    /// Squares attributed to the chunk (pair sum times the workload weight).
    pub raw: u128,
    pub elapsed_micros: u128,
}

impl ChunkRow {
    /// Chunk total up to rotation and reflection, when it divides evenly.
    pub fn reduced(&self) -> Option<u128> {
        self.raw.is_multiple_of(8).then_some(self.raw / 8)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregateReport {
    pub workload: Workload,
    pub total_ids: u64,
    pub pair_sum: u128,
    pub raw_total: u128,
    pub reduced_total: u128,
    pub checks: Vec<CheckResult>,
    pub chunks: Vec<ChunkRow>,
}

impl AggregateReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn describe_ranges(ids: &[u64]) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < ids.len() && parts.len() < 20 {
        let start = ids[i];
        let mut end = start;
        while i + 1 < ids.len() && ids[i + 1] == end + 1 {
            i += 1;
            end += 1;
        }
        parts.push(if start == end { start.to_string() } else { format!("{start}-{end}") });
        i += 1;
    }
    if i < ids.len() {
        parts.push("...".into());
    }
    parts.join(",")
}

/// Default report layout: the 16 round-sized chunks for the canonical
/// order-7 space, otherwise up to 16 balanced chunks.
pub fn default_chunks(workload: &Workload, total_ids: u64) -> Result<Vec<RangeInclusive<u64>>> {
    let canonical7 = workload.engine == Engine::Assoc && workload.mode == CountMode::Canonical;
    let policy = if canonical7 { PartitionPolicy::RoundedWithTail } else { PartitionPolicy::Balanced };
    partition(total_ids, 16.min(total_ids), policy)
}

/// Merges checkpoints that together cover a workload's whole ID space.
pub fn aggregate(paths: &[PathBuf], chunks: Option<Vec<RangeInclusive<u64>>>) -> Result<AggregateReport> {
    if paths.is_empty() {
        return Err(Error::Coverage("no checkpoints given".into()));
    }
    let loaded: Vec<Checkpoint> = paths.iter().map(|p| Checkpoint::load(p)).collect::<Result<_>>()?;
    let header = loaded[0].header.clone();
    for cp in &loaded[1..] {
        if cp.header.digest != header.digest || cp.header.total_ids != header.total_ids {
            return Err(Error::DigestMismatch { expected: header.digest.clone(), found: cp.header.digest.clone() });
        }
    }
    let workload = header.workload;
    if workload.engine == Engine::Assoc {
        let expect = workload.total_ids()?;
        if expect != header.total_ids {
            return Err(Error::Coverage(format!("header claims {} ids, workload has {expect}", header.total_ids)));
        }
    }
    let mut merged: BTreeMap<u64, ResultRecord> = BTreeMap::new();
    let mut duplicates = Vec::new();
    for cp in &loaded {
        for (&id, rec) in &cp.records {
            if merged.insert(id, *rec).is_some() {
                duplicates.push(id);
            }
        }
    }
    duplicates.sort_unstable();
    duplicates.dedup();
    let missing: Vec<u64> = (1..=header.total_ids).filter(|id| !merged.contains_key(id)).collect();
    if !duplicates.is_empty() || !missing.is_empty() {
        let mut msg = Vec::new();
        if !missing.is_empty() {
            msg.push(format!("{} missing ids: {}", missing.len(), describe_ranges(&missing)));
        }
        if !duplicates.is_empty() {
            msg.push(format!("{} duplicated ids: {}", duplicates.len(), describe_ranges(&duplicates)));
        }
        return Err(Error::Coverage(msg.join("; ")));
    }
    let weight = workload.weight() as u128;
    let mut pair_sum: u128 = 0;
    for rec in merged.values() {
        pair_sum = pair_sum.checked_add(rec.count as u128).ok_or(Error::Overflow("aggregate sum"))?;
    }
    let raw_total = pair_sum.checked_mul(weight).ok_or(Error::Overflow("aggregate total"))?;
    let reduced_total = raw_total / 8;
    let mut checks = vec![CheckResult { name: "raw total divisible by 8".into(), passed: raw_total % 8 == 0 }];
    if workload.engine == Engine::Assoc && workload.mode == CountMode::Canonical {
        checks.push(CheckResult { name: "reduced total divisible by 576".into(), passed: reduced_total % 576 == 0 });
    }
    let ranges = match chunks {
        Some(c) => c,
        None => default_chunks(&workload, header.total_ids)?,
    };
    let mut rows = Vec::with_capacity(ranges.len());
    for r in ranges {
        let mut sum: u128 = 0;
        let mut micros: u128 = 0;
        for rec in merged.range(r.clone()).map(|(_, rec)| rec) {
            sum += rec.count as u128;
            micros += rec.elapsed_micros as u128;
        }
        rows.push(ChunkRow { ids: r, raw: sum * weight, elapsed_micros: micros });
    }
    Ok(AggregateReport {
        workload,
        total_ids: header.total_ids,
        pair_sum,
        raw_total,
        reduced_total,
        checks,
        chunks: rows,
    })
}
