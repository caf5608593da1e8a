//! `magicsq`: command-line front end for the enumeration engine.
//!
//! Exit status: 0 success, 1 usage or input error, 2 computation error,
//! 3 verification failure.

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use magicsq::assoc::{CountMode, PairIndex};
use magicsq::families::{load_or_generate, FamilyKind};
use magicsq::oracle::{count_backtrack, find_one, Budget, SearchKind};
use magicsq::runner::{
    aggregate, make_counter, partition, run_range, sum_range, AggregateReport, Engine, JobRange, PartitionPolicy,
    RunOptions, Workload,
};
use magicsq::semi::{gen_ul_pairs, PairScope};
use magicsq::{canonicalize, classify, is_canonical, orbit, NumberSet, Square, SymmetricPermutation};

use output::{wide, Emitter, Format};

#[derive(Parser)]
#[command(name = "magicsq", version, about = "Exact enumeration of magic squares by split counting")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Precompute line families and store them in the cache directory.
    #[command(subcommand)]
    Families(FamiliesCmd),
    /// Inspect the numbered pair spaces.
    #[command(subcommand)]
    Pairs(PairsCmd),
    /// Count squares with the split engines.
    #[command(subcommand)]
    Count(CountCmd),
    /// Run the independent backtracking oracle.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Check symmetry properties and checkpoint aggregates.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Print a per-chunk report over complete checkpoints.
    Report(ReportArgs),
}

#[derive(Subcommand)]
enum FamiliesCmd {
    /// Generate a family, writing it to the cache when one is configured.
    Gen {
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum, default_value_t = FamilyArg::Rows)]
        kind: FamilyArg,
        /// Cache directory.
        #[arg(long, env = "MAGICSQ_CACHE_DIR")]
        cache_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    /// Rows free of complement pairs (associative engine).
    Rows,
    /// All lines with the magic sum (semi-magic engine).
    SemiLines,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EngineArg {
    Assoc,
    Semi,
}

#[derive(Args)]
struct SpaceArgs {
    #[arg(long, value_enum, default_value_t = EngineArg::Assoc)]
    engine: EngineArg,
    #[arg(long)]
    order: usize,
    /// Associative mode: raw or canonical.
    #[arg(long, default_value = "raw")]
    mode: CountMode,
    /// Semi-magic scope: all or row-min.
    #[arg(long, default_value = "all")]
    scope: PairScope,
}

impl SpaceArgs {
    fn workload(&self) -> Workload {
        match self.engine {
            EngineArg::Assoc => Workload::assoc(self.order, self.mode),
            EngineArg::Semi => Workload::semi(self.order, self.scope),
        }
    }
}

#[derive(Subcommand)]
enum PairsCmd {
    /// List pairs with their IDs.
    List {
        #[command(flatten)]
        space: SpaceArgs,
        /// ID range `A..B` (inclusive).
        #[arg(long, value_parser = parse_ids)]
        ids: Option<(u64, u64)>,
    },
    /// Show one pair, optionally with its count.
    Show {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        id: u64,
        /// Also count the squares of this pair.
        #[arg(long)]
        count: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// ID range `A..B` (inclusive); defaults to the whole space.
    #[arg(long, value_parser = parse_ids)]
    ids: Option<(u64, u64)>,
    /// Worker threads.
    #[arg(long, env = "MAGICSQ_WORKERS", default_value_t = 1)]
    workers: usize,
    /// Append results to this checkpoint, resuming if it exists.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CountCmd {
    /// Associative squares of odd order.
    Assoc {
        #[arg(long)]
        order: usize,
        #[arg(long, default_value = "raw")]
        mode: CountMode,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Semi-magic squares of even order.
    Semi {
        #[arg(long)]
        order: usize,
        #[arg(long, default_value = "all")]
        scope: PairScope,
        /// Required for order 6 and above.
        #[arg(long)]
        i_know_this_is_huge: bool,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    order: usize,
    /// semi-magic, magic or associative.
    #[arg(long)]
    kind: SearchKind,
    /// Abort after this many search nodes.
    #[arg(long)]
    max_nodes: Option<u64>,
    /// Abort after this many seconds.
    #[arg(long)]
    max_seconds: Option<f64>,
}

impl OracleArgs {
    fn budget(&self) -> Budget {
        Budget { max_nodes: self.max_nodes, max_time: self.max_seconds.map(Duration::from_secs_f64) }
    }
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Count every square of a kind.
    Count(OracleArgs),
    /// Print the first square found.
    FindOne(OracleArgs),
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Check the swap-group orbit of an associative square.
    Orbit(SquareSource),
    /// Test and compute the canonical form of an order-7 associative square.
    Canonical(SquareSource),
    /// Check that checkpoints cover their ID space and pass divisibility checks.
    Aggregate {
        #[arg(required = true)]
        checkpoints: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct SquareSource {
    /// Square file: the order on the first line, then one row per line.
    #[arg(long)]
    square: Option<PathBuf>,
    /// Without a file, search for an associative square of this order.
    #[arg(long, default_value_t = 7)]
    order: usize,
}

impl SquareSource {
    fn load(&self) -> anyhow::Result<Square> {
        match &self.square {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                Ok(Square::from_text(&text)?)
            }
            None => find_one(self.order, SearchKind::Associative, Budget::time(Duration::from_secs(600)))?
                .ok_or_else(|| anyhow!("no associative square of order {}", self.order)),
        }
    }
}

#[derive(Args)]
struct ReportArgs {
    #[arg(required = true)]
    checkpoints: Vec<PathBuf>,
    /// Number of chunks; defaults to 16 (fewer for small spaces).
    #[arg(long)]
    chunks: Option<u64>,
    /// balanced, or rounded (round sizes with the remainder in the last chunk).
    #[arg(long)]
    policy: Option<PartitionPolicy>,
}

fn parse_ids(s: &str) -> Result<(u64, u64), String> {
    let parse = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("bad id {t:?}"));
    match s.split_once("..") {
        Some((a, b)) => Ok((parse(a)?, parse(b.trim_start_matches('='))?)),
        None => {
            let v = parse(s)?;
            Ok((v, v))
        }
    }
}

/// A failed check; maps to exit status 3.
#[derive(Debug)]
struct VerificationFailed(String);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "verification failed: {}", self.0)
    }
}

impl std::error::Error for VerificationFailed {}

/// A bad argument detected after parsing; maps to exit status 1.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_status(err: &anyhow::Error) -> u8 {
    if err.is::<VerificationFailed>() {
        return 3;
    }
    if err.is::<UsageError>() {
        return 1;
    }
    match err.downcast_ref::<magicsq::Error>() {
        Some(
            magicsq::Error::InvalidOrder { .. }
            | magicsq::Error::InvalidRange(_)
            | magicsq::Error::CanonicalOrder(_)
            | magicsq::Error::InvalidPair(_)
            | magicsq::Error::InvalidValueSet(_)
            | magicsq::Error::MalformedSquare(_)
            | magicsq::Error::DimensionMismatch { .. },
        ) => 1,
        Some(magicsq::Error::Coverage(_) | magicsq::Error::DigestMismatch { .. } | magicsq::Error::NotAssociative) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let mut out = Emitter::new(cli.format);
    match dispatch(cli.command, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_status(&e))
        }
    }
}

fn dispatch(cmd: Command, out: &mut Emitter) -> anyhow::Result<()> {
    match cmd {
        Command::Families(FamiliesCmd::Gen { order, kind, cache_dir }) => families_gen(order, kind, cache_dir, out),
        Command::Pairs(PairsCmd::List { space, ids }) => pairs_list(&space, ids, out),
        Command::Pairs(PairsCmd::Show { space, id, count }) => pairs_show(&space, id, count, out),
        Command::Count(CountCmd::Assoc { order, mode, run }) => count(Workload::assoc(order, mode), &run, out),
        Command::Count(CountCmd::Semi { order, scope, i_know_this_is_huge, run }) => {
            if order >= 6 && !i_know_this_is_huge {
                return Err(UsageError(format!(
                    "order {order} semi-magic counting takes days of CPU time; pass --i-know-this-is-huge"
                ))
                .into());
            }
            count(Workload::semi(order, scope), &run, out)
        }
        Command::Oracle(OracleCmd::Count(args)) => oracle_count(&args, out),
        Command::Oracle(OracleCmd::FindOne(args)) => oracle_find_one(&args, out),
        Command::Verify(VerifyCmd::Orbit(src)) => verify_orbit(&src, out),
        Command::Verify(VerifyCmd::Canonical(src)) => verify_canonical(&src, out),
        Command::Verify(VerifyCmd::Aggregate { checkpoints }) => {
            let report = aggregate(&checkpoints, None)?;
            emit_summary(&report, out)?;
            require_checks(&report)
        }
        Command::Report(args) => report(&args, out),
    }
}

fn families_gen(order: usize, kind: FamilyArg, cache_dir: Option<PathBuf>, out: &mut Emitter) -> anyhow::Result<()> {
    let (kind, name) = match kind {
        FamilyArg::Rows => (FamilyKind::ComplementFreeRows, "rows"),
        FamilyArg::SemiLines => (FamilyKind::SemiLines, "semi-lines"),
    };
    let family = load_or_generate(cache_dir.as_deref(), order, kind)?;
    out.record(json!({
        "order": order,
        "kind": name,
        "members": family.len(),
        "target": family.target(),
        "cache_dir": cache_dir.map(|p| p.display().to_string()),
    }))?;
    Ok(())
}

fn set(s: NumberSet) -> Value {
    json!(s.to_vec())
}

/// Resolves an optional `A..B` against a space of `total` IDs.
fn resolve_ids(ids: Option<(u64, u64)>, total: u64) -> anyhow::Result<(u64, u64)> {
    let (a, b) = ids.unwrap_or((1, total));
    if a == 0 || a > b || b > total {
        return Err(UsageError(format!("id range {a}..{b} outside 1..{total}")).into());
    }
    Ok((a, b))
}

fn pairs_list(space: &SpaceArgs, ids: Option<(u64, u64)>, out: &mut Emitter) -> anyhow::Result<()> {
    match space.engine {
        EngineArg::Assoc => {
            let index = PairIndex::new(space.order, space.mode)?;
            let (a, b) = resolve_ids(ids, index.len())?;
            for id in a..=b {
                let p = index.get(id)?;
                out.row(json!({ "id": id, "center": set(p.center()), "outer": set(p.outer()) }))?;
            }
        }
        EngineArg::Semi => {
            let pairs = gen_ul_pairs(space.order, space.scope)?;
            let (a, b) = resolve_ids(ids, pairs.len())?;
            for id in a..=b {
                let p = pairs.get(id)?;
                out.row(json!({ "id": id, "upper": set(p.upper), "lower": set(p.lower) }))?;
            }
        }
    }
    Ok(())
}

fn pairs_show(space: &SpaceArgs, id: u64, with_count: bool, out: &mut Emitter) -> anyhow::Result<()> {
    let workload = space.workload();
    let mut rec = match space.engine {
        EngineArg::Assoc => {
            let index = PairIndex::new(space.order, space.mode)?;
            resolve_ids(Some((id, id)), index.len())?;
            let p = index.get(id)?;
            json!({
                "id": id,
                "order": space.order,
                "mode": space.mode.name(),
                "center": set(p.center()),
                "outer": set(p.outer()),
                "center_minima": set(p.center_minima()),
            })
        }
        EngineArg::Semi => {
            let pairs = gen_ul_pairs(space.order, space.scope)?;
            resolve_ids(Some((id, id)), pairs.len())?;
            let p = pairs.get(id)?;
            json!({
                "id": id,
                "order": space.order,
                "scope": space.scope.name(),
                "upper": set(p.upper),
                "lower": set(p.lower),
            })
        }
    };
    if with_count {
        rec["count"] = json!(make_counter(workload)?.count(id)?);
    }
    out.record(rec)?;
    Ok(())
}

fn count(workload: Workload, run: &RunArgs, out: &mut Emitter) -> anyhow::Result<()> {
    if run.workers == 0 {
        return Err(UsageError("--workers must be at least 1".into()).into());
    }
    let counter = make_counter(workload)?;
    let total = counter.total_ids();
    let (a, b) = resolve_ids(run.ids, total)?;
    let range = JobRange::new(workload, a..=b, total)?;
    let opts = RunOptions { workers: run.workers, stop_after: None };
    let cp = run_range(&range, counter.as_ref(), opts, run.checkpoint.as_deref())?;
    let pair_sum = sum_range(&cp, a..=b)?;
    let raw = pair_sum.checked_mul(workload.weight() as u128).ok_or_else(|| anyhow!("total overflows"))?;
    let complete = a == 1 && b == total;
    let mut rec = json!({ "engine": workload.engine.name(), "order": workload.order });
    match workload.engine {
        Engine::Assoc => rec["mode"] = json!(workload.mode_name()),
        Engine::Semi => rec["scope"] = json!(workload.scope_name()),
    }
    rec["ids"] = json!(format!("{a}..{b}"));
    rec["pairs"] = json!(b - a + 1);
    rec["complete"] = json!(complete);
    rec["pair_sum"] = wide(pair_sum);
    rec["raw_total"] = wide(raw);
    rec["reduced_total"] = if raw % 8 == 0 { wide(raw / 8) } else { Value::Null };
    out.record(rec)?;
    Ok(())
}

fn oracle_count(args: &OracleArgs, out: &mut Emitter) -> anyhow::Result<()> {
    let r = count_backtrack(args.order, args.kind, args.budget())?;
    out.record(json!({
        "order": r.order,
        "kind": r.kind.name(),
        "raw_count": r.raw_count,
        "reduced_count": r.reduced_count,
        "nodes": r.nodes,
        "elapsed_ms": r.elapsed.as_millis() as u64,
    }))?;
    Ok(())
}

fn square_rows(sq: &Square) -> Value {
    json!(sq.rows().map(|r| r.to_vec()).collect::<Vec<_>>())
}

fn oracle_find_one(args: &OracleArgs, out: &mut Emitter) -> anyhow::Result<()> {
    let found = find_one(args.order, args.kind, args.budget())?;
    match (&found, out.format()) {
        (Some(sq), Format::Text) => print!("{}", sq.to_text()),
        (None, Format::Text) => println!("none"),
        (sq, _) => out.record(json!({
            "order": args.order,
            "kind": args.kind.name(),
            "found": sq.is_some(),
            "rows": sq.as_ref().map(square_rows),
        }))?,
    }
    Ok(())
}

fn check(out: &mut Emitter, failures: &mut Vec<String>, name: &str, passed: bool, detail: Value) -> anyhow::Result<()> {
    if !passed {
        failures.push(name.to_string());
    }
    out.row(json!({ "check": name, "result": if passed { "PASS" } else { "FAIL" }, "detail": detail }))?;
    Ok(())
}

fn finish(failures: Vec<String>) -> anyhow::Result<()> {
    if failures.is_empty() {
        Ok(())
    } else {
        Err(VerificationFailed(failures.join(", ")).into())
    }
}

fn verify_orbit(src: &SquareSource, out: &mut Emitter) -> anyhow::Result<()> {
    let sq = src.load()?;
    let n = sq.order();
    let group = SymmetricPermutation::all(n)?.len();
    let members = orbit(&sq, false)?;
    let mut failures = Vec::new();
    check(out, &mut failures, "orbit size equals group order", members.len() == group, json!(members.len()))?;
    let associative = members.iter().filter(|m| classify(m).associative).count();
    check(out, &mut failures, "all members associative", associative == members.len(), json!(associative))?;
    if n == 7 {
        let mut canonical = 0;
        for m in &members {
            canonical += usize::from(is_canonical(m)?);
        }
        check(out, &mut failures, "exactly one canonical member", canonical == 1, json!(canonical))?;
    }
    finish(failures)
}

fn verify_canonical(src: &SquareSource, out: &mut Emitter) -> anyhow::Result<()> {
    let sq = src.load()?;
    let (canon, perm) = canonicalize(&sq)?;
    let mut failures = Vec::new();
    check(out, &mut failures, "canonical image passes the canonical test", is_canonical(&canon)?, json!(null))?;
    out.record(json!({
        "input_canonical": is_canonical(&sq)?,
        "row_perm": perm.rows(),
        "col_perm": perm.cols(),
        "canonical": square_rows(&canon),
    }))?;
    finish(failures)
}

fn emit_summary(report: &AggregateReport, out: &mut Emitter) -> anyhow::Result<()> {
    let w = &report.workload;
    out.record(json!({
        "engine": w.engine.name(),
        "order": w.order,
        "mode": w.mode_name(),
        "scope": w.scope_name(),
        "ids": report.total_ids,
        "pair_sum": wide(report.pair_sum),
        "raw_total": wide(report.raw_total),
        "reduced_total": wide(report.reduced_total),
    }))?;
    for c in &report.checks {
        out.row(json!({ "check": c.name, "result": if c.passed { "PASS" } else { "FAIL" } }))?;
    }
    Ok(())
}

fn require_checks(report: &AggregateReport) -> anyhow::Result<()> {
    let failed: Vec<String> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    finish(failed)
}

fn report(args: &ReportArgs, out: &mut Emitter) -> anyhow::Result<()> {
    let chunks = match args.chunks {
        Some(c) => {
            let first = checkpoint_total(&args.checkpoints[0])?;
            Some(partition(first, c, args.policy.unwrap_or(PartitionPolicy::Balanced))?)
        }
        None if args.policy.is_some() => bail!(UsageError("--policy needs --chunks".into())),
        None => None,
    };
    let report = aggregate(&args.checkpoints, chunks)?;
    emit_summary(&report, out)?;
    for row in &report.chunks {
        out.row(json!({
            "ids": format!("{}-{}", row.ids.start(), row.ids.end()),
            "raw": wide(row.raw),
            "reduced": row.reduced().map(wide),
            "cpu_seconds": format!("{:.3}", row.elapsed_micros as f64 / 1e6),
        }))?;
    }
    require_checks(&report)
}

fn checkpoint_total(path: &Path) -> anyhow::Result<u64> {
    Ok(magicsq::runner::Checkpoint::load(path)?.header.total_ids)
}
