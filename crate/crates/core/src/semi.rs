//! Semi-magic squares of even order by upper/lower split.
//!
//! The upper `n/2` rows hold a value set `U` and the lower rows hold its
//! complement `L`. Each half is tabulated by column sums (the lower half as
//! `M` minus its column sums); equal keys combine into semi-magic squares.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::families::{gen_semi_line_family, restrict_family, subsets_with_sum, LineFamily};
use crate::numberset::NumberSet;
use crate::perm::PermTable;
use crate::profile::{combine, Profile, ProfileTable};
use crate::square::{check_order, magic_sum};

/// Which upper-half value sets are enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairScope {
    /// Every `U` with `|U| = n²/2` and `ΣU = nM/2`.
    All,
    /// Only `U` that can be cut into rows whose minima all lie below `min(L)`.
    /// The upper rows are then the `n/2` rows with the smallest minima, one
    /// choice out of `C(n, n/2)`, so the total is scaled back by that factor.
    RowMinOrdered,
}

impl PairScope {
    pub fn name(self) -> &'static str {
        match self {
            PairScope::All => "all",
            PairScope::RowMinOrdered => "row-min",
        }
    }
}

impl std::str::FromStr for PairScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(PairScope::All),
            "row-min" | "row_min" | "rowmin" => Ok(PairScope::RowMinOrdered),
            other => Err(Error::InvalidPair(format!("unknown pair scope {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Half {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ULPair {
    pub id: u64,
    pub order: usize,
    pub upper: NumberSet,
    pub lower: NumberSet,
}

fn check_even(n: usize) -> Result<()> {
    check_order(n)?;
    if n % 2 == 1 || n > 6 {
        return Err(Error::InvalidOrder { order: n, reason: "the half split needs even n <= 6" });
    }
    Ok(())
}

/// Ranks `size`-subsets of `1..=universe` with a fixed sum in lexicographic
/// order of their ascending value lists.
///
/// Ranking walks the values in chunks of nine, looking up each chunk's
/// contribution in a table indexed by (elements still needed, sum still
/// needed, chunk bits).
pub struct SubsetRanker {
    universe: u32,
    size: usize,
    sum: u32,
    /// `count[v][k][s]`: subsets of `v..=universe` with `k` elements summing to `s`.
    count: Vec<u64>,
    chunks: Vec<Vec<u32>>,
    total: u64,
}

const CHUNK: u32 = 9;

impl SubsetRanker {
    pub fn new(universe: u32, size: usize, sum: u32) -> Result<Self> {
        if universe == 0 || universe > 63 {
            return Err(Error::InvalidValueSet(format!("universe 1..={universe} unsupported")));
        }
        let ks = size + 1;
        let ss = sum as usize + 1;
        let idx = |v: usize, k: usize, s: usize| (v * ks + k) * ss + s;
        let mut count = vec![0u64; (universe as usize + 2) * ks * ss];
        count[idx(universe as usize + 1, 0, 0)] = 1;
        for v in (1..=universe as usize).rev() {
            for k in 0..ks {
                for s in 0..ss {
                    let mut c = count[idx(v + 1, k, s)];
                    if k > 0 && s >= v {
                        c += count[idx(v + 1, k - 1, s - v)];
                    }
                    count[idx(v, k, s)] = c;
                }
            }
        }
        let total = count[idx(1, size, sum as usize)];
        if total > u32::MAX as u64 {
            return Err(Error::Overflow("subset rank exceeds 32 bits"));
        }
        let mut ranker = SubsetRanker { universe, size, sum, count, chunks: Vec::new(), total };
        let n_chunks = universe.div_ceil(CHUNK);
        for c in 0..n_chunks {
            let first = c * CHUNK + 1;
            let width = CHUNK.min(universe - first + 1);
            let mut table = vec![0u32; (ks * ss) << width];
            for k in 0..ks {
                for s in 0..ss {
                    for bits in 0u32..(1 << width) {
                        let (mut kk, mut sr, mut r) = (k, s, 0u64);
                        for b in 0..width {
                            let v = (first + b) as usize;
                            if bits >> b & 1 == 1 {
                                if kk == 0 || sr < v {
                                    break;
                                }
                                kk -= 1;
                                sr -= v;
                            } else if kk > 0 && sr >= v {
                                r += ranker.count_at(v + 1, kk - 1, sr - v);
                            }
                        }
                        table[((k * ss + s) << width) | bits as usize] = r as u32;
                    }
                }
            }
            ranker.chunks.push(table);
        }
        Ok(ranker)
    }

    #[inline]
    fn count_at(&self, v: usize, k: usize, s: usize) -> u64 {
        let ss = self.sum as usize + 1;
        self.count[(v * (self.size + 1) + k) * ss + s]
    }

    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// 0-based rank. The set must have the ranker's size and sum.
    #[inline]
    pub fn rank(&self, set: NumberSet) -> u64 {
        debug_assert_eq!(set.len(), self.size);
        let ss = self.sum as usize + 1;
        let bits = set.bits() >> 1;
        let (mut k, mut s) = (self.size, self.sum as usize);
        let mut r = 0u64;
        for (c, table) in self.chunks.iter().enumerate() {
            let first = c as u32 * CHUNK;
            let width = CHUNK.min(self.universe - first);
            let chunk = (bits >> first) & ((1 << width) - 1);
            r += table[((k * ss + s) << width) | chunk as usize] as u64;
            let taken = NumberSet::from_bits(chunk << (first + 1));
            k -= taken.len();
            s -= taken.sum() as usize;
        }
        r
    }

    pub fn unrank(&self, mut r: u64) -> NumberSet {
        let (mut k, mut s) = (self.size, self.sum as usize);
        let mut set = NumberSet::EMPTY;
        for v in 1..=self.universe as usize {
            if k == 0 {
                break;
            }
            let with = if s >= v { self.count_at(v + 1, k - 1, s - v) } else { 0 };
            if r < with {
                set.insert(v as u32);
                k -= 1;
                s -= v;
            } else {
                r -= with;
            }
        }
        set
    }
}

/// The upper-half value sets of one order and scope, in lexicographic order;
/// IDs are 1-based positions.
#[derive(Debug, Clone)]
pub struct UlPairSet {
    order: usize,
    scope: PairScope,
    uppers: Vec<NumberSet>,
}

impl UlPairSet {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn scope(&self) -> PairScope {
        self.scope
    }

    pub fn len(&self) -> u64 {
        self.uppers.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.uppers.is_empty()
    }

    pub fn get(&self, id: u64) -> Result<ULPair> {
        if id == 0 || id > self.len() {
            return Err(Error::InvalidPair(format!("pair id {id} outside 1..={}", self.len())));
        }
        let upper = self.uppers[(id - 1) as usize];
        let lower = NumberSet::range((self.order * self.order) as u32).difference(upper);
        Ok(ULPair { id, order: self.order, upper, lower })
    }

    pub fn iter(&self) -> impl Iterator<Item = ULPair> + '_ {
        (1..=self.len()).map(|id| self.get(id).expect("id within range"))
    }

    /// Factor turning the scope's pair sum into the full count.
    pub fn multiplier(&self) -> u64 {
        match self.scope {
            PairScope::All => 1,
            PairScope::RowMinOrdered => crate::assoc::binomial(self.order as u64, self.order as u64 / 2),
        }
    }
}

/// Upper-half value sets for `(n, scope)`.
pub fn gen_ul_pairs(n: usize, scope: PairScope) -> Result<UlPairSet> {
    check_even(n)?;
    let area = (n * n) as u32;
    let m = magic_sum(n)?;
    let half_sum = m * n as u32 / 2;
    let uppers = match scope {
        PairScope::All => {
            let mut out = Vec::new();
            subsets_with_sum(NumberSet::range(area), n * n / 2, half_sum, None, &mut out);
            out
        }
        PairScope::RowMinOrdered => row_min_ordered_uppers(n)?,
    };
    Ok(UlPairSet { order: n, scope, uppers })
}

/// Smallest value of `1..=area` missing from `s`.
fn mex(s: NumberSet) -> u32 {
    (!(s.bits() | 1)).trailing_zeros()
}

/// A row whose minimum is `lo`: `lo` plus `n-1` larger unused values.
fn rows_with_min(lo: u32, used: NumberSet, n: usize, m: u32, area: u32, out: &mut Vec<NumberSet>) {
    out.clear();
    let avail = NumberSet::range(area).difference(NumberSet::range(lo)).difference(used);
    let start = out.len();
    subsets_with_sum(avail, n - 1, m - lo, None, out);
    for s in &mut out[start..] {
        s.insert(lo);
    }
}

fn row_min_ordered_uppers(n: usize) -> Result<Vec<NumberSet>> {
    let area = (n * n) as u32;
    let m = magic_sum(n)?;
    let rows = n / 2;
    // Every row of a qualifying cut contains the smallest value not yet used,
    // so cuts are built greedily; distinct partial unions are kept once.
    let mut partial: Vec<NumberSet> = vec![NumberSet::EMPTY];
    let mut buf = Vec::new();
    for _ in 0..rows - 1 {
        let mut next = Vec::new();
        for &t in &partial {
            rows_with_min(mex(t), t, n, m, area, &mut buf);
            next.extend(buf.iter().map(|r| t.union(*r)));
        }
        next.sort_unstable();
        next.dedup();
        partial = next;
    }
    let ranker = SubsetRanker::new(area, n * n / 2, m * n as u32 / 2)?;
    let mut seen = vec![0u64; (ranker.len() as usize).div_ceil(64)];
    for &t in &partial {
        rows_with_min(mex(t), t, n, m, area, &mut buf);
        for r in &buf {
            let rank = ranker.rank(t.union(*r)) as usize;
            seen[rank / 64] |= 1 << (rank % 64);
        }
    }
    let mut out = Vec::new();
    for (w, &word) in seen.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            out.push(ranker.unrank((w * 64 + b) as u64));
        }
    }
    Ok(out)
}

/// Shared state for counting halves of one even order.
pub struct SemiContext {
    n: usize,
    m: u32,
    lines: LineFamily,
    perms: PermTable,
}

impl std::fmt::Debug for SemiContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SemiContext").field("order", &self.n).field("lines", &self.lines.len()).finish()
    }
}

impl SemiContext {
    pub fn new(n: usize) -> Result<Self> {
        check_even(n)?;
        Ok(SemiContext { n, m: magic_sum(n)?, lines: gen_semi_line_family(n)?, perms: PermTable::new(n)? })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn lines(&self) -> &LineFamily {
        &self.lines
    }

    /// Table of one half. With `row_min_below = Some(b)` only cuts whose
    /// rows all have a minimum below `b` are counted.
    pub fn count_half(&self, values: NumberSet, side: Half, row_min_below: Option<u32>) -> Result<ProfileTable> {
        let n = self.n;
        if values.len() != n * n / 2 || !values.is_subset(NumberSet::range((n * n) as u32)) {
            return Err(Error::InvalidValueSet(format!("{values:?} is not a half of size {}", n * n / 2)));
        }
        if values.sum() != self.m * n as u32 / 2 {
            return Err(Error::InvalidValueSet(format!("{values:?} does not sum to {}", self.m * n as u32 / 2)));
        }
        let fam = restrict_family(&self.lines, values);
        let mut cuts = Vec::new();
        let mut cur = Vec::new();
        cut_rows(fam.members(), values, n / 2, &mut cur, &mut cuts);
        let orderings: u64 = (1..=(n / 2) as u64).product();
        let mut table = ProfileTable::new();
        for cut in cuts {
            if let Some(b) = row_min_below {
                if cut.iter().any(|&r| r.min().expect("row") >= b) {
                    continue;
                }
            }
            // Column sums of every arrangement of every row, convolved.
            let mut acc: HashMap<Vec<i32>, u64> = HashMap::from([(vec![0; n], 1)]);
            for row in &cut {
                let vals = row.to_vec();
                let mut next: HashMap<Vec<i32>, u64> = HashMap::with_capacity(acc.len() * self.perms.len());
                for (sums, c) in &acc {
                    for p in self.perms.iter() {
                        let v: Vec<i32> = (0..n).map(|j| sums[j] + vals[p[j] as usize] as i32).collect();
                        *next.entry(v).or_insert(0) += c;
                    }
                }
                acc = next;
            }
            for (sums, c) in acc {
                let key: Vec<i32> = match side {
                    Half::Upper => sums,
                    Half::Lower => sums.iter().map(|s| self.m as i32 - s).collect(),
                };
                let weight = c.checked_mul(orderings).ok_or(Error::Overflow("half table"))?;
                table.add(Profile::new(&key)?, weight)?;
            }
        }
        Ok(table)
    }

    /// Squares whose upper half holds `pair.upper`, within the scope.
    pub fn count_pair(&self, pair: &ULPair, scope: PairScope) -> Result<u64> {
        if pair.order != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: pair.order });
        }
        let bound = match scope {
            PairScope::All => None,
            PairScope::RowMinOrdered => pair.lower.min(),
        };
        let upper = self.count_half(pair.upper, Half::Upper, bound)?;
        if upper.is_empty() {
            return Ok(0);
        }
        let lower = self.count_half(pair.lower, Half::Lower, None)?;
        combine(&upper, &lower)
    }
}

/// Unordered cuts of `values` into `rows` family members; each cut lists
/// its rows by increasing minimum.
fn cut_rows(
    fam: &[NumberSet],
    values: NumberSet,
    rows: usize,
    cur: &mut Vec<NumberSet>,
    out: &mut Vec<Vec<NumberSet>>,
) {
    if values.is_empty() {
        if cur.len() == rows {
            out.push(cur.clone());
        }
        return;
    }
    let lo = values.min().expect("non-empty");
    for &r in fam {
        if r.contains(lo) && r.is_subset(values) {
            cur.push(r);
            cut_rows(fam, values.difference(r), rows, cur, out);
            cur.pop();
        }
    }
}

/// Column sums of the upper rows of a square.
pub fn profile_of_upper(rows: &[Vec<u32>]) -> Result<Profile> {
    half_profile(rows, |_, s| s)
}

/// `M` minus the column sums of the lower rows of a square.
pub fn profile_of_lower(rows: &[Vec<u32>]) -> Result<Profile> {
    let n = rows.first().map_or(0, Vec::len);
    let m = magic_sum(n.max(1))? as i32;
    half_profile(rows, |_, s| m - s)
}

fn half_profile(rows: &[Vec<u32>], f: impl Fn(usize, i32) -> i32) -> Result<Profile> {
    let n = rows.first().map_or(0, Vec::len);
    if n == 0 || n % 2 == 1 || rows.len() != n / 2 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n / 2, actual: rows.len() });
    }
    let comps: Vec<i32> = (0..n).map(|j| f(j, rows.iter().map(|r| r[j] as i32).sum())).collect();
    Profile::new(&comps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SemiTotal {
    pub order: usize,
    pub scope: PairScope,
    pub pairs: u64,
    pub pair_sum: u128,
    /// All semi-magic squares, rotations and reflections included.
    pub raw_total: u128,
    pub reduced_total: u128,
}

/// Sums pair counts over every upper-half set of the scope.
pub fn total_semi(n: usize, scope: PairScope) -> Result<SemiTotal> {
    let set = gen_ul_pairs(n, scope)?;
    let ctx = SemiContext::new(n)?;
    let mut sum: u128 = 0;
    for pair in set.iter() {
        sum = sum.checked_add(ctx.count_pair(&pair, scope)? as u128).ok_or(Error::Overflow("semi total"))?;
    }
    let raw = sum * set.multiplier() as u128;
    Ok(SemiTotal { order: n, scope, pairs: set.len(), pair_sum: sum, raw_total: raw, reduced_total: raw / 8 })
}
