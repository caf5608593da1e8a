//! Associative squares by center/outer split and profile join.
//!
//! An odd-order square is cut into the three middle rows (the center block)
//! and the `(n-3)/2` mirrored row pairs around them (the outer block). Each
//! block is tabulated by the partial sums of its left-half columns; a center
//! block and an outer block combine into an associative magic square exactly
//! when their profiles agree.
//!
//! Internally both blocks are keyed by column differences. For a row `x`,
//! `d_j = x_j - x_{n+1-j}` over the left-half columns; the mirrored row is
//! forced by complementation, so a row pair adds `K + d_j` to column `j`
//! (with `K = n²+1`). The center profile is `K + d_j + m_j` where `m_j` is the
//! middle row's left-half value, and the outer profile is `M - hK - Σ d_j`
//! for `h` outer row pairs.

use std::ops::RangeInclusive;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::families::{gen_complement_free_rows, restrict_family, LineFamily, PairPool, SecondRowCache};
use crate::numberset::NumberSet;
use crate::perm::{is_column_canonical, PermTable};
use crate::profile::{DenseBox, Profile, ProfileTable};
use crate::square::{check_order, complement_constant, magic_sum, symmetric_row_perms, MAX_ORDER};

/// Number of orbit members represented by one canonical order-7 square.
pub const CANONICAL_GROUP_ORDER: u64 = 2304;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CountMode {
    /// Every arrangement is counted.
    Raw,
    /// Only canonical order-7 squares are counted.
    Canonical,
}

impl CountMode {
    pub fn name(self) -> &'static str {
        match self {
            CountMode::Raw => "raw",
            CountMode::Canonical => "canonical",
        }
    }
}

impl std::str::FromStr for CountMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(CountMode::Raw),
            "canonical" => Ok(CountMode::Canonical),
            other => Err(Error::InvalidPair(format!("unknown count mode {other:?}"))),
        }
    }
}

fn check_assoc_order(n: usize) -> Result<()> {
    check_order(n)?;
    if n.is_multiple_of(2) || n < 5 {
        return Err(Error::InvalidOrder { order: n, reason: "the split needs odd n >= 5" });
    }
    if n > MAX_ORDER {
        return Err(Error::InvalidOrder { order: n, reason: "values must fit in 64-bit sets (n <= 7)" });
    }
    Ok(())
}

fn check_mode(n: usize, mode: CountMode) -> Result<()> {
    if mode == CountMode::Canonical && n != 7 {
        return Err(Error::CanonicalOrder(n));
    }
    Ok(())
}

/// A split of `1..=n²` into center-block values and outer-block values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SplitPair {
    id: u64,
    order: usize,
    center: NumberSet,
    outer: NumberSet,
}

impl SplitPair {
    pub fn new(order: usize, id: u64, center: NumberSet) -> Result<Self> {
        check_assoc_order(order)?;
        let area = (order * order) as u32;
        let k = area + 1;
        let universe = NumberSet::range(area);
        if !center.is_subset(universe) {
            return Err(Error::InvalidPair(format!("{center:?} exceeds 1..={area}")));
        }
        if !center.contains(k / 2) {
            return Err(Error::InvalidPair("center block must hold the center value".into()));
        }
        if center.len() != 3 * order {
            return Err(Error::InvalidPair(format!("center block needs {} values, got {}", 3 * order, center.len())));
        }
        if !center.is_complement_closed(k) {
            return Err(Error::InvalidPair("center values are not complement-closed".into()));
        }
        Ok(SplitPair { id, order, center, outer: universe.difference(center) })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Values of the three middle rows.
    pub fn center(&self) -> NumberSet {
        self.center
    }

    /// Values of the outer row pairs.
    pub fn outer(&self) -> NumberSet {
        self.outer
    }

    /// Smaller member of every complement pair in the center block.
    pub fn center_minima(&self) -> NumberSet {
        let k = (self.order * self.order + 1) as u32;
        NumberSet::from_values(self.center.iter().filter(|&x| 2 * x < k))
    }
}

pub(crate) fn binomial(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Lexicographic indexing of the pair universe for one order and mode.
///
/// A pair is identified by the set of complement-pair minima assigned to the
/// center block. IDs start at 1 and follow lexicographic order of those sorted
/// minima; canonical mode fixes the pair `{1, n²}` in the center block.
#[derive(Debug, Clone)]
pub struct PairIndex {
    order: usize,
    mode: CountMode,
    forced: Vec<u32>,
    candidates: Vec<u32>,
    choose: usize,
    len: u64,
}

impl PairIndex {
    pub fn new(n: usize, mode: CountMode) -> Result<Self> {
        check_assoc_order(n)?;
        check_mode(n, mode)?;
        let pairs = ((n * n - 1) / 2) as u32;
        let take = (3 * n - 1) / 2;
        let (forced, candidates): (Vec<u32>, Vec<u32>) = match mode {
            CountMode::Raw => (vec![], (1..=pairs).collect()),
            CountMode::Canonical => (vec![1], (2..=pairs).collect()),
        };
        let choose = take - forced.len();
        let len = binomial(candidates.len() as u64, choose as u64);
        Ok(PairIndex { order: n, mode, forced, candidates, choose, len })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mode(&self) -> CountMode {
        self.mode
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The pair with the given 1-based ID.
    pub fn get(&self, id: u64) -> Result<SplitPair> {
        if id == 0 || id > self.len {
            return Err(Error::InvalidPair(format!("pair id {id} outside 1..={}", self.len)));
        }
        let mut rank = id - 1;
        let m = self.candidates.len();
        let mut left = self.choose;
        let mut minima: Vec<u32> = self.forced.clone();
        let mut i = 0;
        while left > 0 {
            let block = binomial((m - i - 1) as u64, (left - 1) as u64);
            if rank < block {
                minima.push(self.candidates[i]);
                left -= 1;
            } else {
                rank -= block;
            }
            i += 1;
        }
        self.pair_from_minima(id, &minima)
    }

    /// ID of a pair, if it belongs to this index.
    pub fn id_of(&self, center: NumberSet) -> Option<u64> {
        let k = (self.order * self.order + 1) as u32;
        let minima: Vec<u32> = center.iter().filter(|&x| 2 * x < k).collect();
        if minima.len() != self.forced.len() + self.choose || !self.forced.iter().all(|f| minima.contains(f)) {
            return None;
        }
        let chosen: Vec<u32> = minima.into_iter().filter(|x| !self.forced.contains(x)).collect();
        let m = self.candidates.len();
        let mut rank = 0u64;
        let mut left = self.choose;
        let mut ci = 0;
        for (i, &cand) in self.candidates.iter().enumerate() {
            if left == 0 {
                break;
            }
            if ci < chosen.len() && chosen[ci] == cand {
                ci += 1;
                left -= 1;
            } else {
                rank += binomial((m - i - 1) as u64, (left - 1) as u64);
            }
        }
        Some(rank + 1)
    }

    fn pair_from_minima(&self, id: u64, minima: &[u32]) -> Result<SplitPair> {
        let k = (self.order * self.order + 1) as u32;
        let mut center = NumberSet::EMPTY.with(k / 2);
        for &x in minima {
            center.insert(x);
            center.insert(k - x);
        }
        SplitPair::new(self.order, id, center)
    }

    pub fn iter(&self) -> impl Iterator<Item = SplitPair> + '_ {
        (1..=self.len).map(|id| self.get(id).expect("id within range"))
    }
}

/// All pairs for `(n, mode)` in ID order.
pub fn gen_pairs(n: usize, mode: CountMode) -> Result<Vec<SplitPair>> {
    let index = PairIndex::new(n, mode)?;
    // Walk combinations directly instead of unranking each ID.
    let m = index.candidates.len();
    let c = index.choose;
    let mut out = Vec::with_capacity(index.len as usize);
    let mut pos: Vec<usize> = (0..c).collect();
    let mut minima = Vec::with_capacity(index.forced.len() + c);
    let mut id = 0u64;
    loop {
        id += 1;
        minima.clear();
        minima.extend_from_slice(&index.forced);
        minima.extend(pos.iter().map(|&p| index.candidates[p]));
        out.push(index.pair_from_minima(id, &minima)?);
        // Advance to the next combination.
        let mut i = c;
        while i > 0 && pos[i - 1] == m - c + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return Ok(out);
        }
        pos[i - 1] += 1;
        for j in i..c {
            pos[j] = pos[j - 1] + 1;
        }
    }
}

/// Column-group element acting on left-half difference vectors: component
/// `j` of the image is `sign[j] * v[source[j]]`.
#[derive(Debug, Clone)]
struct ColumnAction {
    source: Vec<usize>,
    sign: Vec<i32>,
}

/// Shared, immutable state for counting pairs of one order.
pub struct AssocContext {
    n: usize,
    half: usize,
    outer_pairs: usize,
    k: u32,
    m: u32,
    rows: Arc<LineFamily>,
    perms: PermTable,
    canonical_perms: Vec<usize>,
    column_group: Vec<ColumnAction>,
    second_rows: SecondRowCache,
}

impl std::fmt::Debug for AssocContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AssocContext").field("order", &self.n).field("rows", &self.rows.len()).finish()
    }
}

impl AssocContext {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_rows(n, Arc::new(gen_complement_free_rows(n)?))
    }

    /// Uses a pre-generated complement-free row family (e.g. from a cache).
    pub fn with_rows(n: usize, rows: Arc<LineFamily>) -> Result<Self> {
        check_assoc_order(n)?;
        if rows.order() != n || !rows.complement_free() {
            return Err(Error::InvalidValueSet("row family does not match the order".into()));
        }
        let perms = PermTable::new(n)?;
        let canonical_perms = perms
            .iter()
            .enumerate()
            .filter(|(_, p)| is_column_canonical(&p.iter().map(|&x| x as u32).collect::<Vec<_>>()))
            .map(|(i, _)| i)
            .collect();
        let half = n / 2;
        let column_group = symmetric_row_perms(n)?
            .into_iter()
            .map(|p| {
                let mut source = Vec::with_capacity(half);
                let mut sign = Vec::with_capacity(half);
                for &img in p.iter().take(half) {
                    if img <= half {
                        source.push(img - 1);
                        sign.push(1);
                    } else {
                        source.push(n - img);
                        sign.push(-1);
                    }
                }
                ColumnAction { source, sign }
            })
            .collect();
        Ok(AssocContext {
            n,
            half,
            outer_pairs: (n - 3) / 2,
            k: complement_constant(n)?,
            m: magic_sum(n)?,
            rows,
            perms,
            canonical_perms,
            column_group,
            second_rows: SecondRowCache::new(),
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &LineFamily {
        &self.rows
    }

    pub fn second_row_cache(&self) -> &SecondRowCache {
        &self.second_rows
    }

    fn check_pair(&self, pair: &SplitPair, mode: CountMode) -> Result<()> {
        if pair.order != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: pair.order });
        }
        check_mode(self.n, mode)
    }

    /// Row orientation filter shared by the canonical row conditions: the row
    /// must have a smaller minimum than its mirrored row.
    fn below_mirror(&self, r: NumberSet) -> bool {
        r.min().expect("non-empty row") < self.k - r.max().expect("non-empty row")
    }

    /// Signed box offsets of the difference vector for each arrangement of `r`.
    fn arrangement_offsets(&self, r: NumberSet, only_canonical: bool, target: &DenseBox) -> Vec<isize> {
        let values = r.to_vec();
        let n = self.n;
        let mut d = vec![0i32; self.half];
        let mut emit = |p: &[u8], out: &mut Vec<isize>| {
            for (j, dj) in d.iter_mut().enumerate() {
                *dj = values[p[j] as usize] as i32 - values[p[n - 1 - j] as usize] as i32;
            }
            out.push(target.offset(&d));
        };
        let mut out = Vec::new();
        if only_canonical {
            out.reserve(self.canonical_perms.len());
            for &i in &self.canonical_perms {
                emit(self.perms.get(i), &mut out);
            }
        } else {
            out.reserve(self.perms.len());
            for p in self.perms.iter() {
                emit(p, &mut out);
            }
        }
        out
    }

    /// Offsets of the middle row's left-half values for every placement of
    /// the remaining complement pairs.
    fn middle_offsets(&self, minima: &[u32], target: &DenseBox) -> Vec<isize> {
        let mut out = Vec::new();
        let mut cur = vec![0i32; self.half];
        let mut used = vec![false; minima.len()];
        fn rec(
            ctx: &AssocContext,
            pos: usize,
            minima: &[u32],
            used: &mut [bool],
            cur: &mut [i32],
            target: &DenseBox,
            out: &mut Vec<isize>,
        ) {
            if pos == cur.len() {
                out.push(target.offset(cur));
                return;
            }
            for i in 0..minima.len() {
                if used[i] {
                    continue;
                }
                used[i] = true;
                for v in [minima[i], ctx.k - minima[i]] {
                    cur[pos] = v as i32;
                    rec(ctx, pos + 1, minima, used, cur, target, out);
                }
                used[i] = false;
            }
        }
        rec(self, 0, minima, &mut used, &mut cur, target, &mut out);
        out
    }

    fn center_box(&self) -> DenseBox {
        DenseBox::new(self.half, 2 * (self.n * self.n) as i32)
    }

    fn outer_box(&self) -> DenseBox {
        DenseBox::new(self.half, (self.outer_pairs * (self.n * self.n - 1)) as i32)
    }

    /// Center counts keyed by `d_j + m_j` (the center profile minus `K`).
    fn center_dense(&self, pair: &SplitPair, mode: CountMode) -> Result<Option<DenseBox>> {
        let k = self.k;
        let outer_min = pair.outer.min().unwrap_or(u32::MAX);
        let top_rows: Vec<NumberSet> = restrict_family(&self.rows, pair.center)
            .iter()
            .filter(|&r| mode == CountMode::Raw || (self.below_mirror(r) && r.min().expect("row") < outer_min))
            .collect();
        if top_rows.is_empty() {
            return Ok(None);
        }
        let mut acc = self.center_box();
        let base = acc.center() as isize;
        for r in top_rows {
            let rest =
                pair.center.difference(r).difference(r.complement_values(k)).difference(NumberSet::EMPTY.with(k / 2));
            let minima: Vec<u32> = rest.iter().filter(|&x| 2 * x < k).collect();
            debug_assert_eq!(minima.len(), self.half);
            let arrangements = self.arrangement_offsets(r, false, &acc);
            let middles = self.middle_offsets(&minima, &acc);
            let data = acc.data_mut();
            for &a in &arrangements {
                let row_base = base + a;
                for &b in &middles {
                    data[(row_base + b) as usize] += 1;
                }
            }
        }
        Ok(Some(acc))
    }

    /// Outer counts keyed by `D = Σ d` with canonical row and column
    /// conditions applied (one representative per row/column group orbit).
    fn outer_reduced(&self, pair: &SplitPair) -> Result<Option<DenseBox>> {
        let first_rows: Vec<NumberSet> =
            restrict_family(&self.rows, pair.outer).iter().filter(|&r| self.below_mirror(r)).collect();
        if first_rows.is_empty() {
            return Ok(None);
        }
        let mut acc = self.outer_box();
        let mut any = false;
        for r in first_rows {
            let offsets = self.arrangement_offsets(r, true, &acc);
            let pool = pair.outer.difference(r).difference(r.complement_values(self.k));
            any |= self.outer_level(1, pool, r.min().expect("row"), &offsets, &mut acc)?;
        }
        Ok(any.then_some(acc))
    }

    /// Places outer row pair number `level` (0-based) from `pool`, given the
    /// accumulated offsets of the rows above it.
    fn outer_level(
        &self,
        level: usize,
        pool: NumberSet,
        prev_min: u32,
        acc_offsets: &[isize],
        acc: &mut DenseBox,
    ) -> Result<bool> {
        let base = acc.center() as isize;
        if level == self.outer_pairs {
            let data = acc.data_mut();
            for &a in acc_offsets {
                data[(base + a) as usize] += 1;
            }
            return Ok(!acc_offsets.is_empty());
        }
        let candidates: Vec<NumberSet> = if level + 1 == self.outer_pairs {
            let fam = self.second_rows.get(&PairPool::new(self.n, pool)?)?;
            fam.iter().collect()
        } else {
            restrict_family(&self.rows, pool).iter().collect()
        };
        let mut any = false;
        for r in candidates {
            let lo = r.min().expect("row");
            if lo < prev_min || !self.below_mirror(r) {
                continue;
            }
            let offsets = self.arrangement_offsets(r, false, acc);
            if level + 1 == self.outer_pairs {
                let data = acc.data_mut();
                for &a in acc_offsets {
                    let row_base = base + a;
                    for &b in &offsets {
                        data[(row_base + b) as usize] += 1;
                    }
                }
                any = true;
            } else {
                let combined: Vec<isize> =
                    acc_offsets.iter().flat_map(|&a| offsets.iter().map(move |&b| a + b)).collect();
                let rest = pool.difference(r).difference(r.complement_values(self.k));
                any |= self.outer_level(level + 1, rest, lo, &combined, acc)?;
            }
        }
        Ok(any)
    }

    /// Sums the images of a reduced outer table under the row and column
    /// groups, recovering the raw table.
    fn expand_outer(&self, reduced: &DenseBox) -> Result<DenseBox> {
        let row_factor: u64 = (1u64 << self.outer_pairs) * (1..=self.outer_pairs as u64).product::<u64>();
        let mut out = self.outer_box();
        let mut img = vec![0i32; self.half];
        for (idx, count) in reduced.nonzero() {
            let v = reduced.vector(idx);
            let weight = count.checked_mul(row_factor).ok_or(Error::Overflow("outer expansion"))?;
            for g in &self.column_group {
                for j in 0..self.half {
                    img[j] = g.sign[j] * v[g.source[j]];
                }
                let slot = out.index(&img).expect("group preserves the box");
                let data = out.data_mut();
                data[slot] = data[slot].checked_add(weight).ok_or(Error::Overflow("outer expansion"))?;
            }
        }
        Ok(out)
    }

    fn outer_dense(&self, pair: &SplitPair, mode: CountMode) -> Result<Option<DenseBox>> {
        let Some(reduced) = self.outer_reduced(pair)? else {
            return Ok(None);
        };
        match mode {
            CountMode::Canonical => Ok(Some(reduced)),
            CountMode::Raw => Ok(Some(self.expand_outer(&reduced)?)),
        }
    }

    fn center_profile_key(&self, e: &[i32]) -> Profile {
        let p: Vec<i32> = e.iter().map(|&x| x + self.k as i32).collect();
        Profile::pack_unchecked(&p)
    }

    fn outer_profile_key(&self, d: &[i32]) -> Profile {
        let shift = self.m as i32 - (self.outer_pairs as u32 * self.k) as i32;
        let p: Vec<i32> = d.iter().map(|&x| shift - x).collect();
        Profile::pack_unchecked(&p)
    }

    pub fn count_center_parts(&self, pair: &SplitPair, mode: CountMode) -> Result<ProfileTable> {
        self.check_pair(pair, mode)?;
        match self.center_dense(pair, mode)? {
            None => Ok(ProfileTable::new()),
            Some(b) => b.to_table(|e| self.center_profile_key(e)),
        }
    }

    pub fn count_outer_parts(&self, pair: &SplitPair, mode: CountMode) -> Result<ProfileTable> {
        self.check_pair(pair, mode)?;
        match self.outer_dense(pair, mode)? {
            None => Ok(ProfileTable::new()),
            Some(b) => b.to_table(|d| self.outer_profile_key(d)),
        }
    }

    /// Number of squares (raw) or canonical squares built on this pair.
    pub fn count_pair(&self, pair: &SplitPair, mode: CountMode) -> Result<u64> {
        self.check_pair(pair, mode)?;
        let Some(center) = self.center_dense(pair, mode)? else {
            return Ok(0);
        };
        let Some(outer) = self.outer_dense(pair, mode)? else {
            return Ok(0);
        };
        // Center key e matches outer key D when K + e = M - hK - D.
        let shift = self.m as i32 - ((self.outer_pairs as u32 + 1) * self.k) as i32;
        let mut d = vec![0i32; self.half];
        let mut acc: u64 = 0;
        for (idx, c) in center.nonzero() {
            let e = center.vector(idx);
            for j in 0..self.half {
                d[j] = shift - e[j];
            }
            let o = outer.get(&d);
            if o != 0 {
                let prod = c.checked_mul(o).ok_or(Error::Overflow("pair join"))?;
                acc = acc.checked_add(prod).ok_or(Error::Overflow("pair join"))?;
            }
        }
        Ok(acc)
    }
}

/// Profile of a fully placed center block (three rows of length `n`).
pub fn profile_of_center(rows: &[Vec<u32>]) -> Result<Profile> {
    block_profile(rows, 3, |_, s| s)
}

/// Profile of a fully placed outer block: `M` minus each left-half column
/// sum over the `n - 3` outer rows.
pub fn profile_of_outer(rows: &[Vec<u32>]) -> Result<Profile> {
    let n = rows.first().map_or(0, Vec::len);
    let m = magic_sum(n.max(1))? as i32;
    block_profile(rows, n.saturating_sub(3), |_, s| m - s)
}

fn block_profile(rows: &[Vec<u32>], expect_rows: usize, f: impl Fn(usize, i32) -> i32) -> Result<Profile> {
    let n = rows.first().map_or(0, Vec::len);
    if n == 0 || n.is_multiple_of(2) {
        return Err(Error::InvalidOrder { order: n, reason: "block rows need odd length" });
    }
    if rows.len() != expect_rows || rows.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: expect_rows, actual: rows.len() });
    }
    if rows.iter().flatten().any(|&v| v == 0) {
        return Err(Error::MalformedSquare("block has unplaced cells".into()));
    }
    let comps: Vec<i32> = (0..n / 2).map(|j| f(j, rows.iter().map(|r| r[j] as i32).sum())).collect();
    Profile::new(&comps)
}

/// Result of summing pair counts over an ID range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssocTotal {
    pub order: usize,
    pub mode: CountMode,
    pub pairs_counted: u64,
    /// False when only part of the ID space was summed.
    pub complete: bool,
    /// Sum of per-pair counts as produced by the engine.
    pub pair_sum: u128,
    /// All squares: the pair sum, times the group order in canonical mode.
    pub raw_total: u128,
    /// Squares up to rotation and reflection.
    pub reduced_total: u128,
}

impl AssocTotal {
    pub fn from_pair_sum(order: usize, mode: CountMode, pairs_counted: u64, complete: bool, pair_sum: u128) -> Self {
        let raw_total = match mode {
            CountMode::Raw => pair_sum,
            CountMode::Canonical => pair_sum * CANONICAL_GROUP_ORDER as u128,
        };
        AssocTotal { order, mode, pairs_counted, complete, pair_sum, raw_total, reduced_total: raw_total / 8 }
    }
}

/// Sums `count_pair` over all pairs, or over an ID range.
pub fn total_assoc(n: usize, mode: CountMode, ids: Option<RangeInclusive<u64>>) -> Result<AssocTotal> {
    let index = PairIndex::new(n, mode)?;
    let ctx = AssocContext::new(n)?;
    let range = ids.unwrap_or(1..=index.len());
    if *range.start() == 0 || *range.end() > index.len() || range.start() > range.end() {
        return Err(Error::InvalidRange(format!("{range:?} outside 1..={}", index.len())));
    }
    let complete = *range.start() == 1 && *range.end() == index.len();
    let mut sum: u128 = 0;
    let mut counted = 0;
    for id in range {
        let pair = index.get(id)?;
        sum = sum.checked_add(ctx.count_pair(&pair, mode)? as u128).ok_or(Error::Overflow("total"))?;
        counted += 1;
    }
    Ok(AssocTotal::from_pair_sum(n, mode, counted, complete, sum))
}
