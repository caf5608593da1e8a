//! Independent enumerators used as ground truth.
//!
//! [`count_backtrack`] fills whole squares cell by cell. The `enumerate_*`
//! functions rebuild block tables by placing explicit rows, without line
//! families, difference keys or second-row memoization; they exist to be
//! compared against the split counters.

use std::collections::HashMap;
use std::rc::Rc;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::numberset::NumberSet;
use crate::perm::next_permutation;
use crate::profile::{Profile, ProfileTable};
use crate::square::{check_order, complement_constant, magic_sum, symmetric_row_perms, Square, MAX_ORDER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchKind {
    SemiMagic,
    Magic,
    Associative,
}

impl SearchKind {
    pub fn name(self) -> &'static str {
        match self {
            SearchKind::SemiMagic => "semi-magic",
            SearchKind::Magic => "magic",
            SearchKind::Associative => "associative",
        }
    }
}

impl std::str::FromStr for SearchKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "semi-magic" | "semi_magic" | "semi" => Ok(SearchKind::SemiMagic),
            "magic" => Ok(SearchKind::Magic),
            "associative" | "assoc" => Ok(SearchKind::Associative),
            other => Err(Error::InvalidValueSet(format!("unknown search kind {other:?}"))),
        }
    }
}

/// Search limits; exceeding either one aborts with [`Error::BudgetExceeded`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

impl Budget {
    pub const UNLIMITED: Budget = Budget { max_nodes: None, max_time: None };

    pub fn nodes(max_nodes: u64) -> Self {
        Budget { max_nodes: Some(max_nodes), max_time: None }
    }

    pub fn time(max_time: Duration) -> Self {
        Budget { max_nodes: None, max_time: Some(max_time) }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::UNLIMITED
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountReport {
    pub order: usize,
    pub kind: SearchKind,
    /// Every square of the kind, all rotations and reflections included.
    pub raw_count: u64,
    /// `raw_count / 8`.
    pub reduced_count: u64,
    pub nodes: u64,
    pub elapsed: Duration,
}

struct Meter {
    start: Instant,
    nodes: u64,
    budget: Budget,
}

impl Meter {
    fn new(budget: Budget) -> Self {
        Meter { start: Instant::now(), nodes: 0, budget }
    }

    #[inline]
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if let Some(max) = self.budget.max_nodes {
            if self.nodes > max {
                return Err(self.exceeded());
            }
        }
        if self.nodes & 0xF_FFFF == 0 {
            if let Some(max) = self.budget.max_time {
                if self.start.elapsed() > max {
                    return Err(self.exceeded());
                }
            }
        }
        Ok(())
    }

    fn exceeded(&self) -> Error {
        Error::BudgetExceeded { nodes: self.nodes, elapsed_ms: self.start.elapsed().as_millis() }
    }
}

#[derive(Debug, Clone, Copy)]
enum Step {
    /// Branch over every free value for the cell.
    Choose(usize),
    /// The line's last open cell takes whatever value completes the sum.
    Force { cell: usize, line: usize },
    /// The line is complete; its sum must match.
    Check(usize),
}

/// A fixed search schedule. Which cells are known after each step does not
/// depend on the values chosen, so propagation is resolved once up front.
struct Plan {
    n: usize,
    k: u32,
    target: i32,
    lines: Vec<Vec<usize>>,
    cell_lines: Vec<Vec<usize>>,
    mirror: Option<Vec<usize>>,
    preset: Vec<(usize, u32)>,
    steps: Vec<Step>,
}

impl Plan {
    fn new(n: usize, kind: SearchKind) -> Result<Self> {
        check_order(n)?;
        if n > MAX_ORDER {
            return Err(Error::InvalidOrder { order: n, reason: "search supports n <= 7" });
        }
        let area = n * n;
        let mut lines: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            lines.push((0..n).map(|j| i * n + j).collect());
        }
        for j in 0..n {
            lines.push((0..n).map(|i| i * n + j).collect());
        }
        if kind != SearchKind::SemiMagic {
            lines.push((0..n).map(|i| i * n + i).collect());
            lines.push((0..n).map(|i| i * n + (n - 1 - i)).collect());
        }
        let mut cell_lines = vec![Vec::new(); area];
        for (l, cells) in lines.iter().enumerate() {
            for &c in cells {
                cell_lines[c].push(l);
            }
        }
        let k = complement_constant(n)?;
        let mirror = (kind == SearchKind::Associative).then(|| (0..area).map(|c| area - 1 - c).collect::<Vec<_>>());
        let mut preset = Vec::new();
        if mirror.is_some() && n % 2 == 1 {
            preset.push((area / 2, k / 2));
        }
        let mut plan =
            Plan { n, k, target: magic_sum(n)? as i32, lines, cell_lines, mirror, preset, steps: Vec::new() };
        plan.schedule();
        Ok(plan)
    }

    fn schedule(&mut self) {
        let area = self.n * self.n;
        let mut known = vec![false; area];
        let mut checked = vec![false; self.lines.len()];
        let mut steps = Vec::new();
        let mirror = self.mirror.clone();
        let set = |known: &mut Vec<bool>, c: usize| {
            known[c] = true;
            if let Some(m) = &mirror {
                known[m[c]] = true;
            }
        };
        for &(c, _) in &self.preset {
            set(&mut known, c);
        }
        // A line whose cells are closed under mirroring sums correctly on its
        // own once complements hold; it cannot guide the search.
        let closed: Vec<bool> = self
            .lines
            .iter()
            .map(|cells| mirror.as_ref().is_some_and(|m| cells.iter().all(|c| cells.contains(&m[*c]))))
            .collect();
        loop {
            // Propagate to a fixpoint.
            loop {
                let mut progressed = false;
                for l in 0..self.lines.len() {
                    if checked[l] {
                        continue;
                    }
                    let open: Vec<usize> = self.lines[l].iter().copied().filter(|&c| !known[c]).collect();
                    if open.is_empty() {
                        steps.push(Step::Check(l));
                        checked[l] = true;
                        progressed = true;
                    } else if open.len() == 1 && !closed[l] {
                        steps.push(Step::Force { cell: open[0], line: l });
                        set(&mut known, open[0]);
                        progressed = true;
                    }
                }
                if !progressed {
                    break;
                }
            }
            if known.iter().all(|&x| x) {
                break;
            }
            let best = (0..self.lines.len())
                .filter(|&l| !closed[l])
                .map(|l| (self.lines[l].iter().filter(|&&c| !known[c]).count(), l))
                .filter(|&(open, _)| open > 0)
                .min();
            let cell = match best {
                Some((_, l)) => *self.lines[l].iter().find(|&&c| !known[c]).expect("open cell"),
                None => (0..area).find(|&c| !known[c]).expect("open cell"),
            };
            steps.push(Step::Choose(cell));
            set(&mut known, cell);
        }
        self.steps = steps;
    }
}

struct Search<'a> {
    plan: &'a Plan,
    vals: Vec<u32>,
    sums: Vec<i32>,
    open: Vec<u8>,
    used: u64,
    meter: Meter,
    found: u64,
    stop_at_first: bool,
    first: Option<Vec<u32>>,
}

impl<'a> Search<'a> {
    fn new(plan: &'a Plan, budget: Budget, stop_at_first: bool) -> Self {
        let area = plan.n * plan.n;
        let mut s = Search {
            plan,
            vals: vec![0; area],
            sums: vec![0; plan.lines.len()],
            open: plan.lines.iter().map(|l| l.len() as u8).collect(),
            used: 0,
            meter: Meter::new(budget),
            found: 0,
            stop_at_first,
            first: None,
        };
        for &(c, v) in &plan.preset {
            s.place(c, v);
        }
        s
    }

    #[inline]
    fn place(&mut self, c: usize, v: u32) {
        self.vals[c] = v;
        self.used |= 1 << v;
        for &l in &self.plan.cell_lines[c] {
            self.sums[l] += v as i32;
            self.open[l] -= 1;
        }
    }

    #[inline]
    fn unplace(&mut self, c: usize) {
        let v = self.vals[c];
        self.vals[c] = 0;
        self.used &= !(1 << v);
        for &l in &self.plan.cell_lines[c] {
            self.sums[l] -= v as i32;
            self.open[l] += 1;
        }
    }

    /// Places `v` at `c` (and its complement at the mirror cell); false when
    /// the values are unavailable.
    #[inline]
    fn assign(&mut self, c: usize, v: u32) -> bool {
        if self.used >> v & 1 == 1 {
            return false;
        }
        match &self.plan.mirror {
            None => {
                self.place(c, v);
                true
            }
            Some(m) => {
                let w = self.plan.k - v;
                if w == v || self.used >> w & 1 == 1 {
                    return false;
                }
                let mc = m[c];
                self.place(c, v);
                self.place(mc, w);
                true
            }
        }
    }

    #[inline]
    fn release(&mut self, c: usize) {
        if let Some(m) = &self.plan.mirror {
            let mc = m[c];
            self.unplace(mc);
        }
        self.unplace(c);
    }

    /// Every line touched by `c` can still reach its target with the values
    /// left.
    fn feasible(&self, c: usize) -> bool {
        let cells = std::iter::once(c).chain(self.plan.mirror.as_ref().map(|m| m[c]));
        let area = (self.plan.n * self.plan.n) as u32;
        let free = !self.used & (((1u64 << (area + 1)) - 1) & !1);
        for cell in cells {
            for &l in &self.plan.cell_lines[cell] {
                let open = self.open[l] as u32;
                if open == 0 {
                    continue;
                }
                let need = self.plan.target - self.sums[l];
                let mut lo = 0i32;
                let mut hi = 0i32;
                let mut low_bits = free;
                let mut high_bits = free;
                for _ in 0..open {
                    if low_bits == 0 {
                        return false;
                    }
                    let a = low_bits.trailing_zeros();
                    low_bits &= low_bits - 1;
                    lo += a as i32;
                    let b = 63 - high_bits.leading_zeros();
                    high_bits &= !(1 << b);
                    hi += b as i32;
                }
                if need < lo || need > hi {
                    return false;
                }
            }
        }
        true
    }

    fn run(&mut self, step: usize) -> Result<()> {
        if step == self.plan.steps.len() {
            self.found += 1;
            if self.stop_at_first && self.first.is_none() {
                self.first = Some(self.vals.clone());
            }
            return Ok(());
        }
        match self.plan.steps[step] {
            Step::Check(l) => {
                if self.sums[l] == self.plan.target {
                    self.run(step + 1)?;
                }
            }
            Step::Force { cell, line } => {
                let v = self.plan.target - self.sums[line];
                let area = (self.plan.n * self.plan.n) as i32;
                if v >= 1 && v <= area && self.assign(cell, v as u32) {
                    if self.feasible(cell) {
                        self.run(step + 1)?;
                    }
                    self.release(cell);
                }
            }
            Step::Choose(cell) => {
                let area = (self.plan.n * self.plan.n) as u32;
                for v in 1..=area {
                    if self.stop_at_first && self.first.is_some() {
                        break;
                    }
                    self.meter.tick()?;
                    if self.assign(cell, v) {
                        if self.feasible(cell) {
                            self.run(step + 1)?;
                        }
                        self.release(cell);
                    }
                }
            }
        }
        Ok(())
    }
}

/// Counts every square of the kind by exhaustive backtracking.
pub fn count_backtrack(n: usize, kind: SearchKind, budget: Budget) -> Result<CountReport> {
    let plan = Plan::new(n, kind)?;
    let mut search = Search::new(&plan, budget, false);
    search.run(0)?;
    let raw = search.found;
    Ok(CountReport {
        order: n,
        kind,
        raw_count: raw,
        reduced_count: raw / 8,
        nodes: search.meter.nodes,
        elapsed: search.meter.start.elapsed(),
    })
}

/// The first square of the kind in search order, or `None` when none exists.
pub fn find_one(n: usize, kind: SearchKind, budget: Budget) -> Result<Option<Square>> {
    if n < 3 {
        return Err(Error::InvalidOrder { order: n, reason: "find_one needs n >= 3" });
    }
    let plan = Plan::new(n, kind)?;
    let mut search = Search::new(&plan, budget, true);
    search.run(0)?;
    search.first.map(|cells| Square::new(n, cells)).transpose()
}

fn check_block_set(n: usize, values: NumberSet, expect: usize, with_center: bool) -> Result<u32> {
    check_order(n)?;
    if n.is_multiple_of(2) || !(5..=MAX_ORDER).contains(&n) {
        return Err(Error::InvalidOrder { order: n, reason: "block enumeration needs odd 5 <= n <= 7" });
    }
    let k = complement_constant(n)?;
    if !values.is_subset(NumberSet::range((n * n) as u32)) || values.len() != expect {
        return Err(Error::InvalidValueSet(format!("{values:?} is not a block value set of size {expect}")));
    }
    if !values.is_complement_closed(k) {
        return Err(Error::InvalidValueSet(format!("{values:?} is not complement-closed")));
    }
    if values.contains(k / 2) != with_center {
        return Err(Error::InvalidValueSet("center value misplaced".into()));
    }
    Ok(k)
}

/// `n`-subsets of `values` summing to `target` with no complementary pair,
/// by plain recursion over the sorted values.
fn direct_rows(values: &[u32], n: usize, target: u32, k: u32) -> Vec<Vec<u32>> {
    fn rec(values: &[u32], start: usize, n: usize, left: u32, k: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for i in start..values.len() {
            let v = values[i];
            if v > left {
                break;
            }
            if cur.iter().any(|&x| x + v == k) {
                continue;
            }
            cur.push(v);
            rec(values, i + 1, n, left - v, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(values, 0, n, target, k, &mut Vec::new(), &mut out);
    out
}

/// Every ordering of `row`, by repeated lexicographic successor.
fn orderings(row: &[u32]) -> Vec<Vec<u32>> {
    let mut cur = row.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

/// Direct center-block table: every row-3 set taken from the center values,
/// every ordering of it, every middle row; profiles summed from the rows.
pub fn enumerate_center_parts_direct(n: usize, center: NumberSet, canonical: bool) -> Result<ProfileTable> {
    let k = check_block_set(n, center, 3 * n, true)?;
    if canonical && n != 7 {
        return Err(Error::CanonicalOrder(n));
    }
    let m = magic_sum(n)?;
    let c = k / 2;
    let half = n / 2;
    let outer_min = NumberSet::range((n * n) as u32).difference(center).min().unwrap_or(u32::MAX);
    let pool: Vec<u32> = center.iter().filter(|&v| v != c).collect();
    let mut table = ProfileTable::new();
    for top in direct_rows(&pool, n, m, k) {
        let lo = top[0];
        let hi = top[n - 1];
        if canonical && !(lo < k - hi && lo < outer_min) {
            continue;
        }
        let rest: Vec<u32> = pool.iter().copied().filter(|v| !top.contains(v) && !top.contains(&(k - v))).collect();
        let middles = middle_rows(&rest, n, k);
        for row in orderings(&top) {
            let bottom: Vec<u32> = (0..n).map(|j| k - row[n - 1 - j]).collect();
            for mid in &middles {
                let cols: Vec<i32> = (0..n).map(|j| (row[j] + mid[j] + bottom[j]) as i32).collect();
                debug_assert!((0..half).all(|j| cols[j] + cols[n - 1 - j] == 3 * k as i32));
                debug_assert_eq!(cols[half], 3 * c as i32);
                table.increment(Profile::new(&cols[..half])?)?;
            }
        }
    }
    Ok(table)
}

/// Middle rows: the center value in the middle, complementary values at
/// mirrored positions.
fn middle_rows(rest: &[u32], n: usize, k: u32) -> Vec<Vec<u32>> {
    let half = n / 2;
    let mut out = Vec::new();
    let mut row = vec![0u32; n];
    row[half] = k / 2;
    fn rec(pos: usize, half: usize, n: usize, k: u32, rest: &[u32], row: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == half {
            out.push(row.clone());
            return;
        }
        for &v in rest {
            if row[..pos].contains(&v) || row[..pos].contains(&(k - v)) {
                continue;
            }
            row[pos] = v;
            row[n - 1 - pos] = k - v;
            rec(pos + 1, half, n, k, rest, row, out);
        }
    }
    rec(0, half, n, k, rest, &mut row, &mut out);
    out
}

/// Accumulator over outer column sums of the left-half columns.
struct ColumnCounter {
    half: usize,
    lo: i32,
    width: usize,
    data: Vec<u64>,
}

impl ColumnCounter {
    fn new(half: usize, lo: i32, hi: i32) -> Self {
        let width = (hi - lo + 1) as usize;
        ColumnCounter { half, lo, width, data: vec![0; width.pow(half as u32)] }
    }

    fn slot(&self, sums: &[i32]) -> usize {
        sums.iter().rev().fold(0usize, |acc, &s| acc * self.width + (s - self.lo) as usize)
    }

    fn sums(&self, mut slot: usize) -> Vec<i32> {
        (0..self.half)
            .map(|_| {
                let s = (slot % self.width) as i32 + self.lo;
                slot /= self.width;
                s
            })
            .collect()
    }
}

/// Direct outer-block table.
///
/// Rows are placed as (top row, mirrored bottom row) pairs from the outside
/// in. Canonical mode (n = 7) applies the canonical row-minimum and
/// first-row column conditions to explicit rows. Raw mode with one outer row
/// pair places every ordering. Raw mode with two or more pairs keeps only
/// outermost-row orderings satisfying the first-row column condition, then
/// sums the images of the resulting column sums under all symmetric column
/// permutations; each raw block has exactly one such representative.
///
/// The innermost row's orderings are tallied once per row set and added as
/// a histogram of column-sum increments.
pub fn enumerate_outer_parts_direct(n: usize, outer: NumberSet, canonical: bool) -> Result<ProfileTable> {
    let h = (n.max(3) - 3) / 2;
    let k = check_block_set(n, outer, 2 * h * n, false)?;
    if canonical && n != 7 {
        return Err(Error::CanonicalOrder(n));
    }
    let m = magic_sum(n)? as i32;
    let half = n / 2;
    let pool: Vec<u32> = outer.iter().collect();
    let area = (n * n) as i32;
    let anchored = !canonical && h >= 2;

    type Increments = Vec<([i32; 3], u64)>;
    struct Frame {
        n: usize,
        h: usize,
        k: u32,
        m: u32,
        canonical: bool,
        anchored: bool,
        counter: ColumnCounter,
        tallies: HashMap<NumberSet, Rc<Increments>>,
    }
    fn column_canonical(row: &[u32]) -> bool {
        let n = row.len();
        let half = n / 2;
        (0..half).all(|j| row[j] < row[n - 1 - j]) && (1..half).all(|j| row[j - 1] < row[j])
    }
    // Left-half column-sum increments of a top row and its mirrored bottom row.
    fn increments(row: &[u32], k: u32) -> [i32; 3] {
        let n = row.len();
        let mut inc = [0i32; 3];
        for (j, slot) in inc.iter_mut().enumerate().take(n / 2) {
            *slot = (row[j] + k - row[n - 1 - j]) as i32;
        }
        inc
    }
    fn tally(f: &mut Frame, set: &[u32]) -> Rc<Increments> {
        let key = NumberSet::from_values(set.iter().copied());
        if let Some(t) = f.tallies.get(&key) {
            return Rc::clone(t);
        }
        let mut hist: HashMap<[i32; 3], u64> = HashMap::new();
        for row in orderings(set) {
            *hist.entry(increments(&row, f.k)).or_insert(0) += 1;
        }
        let t = Rc::new(hist.into_iter().collect::<Increments>());
        f.tallies.insert(key, Rc::clone(&t));
        t
    }
    fn place(f: &mut Frame, level: usize, pool: &[u32], prev_min: u32, acc: [i32; 3]) {
        let half = f.n / 2;
        for set in direct_rows(pool, f.n, f.m, f.k) {
            let lo = set[0];
            if f.canonical && !(lo < f.k - set[f.n - 1] && lo > prev_min) {
                continue;
            }
            if level + 1 == f.h && !(level == 0 && (f.canonical || f.anchored)) {
                for (inc, count) in tally(f, &set).iter() {
                    let mut sums = acc;
                    for j in 0..half {
                        sums[j] += inc[j];
                    }
                    let slot = f.counter.slot(&sums[..half]);
                    f.counter.data[slot] += count;
                }
                continue;
            }
            let rest: Vec<u32> =
                pool.iter().copied().filter(|v| !set.contains(v) && !set.contains(&(f.k - v))).collect();
            for row in orderings(&set) {
                if level == 0 && (f.canonical || f.anchored) && !column_canonical(&row) {
                    continue;
                }
                let inc = increments(&row, f.k);
                let mut next = acc;
                for j in 0..half {
                    next[j] += inc[j];
                }
                if level + 1 == f.h {
                    let slot = f.counter.slot(&next[..half]);
                    f.counter.data[slot] += 1;
                } else {
                    place(f, level + 1, &rest, lo, next);
                }
            }
        }
    }
    let mut frame = Frame {
        n,
        h,
        k,
        m: m as u32,
        canonical,
        anchored,
        counter: ColumnCounter::new(half, 2 * h as i32, 2 * h as i32 * area),
        tallies: HashMap::new(),
    };
    if h > 0 {
        place(&mut frame, 0, &pool, 0, [0; 3]);
    }
    let counter = frame.counter;

    let mut table = ProfileTable::new();
    let column_perms = if anchored { symmetric_row_perms(n)? } else { vec![(1..=n).collect()] };
    let total = 2 * h as i32 * k as i32;
    for (slot, &count) in counter.data.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let left = counter.sums(slot);
        // Full column sums: mirrored columns add up to 2hK, the middle one is hK.
        let mut full = vec![0i32; n];
        for j in 0..half {
            full[j] = left[j];
            full[n - 1 - j] = total - left[j];
        }
        full[half] = total / 2;
        for gamma in &column_perms {
            let img: Vec<i32> = (0..half).map(|j| m - full[gamma[j] - 1]).collect();
            table.add(Profile::new(&img)?, count)?;
        }
    }
    Ok(table)
}

/// Direct table for one half of an even-order square: ordered rows built
/// value by value from `values`, each summing to the magic constant.
/// Upper halves are keyed by column sums, lower halves by `M` minus them.
pub fn enumerate_half_direct(n: usize, values: NumberSet, upper: bool) -> Result<ProfileTable> {
    check_order(n)?;
    if n % 2 == 1 || n > 6 {
        return Err(Error::InvalidOrder { order: n, reason: "half enumeration needs even n <= 6" });
    }
    let m = magic_sum(n)? as i32;
    if values.len() != n * n / 2 || !values.is_subset(NumberSet::range((n * n) as u32)) {
        return Err(Error::InvalidValueSet(format!("{values:?} is not a half of size {}", n * n / 2)));
    }
    let mut table = ProfileTable::new();
    let mut grid = vec![0u32; n * n / 2];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        n: usize,
        m: i32,
        cell: usize,
        row_sum: i32,
        avail: NumberSet,
        grid: &mut Vec<u32>,
        upper: bool,
        table: &mut ProfileTable,
    ) -> Result<()> {
        if cell == grid.len() {
            let cols: Vec<i32> = (0..n)
                .map(|j| {
                    let s: i32 = (0..n / 2).map(|i| grid[i * n + j] as i32).sum();
                    if upper {
                        s
                    } else {
                        m - s
                    }
                })
                .collect();
            return table.increment(Profile::new(&cols)?);
        }
        let col = cell % n;
        for v in avail.iter() {
            let s = row_sum + v as i32;
            let last = col == n - 1;
            if (last && s != m) || (!last && s >= m) {
                continue;
            }
            grid[cell] = v;
            let mut rest = avail;
            rest.remove(v);
            rec(n, m, cell + 1, if last { 0 } else { s }, rest, grid, upper, table)?;
        }
        Ok(())
    }
    rec(n, m, 0, 0, values, &mut grid, upper, &mut table)?;
    Ok(table)
}
