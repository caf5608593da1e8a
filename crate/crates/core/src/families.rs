//! Line families: the value sets eligible to fill one row of a square.

use std::collections::HashMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::numberset::NumberSet;
use crate::square::{check_order, complement_constant, magic_sum, MAX_ORDER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// `n`-subsets avoiding the center value and internal complement pairs.
    ComplementFreeRows,
    /// Any `n`-subset of `1..=n²` with the magic sum.
    SemiLines,
    /// One value from each complement pair of a pool.
    SecondRows,
}

impl FamilyKind {
    fn tag(self) -> u8 {
        match self {
            FamilyKind::ComplementFreeRows => 1,
            FamilyKind::SemiLines => 2,
            FamilyKind::SecondRows => 3,
        }
    }

    fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            1 => Some(FamilyKind::ComplementFreeRows),
            2 => Some(FamilyKind::SemiLines),
            3 => Some(FamilyKind::SecondRows),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineFamily {
    order: usize,
    target: u32,
    complement_free: bool,
    kind: FamilyKind,
    members: Vec<NumberSet>,
}

impl LineFamily {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn target(&self) -> u32 {
        self.target
    }

    pub fn complement_free(&self) -> bool {
        self.complement_free
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn members(&self) -> &[NumberSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = NumberSet> + '_ {
        self.members.iter().copied()
    }

    pub fn contains(&self, s: NumberSet) -> bool {
        self.members.binary_search_by(|m| m.lex_cmp(s)).is_ok()
    }
}

fn check_bits(n: usize) -> Result<()> {
    check_order(n)?;
    if n > MAX_ORDER {
        return Err(Error::InvalidOrder { order: n, reason: "values must fit in 64-bit sets (n <= 7)" });
    }
    Ok(())
}

/// Depth-first subset search over the ascending values of `avail`, choosing
/// `k` values summing to `target`. `complement` (when set) forbids picking
/// both `x` and `complement - x`. Emits in lexicographic order.
pub(crate) fn subsets_with_sum(
    avail: NumberSet,
    k: usize,
    target: u32,
    complement: Option<u32>,
    out: &mut Vec<NumberSet>,
) {
    let values = avail.to_vec();
    // suffix_min[i][c]: smallest sum of c values from values[i..]
    let len = values.len();
    let mut chosen = NumberSet::EMPTY;
    fn rec(
        values: &[u32],
        start: usize,
        k: usize,
        target: u32,
        complement: Option<u32>,
        chosen: &mut NumberSet,
        out: &mut Vec<NumberSet>,
    ) {
        if k == 0 {
            if target == 0 {
                out.push(*chosen);
            }
            return;
        }
        let len = values.len();
        for i in start..len {
            if len - i < k {
                return;
            }
            let v = values[i];
            // Ascending values: the k smallest remaining already overshoot.
            let low: u32 = values[i..i + k].iter().sum();
            if low > target {
                return;
            }
            let high: u32 = values[len - k..].iter().sum();
            if high < target {
                return;
            }
            if let Some(c) = complement {
                if v < c && chosen.contains(c - v) {
                    continue;
                }
            }
            chosen.insert(v);
            rec(values, i + 1, k - 1, target - v, complement, chosen, out);
            chosen.remove(v);
        }
    }
    if len >= k {
        rec(&values, 0, k, target, complement, &mut chosen, out);
    }
}

/// All `n`-subsets of `{1..=n²} \ {(n²+1)/2}` with the magic sum and no two
/// members summing to `n²+1`.
pub fn gen_complement_free_rows(n: usize) -> Result<LineFamily> {
    check_bits(n)?;
    if n.is_multiple_of(2) || n < 3 {
        return Err(Error::InvalidOrder { order: n, reason: "complement-free rows need odd n >= 3" });
    }
    let k = complement_constant(n)?;
    let target = magic_sum(n)?;
    let mut avail = NumberSet::range((n * n) as u32);
    avail.remove(k / 2);
    let mut members = Vec::new();
    subsets_with_sum(avail, n, target, Some(k), &mut members);
    Ok(LineFamily { order: n, target, complement_free: true, kind: FamilyKind::ComplementFreeRows, members })
}

/// All `n`-subsets of `{1..=n²}` with the magic sum.
pub fn gen_semi_line_family(n: usize) -> Result<LineFamily> {
    check_bits(n)?;
    let target = magic_sum(n)?;
    let mut members = Vec::new();
    subsets_with_sum(NumberSet::range((n * n) as u32), n, target, None, &mut members);
    Ok(LineFamily { order: n, target, complement_free: false, kind: FamilyKind::SemiLines, members })
}

/// Members contained in `allowed`, order preserved.
pub fn restrict_family(family: &LineFamily, allowed: NumberSet) -> LineFamily {
    LineFamily { members: family.members.iter().copied().filter(|m| m.is_subset(allowed)).collect(), ..family.clone() }
}

/// A complement-closed value set without the center value, i.e. a union of
/// complement pairs `{x, n²+1-x}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairPool {
    order: usize,
    values: NumberSet,
}

impl PairPool {
    pub fn new(order: usize, values: NumberSet) -> Result<Self> {
        check_bits(order)?;
        let k = complement_constant(order)?;
        if !values.is_subset(NumberSet::range((order * order) as u32)) {
            return Err(Error::InvalidValueSet(format!("{values:?} exceeds 1..={}", order * order)));
        }
        if k % 2 == 0 && values.contains(k / 2) {
            return Err(Error::InvalidValueSet("pool contains the center value".into()));
        }
        if !values.is_complement_closed(k) {
            return Err(Error::InvalidValueSet(format!("{values:?} is not complement-closed")));
        }
        Ok(PairPool { order, values })
    }

    pub fn values(&self) -> NumberSet {
        self.values
    }

    pub fn pair_count(&self) -> usize {
        self.values.len() / 2
    }

    /// Smaller member of each complement pair; determines the pool.
    pub fn minima(&self) -> NumberSet {
        let k = (self.order * self.order + 1) as u32;
        NumberSet::from_values(self.values.iter().filter(|&x| 2 * x < k))
    }
}

/// `n`-subsets of the pool taking one value from each pair and reaching the
/// magic sum. The pool must hold exactly `n` pairs.
pub fn gen_second_row_family(pool: &PairPool, n: usize) -> Result<LineFamily> {
    if pool.order != n {
        return Err(Error::DimensionMismatch { expected: n, actual: pool.order });
    }
    if pool.pair_count() != n {
        return Err(Error::InvalidValueSet(format!("pool has {} pairs, expected {n}", pool.pair_count())));
    }
    let k = complement_constant(n)?;
    let target = magic_sum(n)?;
    let minima = pool.minima().to_vec();
    let mut members = Vec::new();
    // Choose low or high member per pair.
    for choice in 0u32..(1 << n) {
        let mut s = NumberSet::EMPTY;
        let mut sum = 0;
        for (bit, &lo) in minima.iter().enumerate() {
            let v = if choice >> bit & 1 == 1 { k - lo } else { lo };
            s.insert(v);
            sum += v;
        }
        if sum == target {
            members.push(s);
        }
    }
    members.sort_unstable_by(|a, b| a.lex_cmp(*b));
    Ok(LineFamily { order: n, target, complement_free: true, kind: FamilyKind::SecondRows, members })
}

/// Memo of second-row families keyed by the pool's pair minima.
#[derive(Debug, Default)]
pub struct SecondRowCache {
    map: RwLock<HashMap<u64, Arc<LineFamily>>>,
}

impl SecondRowCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, pool: &PairPool) -> Result<Arc<LineFamily>> {
        let key = pool.minima().bits();
        if let Some(hit) = self.map.read().expect("cache lock poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let fresh = Arc::new(gen_second_row_family(pool, pool.order)?);
        let mut map = self.map.write().expect("cache lock poisoned");
        let entry = map.entry(key).or_insert_with(|| Arc::clone(&fresh));
        if **entry != *fresh {
            return Err(Error::Internal(format!("second-row cache disagreement for key {key:#x}")));
        }
        Ok(Arc::clone(entry))
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

const CACHE_MAGIC: &[u8; 8] = b"MSQFAMLY";
const CACHE_VERSION: u8 = 1;

/// Writes `magic, version, n, kind, count (u64 LE), masks (u64 LE each)` in
/// family order.
pub fn write_family_cache(path: &Path, family: &LineFamily) -> Result<()> {
    let mut buf = Vec::with_capacity(19 + 8 * family.len());
    buf.extend_from_slice(CACHE_MAGIC);
    buf.push(CACHE_VERSION);
    buf.push(family.order as u8);
    buf.push(family.kind.tag());
    buf.extend_from_slice(&(family.len() as u64).to_le_bytes());
    for m in &family.members {
        buf.extend_from_slice(&m.bits().to_le_bytes());
    }
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp)?;
    f.write_all(&buf)?;
    f.sync_all()?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_family_cache(path: &Path) -> Result<LineFamily> {
    let bad = |reason: &str| Error::Cache { path: path.to_path_buf(), reason: reason.to_string() };
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 19 || &bytes[..8] != CACHE_MAGIC {
        return Err(bad("bad header"));
    }
    if bytes[8] != CACHE_VERSION {
        return Err(bad("unsupported version"));
    }
    let order = bytes[9] as usize;
    let kind = FamilyKind::from_tag(bytes[10]).ok_or_else(|| bad("unknown family kind"))?;
    let count = u64::from_le_bytes(bytes[11..19].try_into().expect("8 bytes")) as usize;
    if bytes.len() != 19 + 8 * count {
        return Err(bad("length does not match count"));
    }
    check_bits(order)?;
    let members: Vec<NumberSet> = bytes[19..]
        .chunks_exact(8)
        .map(|c| NumberSet::from_bits(u64::from_le_bytes(c.try_into().expect("8 bytes"))))
        .collect();
    let target = magic_sum(order)?;
    if members.iter().any(|m| m.len() != order || m.sum() != target) {
        return Err(bad("member violates cardinality or sum"));
    }
    Ok(LineFamily { order, target, complement_free: kind != FamilyKind::SemiLines, kind, members })
}

fn cache_path(dir: &Path, n: usize, kind: FamilyKind) -> PathBuf {
    let name = match kind {
        FamilyKind::ComplementFreeRows => "rows",
        FamilyKind::SemiLines => "semi",
        FamilyKind::SecondRows => "second",
    };
    dir.join(format!("family-{name}-{n}.bin"))
}

/// Generates a family, going through the on-disk cache when a directory is
/// given. Second-row families are per-pool and not cached here.
pub fn load_or_generate(cache_dir: Option<&Path>, n: usize, kind: FamilyKind) -> Result<LineFamily> {
    let generate = || match kind {
        FamilyKind::ComplementFreeRows => gen_complement_free_rows(n),
        FamilyKind::SemiLines => gen_semi_line_family(n),
        FamilyKind::SecondRows => Err(Error::InvalidValueSet("second-row families are per pool".into())),
    };
    let Some(dir) = cache_dir else {
        return generate();
    };
    let path = cache_path(dir, n, kind);
    if path.exists() {
        match read_family_cache(&path) {
            Ok(f) if f.order == n && f.kind == kind => return Ok(f),
            Ok(_) => log::warn!("cache {} holds a different family; regenerating", path.display()),
            Err(e) => log::warn!("ignoring unreadable cache {}: {e}", path.display()),
        }
    }
    let family = generate()?;
    fs::create_dir_all(dir)?;
    write_family_cache(&path, &family)?;
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(n: usize, complement_free: bool) -> Vec<Vec<u32>> {
        let area = (n * n) as u32;
        let k = area + 1;
        let m = magic_sum(n).unwrap();
        let mut out = Vec::new();
        // Enumerate all n-subsets through bitmasks over 1..=area.
        fn combos(start: u32, area: u32, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if left == 0 {
                out.push(cur.clone());
                return;
            }
            for v in start..=area {
                cur.push(v);
                combos(v + 1, area, left - 1, cur, out);
                cur.pop();
            }
        }
        let mut all = Vec::new();
        combos(1, area, n, &mut Vec::new(), &mut all);
        for c in all {
            if c.iter().sum::<u32>() != m {
                continue;
            }
            if complement_free && (c.iter().any(|&x| 2 * x == k) || c.iter().any(|&x| c.contains(&(k - x)))) {
                continue;
            }
            out.push(c);
        }
        out
    }

    fn as_vecs(f: &LineFamily) -> Vec<Vec<u32>> {
        f.iter().map(NumberSet::to_vec).collect()
    }

    #[test]
    fn order3_rows_by_brute_force() {
        let fam = gen_complement_free_rows(3).unwrap();
        let expect = brute_force(3, true);
        assert_eq!(as_vecs(&fam), expect);
        assert_eq!(expect, vec![vec![1, 6, 8], vec![2, 4, 9], vec![2, 6, 7], vec![3, 4, 8]]);
    }

    #[test]
    fn order5_rows_by_brute_force() {
        let fam = gen_complement_free_rows(5).unwrap();
        assert_eq!(as_vecs(&fam), brute_force(5, true));
        assert_eq!(fam.len(), 552);
    }

    #[test]
    fn semi_lines_by_brute_force() {
        let f3 = gen_semi_line_family(3).unwrap();
        assert_eq!(as_vecs(&f3), brute_force(3, false));
        assert_eq!(f3.len(), 8);
        let f4 = gen_semi_line_family(4).unwrap();
        assert_eq!(as_vecs(&f4), brute_force(4, false));
        assert_eq!(f4.len(), 86);
        assert!(f4.iter().all(|s| s.sum() == 34));
    }

    #[test]
    fn order7_row_family_size() {
        let fam = gen_complement_free_rows(7).unwrap();
        assert_eq!(fam.len(), 452_188);
        assert!(fam.members().windows(2).all(|w| w[0].lex_cmp(w[1]).is_lt()));
    }

    #[test]
    fn even_order_rejected() {
        assert!(gen_complement_free_rows(4).is_err());
        assert!(gen_complement_free_rows(8).is_err());
    }

    #[test]
    fn family_closed_under_complement() {
        let fam = gen_complement_free_rows(5).unwrap();
        for s in fam.iter() {
            assert!(s.is_complement_free(26));
            assert!(fam.contains(s.complement_values(26)));
        }
    }

    #[test]
    fn restrict_edges() {
        let fam = gen_complement_free_rows(5).unwrap();
        assert_eq!(restrict_family(&fam, NumberSet::range(25)), fam);
        assert!(restrict_family(&fam, NumberSet::EMPTY).is_empty());
        let a = NumberSet::from_values(1..=15);
        let b = NumberSet::from_values(8..=25);
        let ra = restrict_family(&fam, a);
        let rb = restrict_family(&fam, b);
        assert!(ra.iter().chain(rb.iter()).all(|s| fam.contains(s)));
    }

    #[test]
    fn second_rows_match_filter() {
        // Pool of the pairs whose minima are 1..=7 at order 7.
        let pool_vals = NumberSet::from_values((1..=7).chain(43..=49));
        let pool = PairPool::new(7, pool_vals).unwrap();
        let fam = gen_second_row_family(&pool, 7).unwrap();
        let rows = gen_complement_free_rows(7).unwrap();
        let expect = restrict_family(&rows, pool_vals);
        assert_eq!(fam.members(), expect.members());
        assert!(fam.iter().all(|s| s.sum() == 175 && s.is_complement_free(50)));
    }

    #[test]
    fn second_row_cache_memoizes() {
        let pool =
            PairPool::new(7, NumberSet::from_values([2, 3, 5, 8, 13, 21, 24, 48, 47, 45, 42, 37, 29, 26])).unwrap();
        let cache = SecondRowCache::new();
        let a = cache.get(&pool).unwrap();
        let b = cache.get(&pool).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(cache.len(), 1);
        assert_eq!(*a, gen_second_row_family(&pool, 7).unwrap());
    }

    #[test]
    fn pool_validation() {
        assert!(PairPool::new(7, NumberSet::from_values([1, 2])).is_err());
        assert!(PairPool::new(7, NumberSet::from_values([25])).is_err());
        let small = PairPool::new(7, NumberSet::from_values([1, 49])).unwrap();
        assert!(gen_second_row_family(&small, 7).is_err());
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let fam = gen_complement_free_rows(5).unwrap();
        let path = dir.path().join("f.bin");
        write_family_cache(&path, &fam).unwrap();
        assert_eq!(read_family_cache(&path).unwrap(), fam);
        let via = load_or_generate(Some(dir.path()), 5, FamilyKind::ComplementFreeRows).unwrap();
        let again = load_or_generate(Some(dir.path()), 5, FamilyKind::ComplementFreeRows).unwrap();
        assert_eq!(via, fam);
        assert_eq!(again, fam);
        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        assert!(read_family_cache(&path).is_err());
    }
}
