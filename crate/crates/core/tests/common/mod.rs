//! Explicit block builders shared by the integration and acceptance tests.
//!
//! These place actual rows instead of tabulating profiles, so they check the
//! split engine by a separate route.

#![allow(dead_code)]

use std::ops::ControlFlow;

use magicsq::perm::next_permutation;
use magicsq::{magic_sum, NumberSet, Square};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Classic associative square of order 5.
pub fn classic5() -> Square {
    Square::from_rows(&[
        vec![17, 24, 1, 8, 15],
        vec![23, 5, 7, 14, 16],
        vec![4, 6, 13, 20, 22],
        vec![10, 12, 19, 21, 3],
        vec![11, 18, 25, 2, 9],
    ])
    .unwrap()
}

/// A semi-magic square of order 6.
pub fn semi6() -> Square {
    Square::from_rows(&[
        vec![32, 29, 4, 1, 24, 21],
        vec![30, 31, 2, 3, 22, 23],
        vec![12, 9, 17, 20, 28, 25],
        vec![10, 11, 18, 19, 26, 27],
        vec![13, 16, 36, 33, 5, 8],
        vec![14, 15, 34, 35, 6, 7],
    ])
    .unwrap()
}

/// Ascending `size`-subsets of `values` with the given sum; when
/// `complement` is set, no two members add up to it.
pub fn subsets(values: &[u32], size: usize, sum: u32, complement: Option<u32>) -> Vec<Vec<u32>> {
    fn rec(
        values: &[u32],
        start: usize,
        size: usize,
        left: u32,
        k: Option<u32>,
        cur: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if cur.len() == size {
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
            if k.is_some_and(|k| cur.iter().any(|&x| x + v == k)) {
                continue;
            }
            cur.push(v);
            rec(values, i + 1, size, left - v, k, cur, out);
            cur.pop();
        }
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let mut out = Vec::new();
    rec(&sorted, 0, size, sum, complement, &mut Vec::new(), &mut out);
    out
}

pub fn permutations(set: &[u32]) -> Vec<Vec<u32>> {
    let mut cur = set.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

/// The row opposite `row` in an associative square.
pub fn mirror(row: &[u32], k: u32) -> Vec<u32> {
    row.iter().rev().map(|&v| k - v).collect()
}

fn k_of(n: usize) -> u32 {
    (n * n + 1) as u32
}

/// Every center block (three middle rows) on `center`, in placement order.
pub fn for_each_center_block(n: usize, center: NumberSet, mut visit: impl FnMut(&[Vec<u32>]) -> ControlFlow<()>) {
    let k = k_of(n);
    let c = k / 2;
    let m = magic_sum(n).unwrap();
    let pool: Vec<u32> = center.iter().filter(|&v| v != c).collect();
    for top in subsets(&pool, n, m, Some(k)) {
        let rest: Vec<u32> = pool.iter().copied().filter(|v| !top.contains(v) && !top.contains(&(k - v))).collect();
        let lows: Vec<u32> = rest.iter().copied().filter(|&v| v < c).collect();
        // Middle row: a center value flanked by complement pairs.
        for arrangement in permutations(&lows) {
            for flips in 0..(1u32 << lows.len()) {
                let mut mid = vec![c; n];
                for (j, &v) in arrangement.iter().enumerate() {
                    let v = if flips >> j & 1 == 1 { k - v } else { v };
                    mid[j] = v;
                    mid[n - 1 - j] = k - v;
                }
                for row in permutations(&top) {
                    let block = [row.clone(), mid.clone(), mirror(&row, k)];
                    if visit(&block).is_break() {
                        return;
                    }
                }
            }
        }
    }
}

/// Every outer block on `outer`, given as its top rows from the outside in;
/// the bottom rows are their mirrors.
pub fn for_each_outer_block(n: usize, outer: NumberSet, mut visit: impl FnMut(&[Vec<u32>]) -> ControlFlow<()>) {
    let k = k_of(n);
    let m = magic_sum(n).unwrap();
    let h = (n - 3) / 2;
    fn rec(
        n: usize,
        k: u32,
        m: u32,
        left: usize,
        pool: &[u32],
        tops: &mut Vec<Vec<u32>>,
        visit: &mut dyn FnMut(&[Vec<u32>]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if left == 0 {
            return visit(tops);
        }
        for set in subsets(pool, n, m, Some(k)) {
            let rest: Vec<u32> = pool.iter().copied().filter(|v| !set.contains(v) && !set.contains(&(k - v))).collect();
            for row in permutations(&set) {
                tops.push(row);
                let flow = rec(n, k, m, left - 1, &rest, tops, visit);
                tops.pop();
                flow?;
            }
        }
        ControlFlow::Continue(())
    }
    let pool: Vec<u32> = outer.iter().collect();
    let _ = rec(n, k, m, h, &pool, &mut Vec::new(), &mut visit);
}

/// Full rows of the outer block: tops, then mirrored bottoms in square order.
pub fn outer_rows(n: usize, tops: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let k = k_of(n);
    let mut rows = tops.to_vec();
    rows.extend(tops.iter().rev().map(|r| mirror(r, k)));
    rows
}

pub fn assemble(n: usize, tops: &[Vec<u32>], center: &[Vec<u32>]) -> Square {
    let k = k_of(n);
    let mut rows = tops.to_vec();
    rows.extend(center.iter().cloned());
    rows.extend(tops.iter().rev().map(|r| mirror(r, k)));
    Square::from_rows(&rows).unwrap()
}

pub fn column_sums(rows: &[Vec<u32>]) -> Vec<u32> {
    let n = rows[0].len();
    (0..n).map(|j| rows.iter().map(|r| r[j]).sum()).collect()
}

/// Mirrored column pairs of a block of `r` rows add up to `rK`; the middle
/// column holds `rK/2`.
pub fn block_identities_hold(rows: &[Vec<u32>]) -> bool {
    let n = rows[0].len();
    let k = k_of(n);
    let r = rows.len() as u32;
    let cols = column_sums(rows);
    (0..n / 2).all(|j| cols[j] + cols[n - 1 - j] == r * k) && 2 * cols[n / 2] == r * k
}

/// Published per-chunk totals (up to rotation and reflection) of the
/// canonical order-7 run, keyed by their ID ranges.
pub const PUBLISHED_CHUNKS: [(u64, u64, u64); 16] = [
    (1, 50_000, 100_798_108_317_305_280),
    (50_001, 100_000, 91_535_720_218_951_104),
    (100_001, 150_000, 88_372_685_889_123_552),
    (150_001, 200_000, 83_733_351_186_221_856),
    (200_001, 250_000, 81_588_443_264_793_504),
    (250_001, 300_000, 79_361_704_382_078_592),
    (300_001, 350_000, 68_614_934_779_440_864),
    (350_001, 400_000, 60_333_826_371_280_992),
    (400_001, 450_000, 58_972_609_900_819_872),
    (450_001, 500_000, 56_989_665_917_916_192),
    (500_001, 550_000, 58_076_327_642_080_032),
    (550_001, 600_000, 58_605_580_160_376_480),
    (600_001, 650_000, 56_406_391_669_618_560),
    (650_001, 700_000, 56_103_389_221_682_304),
    (700_001, 750_000, 54_683_346_217_110_336),
    (750_001, 817_190, 70_977_954_281_055_264),
];

pub const ORDER7_REDUCED_TOTAL: u128 = 1_125_154_039_419_854_784;

/// A canonical order-7 checkpoint whose per-chunk sums reproduce the
/// published chunk totals: each chunk's first ID carries the whole chunk
/// (reduced total x 8 / 2304 canonical squares), every other ID carries 0.
pub fn write_published_chunks_checkpoint(path: &std::path::Path) {
    use magicsq::assoc::CountMode;
    use magicsq::runner::{write_checkpoint, CheckpointHeader, ResultRecord, Workload};
    let header = CheckpointHeader::new(Workload::assoc(7, CountMode::Canonical), 817_190);
    let mut records = Vec::with_capacity(817_190);
    for (first, last, reduced) in PUBLISHED_CHUNKS {
        assert_eq!(reduced * 8 % 2304, 0);
        for id in first..=last {
            let count = if id == first { reduced * 8 / 2304 } else { 0 };
            records.push(ResultRecord { pair_id: id, count, elapsed_micros: 0 });
        }
    }
    write_checkpoint(path, &header, &records).unwrap();
}
