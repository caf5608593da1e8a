mod common;

use std::collections::HashMap;
use std::ops::ControlFlow;

use common::*;
use magicsq::assoc::{profile_of_center, profile_of_outer, AssocContext, CountMode, PairIndex};
use magicsq::semi::{gen_ul_pairs, profile_of_lower, profile_of_upper, PairScope, SemiContext};
use magicsq::{classify, magic_sum, NumberSet, Profile, ProfileTable, Square};

#[test]
fn order5_joins_are_associative_squares() {
    let ctx = AssocContext::new(5).unwrap();
    let index = PairIndex::new(5, CountMode::Raw).unwrap();
    let m = magic_sum(5).unwrap();
    let mut total = 0u64;
    let mut mismatched_joins = 0u64;
    for pair in index.iter() {
        let mut centers: HashMap<Profile, Vec<Vec<Vec<u32>>>> = HashMap::new();
        for_each_center_block(5, pair.center(), |block| {
            assert!(block_identities_hold(block), "center block {block:?}");
            centers.entry(profile_of_center(block).unwrap()).or_default().push(block.to_vec());
            ControlFlow::Continue(())
        });
        let mut center_table = ProfileTable::new();
        for (p, blocks) in &centers {
            center_table.add(*p, blocks.len() as u64).unwrap();
        }
        assert_eq!(center_table, ctx.count_center_parts(&pair, CountMode::Raw).unwrap());

        let mut joined = 0u64;
        let mut outer_table = ProfileTable::new();
        for_each_outer_block(5, pair.outer(), |tops| {
            let rows = outer_rows(5, tops);
            assert!(block_identities_hold(&rows), "outer block {rows:?}");
            let p = profile_of_outer(&rows).unwrap();
            outer_table.increment(p).unwrap();
            for center in centers.get(&p).into_iter().flatten() {
                let sq = assemble(5, tops, center);
                assert!(classify(&sq).associative, "{sq:?}");
                joined += 1;
            }
            // One unmatched join per outer block: some column must be off.
            if let Some((_, blocks)) = centers.iter().find(|(q, _)| **q != p) {
                let sq = assemble(5, tops, &blocks[0]);
                let rows: Vec<Vec<u32>> = sq.rows().map(<[u32]>::to_vec).collect();
                assert!(column_sums(&rows).iter().any(|&s| s != m));
                mismatched_joins += 1;
            }
            ControlFlow::Continue(())
        });
        assert_eq!(outer_table, ctx.count_outer_parts(&pair, CountMode::Raw).unwrap());
        assert_eq!(joined, ctx.count_pair(&pair, CountMode::Raw).unwrap(), "pair {}", pair.id());
        total += joined;
    }
    assert_eq!(total, 388_352);
    assert!(mismatched_joins > 0);
}

#[test]
fn order7_blocks_satisfy_column_identities() {
    let index = PairIndex::new(7, CountMode::Canonical).unwrap();
    let pair = index.get(23_758).unwrap();
    let mut seen = 0;
    for_each_center_block(7, pair.center(), |block| {
        let cols = column_sums(block);
        assert!((0..3).all(|j| cols[j] + cols[6 - j] == 150));
        assert_eq!(cols[3], 75);
        seen += 1;
        if seen < 20_000 {
            ControlFlow::Continue(())
        } else {
            ControlFlow::Break(())
        }
    });
    assert_eq!(seen, 20_000);
    let mut seen = 0;
    for_each_outer_block(7, pair.outer(), |tops| {
        let cols = column_sums(&outer_rows(7, tops));
        assert!((0..3).all(|j| cols[j] + cols[6 - j] == 200));
        assert_eq!(cols[3], 100);
        seen += 1;
        if seen < 20_000 {
            ControlFlow::Continue(())
        } else {
            ControlFlow::Break(())
        }
    });
    assert_eq!(seen, 20_000);
}

#[test]
fn classic_square_splits_into_matching_blocks() {
    let sq = classic5();
    let rows: Vec<Vec<u32>> = sq.rows().map(<[u32]>::to_vec).collect();
    let center = profile_of_center(&rows[1..4]).unwrap();
    let outer = profile_of_outer(&[rows[0].clone(), rows[4].clone()]).unwrap();
    assert_eq!(center, outer);
    assert!(block_identities_hold(&rows[1..4]));
}

fn halves(n: usize, values: NumberSet) -> Vec<Vec<Vec<u32>>> {
    let m = magic_sum(n).unwrap();
    let vals = values.to_vec();
    let mut out = Vec::new();
    for first in subsets(&vals, n, m, None) {
        let second: Vec<u32> = vals.iter().copied().filter(|v| !first.contains(v)).collect();
        for a in permutations(&first) {
            for b in permutations(&second) {
                out.push(vec![a.clone(), b.clone()]);
            }
        }
    }
    out
}

#[test]
fn order4_half_joins_are_semi_magic() {
    let ctx = SemiContext::new(4).unwrap();
    let pairs = gen_ul_pairs(4, PairScope::All).unwrap();
    let mut total = 0u64;
    for pair in pairs.iter() {
        let mut uppers: HashMap<Profile, Vec<Vec<Vec<u32>>>> = HashMap::new();
        for rows in halves(4, pair.upper) {
            let p = profile_of_upper(&rows).unwrap();
            assert_eq!(p.components().iter().sum::<i32>(), 68);
            uppers.entry(p).or_default().push(rows);
        }
        let mut joined = 0u64;
        for lower in halves(4, pair.lower) {
            let p = profile_of_lower(&lower).unwrap();
            for upper in uppers.get(&p).into_iter().flatten() {
                let rows: Vec<Vec<u32>> = upper.iter().chain(lower.iter()).cloned().collect();
                let sq = Square::from_rows(&rows).unwrap();
                assert!(classify(&sq).semi_magic);
                joined += 1;
            }
        }
        assert_eq!(joined, ctx.count_pair(&pair, PairScope::All).unwrap());
        total += joined;
    }
    assert_eq!(total, 549_504);
}

#[test]
fn order6_example_halves_match() {
    let sq = semi6();
    let rows: Vec<Vec<u32>> = sq.rows().map(<[u32]>::to_vec).collect();
    assert_eq!(profile_of_upper(&rows[..3]).unwrap(), profile_of_lower(&rows[3..]).unwrap());
}
