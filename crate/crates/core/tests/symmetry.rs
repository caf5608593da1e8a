mod common;

use std::collections::HashSet;
use std::sync::OnceLock;

use magicsq::oracle::{find_one, Budget, SearchKind};
use magicsq::{
    apply_symmetric_perm, canonicalize, classify, is_canonical, magic_sum, orbit, DihedralOp, Square,
    SymmetricPermutation,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn sample7() -> &'static Square {
    static SQ: OnceLock<Square> = OnceLock::new();
    SQ.get_or_init(|| find_one(7, SearchKind::Associative, Budget::UNLIMITED).unwrap().unwrap())
}

fn group7() -> &'static [SymmetricPermutation] {
    static G: OnceLock<Vec<SymmetricPermutation>> = OnceLock::new();
    G.get_or_init(|| SymmetricPermutation::all(7).unwrap())
}

#[test]
fn order7_orbit_has_one_canonical_member() {
    let sq = sample7();
    assert!(classify(sq).associative);
    let members = orbit(sq, false).unwrap();
    assert_eq!(members.len(), 2304);
    assert_eq!(members.iter().collect::<HashSet<_>>().len(), 2304);
    assert!(members.iter().all(|m| classify(m).associative));
    let canonical: Vec<&Square> = members.iter().filter(|m| is_canonical(m).unwrap()).collect();
    assert_eq!(canonical.len(), 1);
    let (canon, g) = canonicalize(sq).unwrap();
    assert_eq!(&canon, canonical[0]);
    assert_eq!(apply_symmetric_perm(sq, &g).unwrap(), canon);
    // Canonical squares keep 1 in the center rows.
    assert!((3..=5).any(|r| canon.row(r).contains(&1)));
}

#[test]
fn order5_orbit_size() {
    let sq = common::classic5();
    assert_eq!(orbit(&sq, false).unwrap().len(), 64);
    assert_eq!(orbit(&sq, true).unwrap().len(), 128);
}

#[test]
fn dihedral_images_keep_flags() {
    for sq in [common::classic5(), sample7().clone()] {
        let flags = classify(&sq);
        let images: HashSet<Square> = DihedralOp::all().iter().map(|op| op.apply(&sq)).collect();
        assert_eq!(images.len(), 8);
        assert!(images.iter().all(|img| classify(img) == flags));
    }
}

/// A random arrangement of `1..=n²` with complementary values at mirrored
/// cells. Line sums are not controlled.
fn complement_symmetric(n: usize, seed: u64) -> Vec<u32> {
    let mut rng = common::rng(seed);
    let k = (n * n + 1) as u32;
    let mut lows: Vec<u32> = (1..k).filter(|&v| 2 * v < k).collect();
    lows.shuffle(&mut rng);
    let mut cells = vec![0u32; n * n];
    if n % 2 == 1 {
        cells[n * n / 2] = k / 2;
    }
    for (pos, v) in lows.into_iter().enumerate() {
        let v = if rng.gen_bool(0.5) { k - v } else { v };
        cells[pos] = v;
        cells[n * n - 1 - pos] = k - v;
    }
    cells
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_orbit_invariant(g in 0usize..2304) {
        let (canon, _) = canonicalize(sample7()).unwrap();
        let image = apply_symmetric_perm(&canon, &group7()[g]).unwrap();
        prop_assert!(classify(&image).associative);
        prop_assert_eq!(is_canonical(&image).unwrap(), group7()[g].is_identity());
        let (again, h) = canonicalize(&image).unwrap();
        prop_assert_eq!(&again, &canon);
        prop_assert_eq!(apply_symmetric_perm(&image, &h).unwrap(), canon);
    }

    #[test]
    fn complement_symmetry_forces_line_properties(seed in any::<u64>(), odd in 0usize..3) {
        let n = [3, 5, 7][odd];
        let cells = complement_symmetric(n, seed);
        let at = |i: usize, j: usize| cells[i * n + j];
        let m = magic_sum(n).unwrap();
        prop_assert_eq!(at(n / 2, n / 2), (n * n + 1) as u32 / 2);
        prop_assert_eq!((0..n).map(|i| at(i, i)).sum::<u32>(), m);
        prop_assert_eq!((0..n).map(|i| at(i, n - 1 - i)).sum::<u32>(), m);
        prop_assert_eq!((0..n).map(|j| at(n / 2, j)).sum::<u32>(), m);
        prop_assert_eq!((0..n).map(|i| at(i, n / 2)).sum::<u32>(), m);
        for r in 0..n {
            let row = |r: usize| (0..n).map(|j| at(r, j)).sum::<u32>();
            prop_assert_eq!(row(r) == m, row(n - 1 - r) == m);
        }
        let sq = Square::new(n, cells.clone()).unwrap();
        let flags = classify(&sq);
        if flags.magic {
            prop_assert!(flags.associative);
        }
    }

    #[test]
    fn swaps_preserve_flags_and_move_every_cell(g in 1usize..64, order7 in any::<bool>()) {
        let (sq, group) = if order7 {
            (sample7().clone(), group7().to_vec())
        } else {
            (common::classic5(), SymmetricPermutation::all(5).unwrap())
        };
        let p = &group[g % group.len()];
        let image = apply_symmetric_perm(&sq, p).unwrap();
        prop_assert_eq!(classify(&image), classify(&sq));
        prop_assert_eq!(image == sq, p.is_identity());
    }
}
