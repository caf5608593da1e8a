use std::sync::OnceLock;

use magicsq::families::{gen_complement_free_rows, load_or_generate, restrict_family, FamilyKind, LineFamily};
use magicsq::NumberSet;
use proptest::prelude::*;

fn rows7() -> &'static LineFamily {
    static R: OnceLock<LineFamily> = OnceLock::new();
    R.get_or_init(|| gen_complement_free_rows(7).unwrap())
}

#[test]
fn order7_rows_are_complement_free_and_closed() {
    let fam = rows7();
    assert_eq!(fam.len(), 452_188);
    for r in fam.iter() {
        assert!(r.is_complement_free(50));
        assert!(!r.contains(25));
        assert_eq!(r.sum(), 175);
        assert!(fam.contains(r.complement_values(50)));
    }
}

#[test]
fn cache_gives_identical_families() {
    let dir = tempfile::tempdir().unwrap();
    for kind in [FamilyKind::ComplementFreeRows, FamilyKind::SemiLines] {
        let n = if kind == FamilyKind::SemiLines { 4 } else { 5 };
        let fresh = load_or_generate(None, n, kind).unwrap();
        let written = load_or_generate(Some(dir.path()), n, kind).unwrap();
        let read = load_or_generate(Some(dir.path()), n, kind).unwrap();
        assert_eq!(fresh, written);
        assert_eq!(fresh, read);
    }
    let again = gen_complement_free_rows(7).unwrap();
    assert_eq!(&again, rows7());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn restrictions_stay_inside_the_family(a in any::<u64>(), b in any::<u64>()) {
        let pick = |bits: u64| NumberSet::from_values((1..=49).filter(|v| bits >> v & 1 == 1));
        let (sa, sb) = (pick(a), pick(b));
        let fam = rows7();
        let ra = restrict_family(fam, sa);
        let rb = restrict_family(fam, sb);
        for r in ra.iter().chain(rb.iter()) {
            prop_assert!(fam.contains(r));
        }
        prop_assert!(ra.iter().all(|r| r.is_subset(sa)));
        let both = restrict_family(fam, sa.union(sb));
        prop_assert!(ra.iter().chain(rb.iter()).all(|r| both.contains(r)));
    }
}
