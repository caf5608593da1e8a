use std::cmp::Ordering;
use std::fmt;

/// A subset of `{1..=n²}` stored as a bitmask (bit `v` for value `v`).
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NumberSet(u64);

impl NumberSet {
    pub const EMPTY: NumberSet = NumberSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        NumberSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// `{1..=max}`.
    pub fn range(max: u32) -> Self {
        debug_assert!(max < 64);
        NumberSet(((1u64 << (max + 1)) - 1) & !1)
    }

    pub fn from_values<I: IntoIterator<Item = u32>>(values: I) -> Self {
        let mut s = NumberSet::EMPTY;
        for v in values {
            s.insert(v);
        }
        s
    }

    #[inline]
    pub fn contains(self, v: u32) -> bool {
        v < 64 && self.0 >> v & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, v: u32) {
        debug_assert!((1..64).contains(&v));
        self.0 |= 1 << v;
    }

    #[inline]
    pub fn remove(&mut self, v: u32) {
        self.0 &= !(1 << v);
    }

    #[inline]
    pub fn with(self, v: u32) -> Self {
        NumberSet(self.0 | 1 << v)
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn min(self) -> Option<u32> {
        (self.0 != 0).then(|| self.0.trailing_zeros())
    }

    #[inline]
    pub fn max(self) -> Option<u32> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros())
    }

    pub fn sum(self) -> u32 {
        self.iter().sum()
    }

    #[inline]
    pub fn is_subset(self, other: NumberSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_disjoint(self, other: NumberSet) -> bool {
        self.0 & other.0 == 0
    }

    #[inline]
    pub fn union(self, other: NumberSet) -> Self {
        NumberSet(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: NumberSet) -> Self {
        NumberSet(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: NumberSet) -> Self {
        NumberSet(self.0 & !other.0)
    }

    /// `{k - x : x ∈ self}`.
    pub fn complement_values(self, k: u32) -> Self {
        NumberSet::from_values(self.iter().map(|x| k - x))
    }

    /// True when `x ∈ self ⇒ k - x ∈ self`.
    pub fn is_complement_closed(self, k: u32) -> bool {
        self.iter().all(|x| x < k && self.contains(k - x))
    }

    /// True when no two members sum to `k`.
    pub fn is_complement_free(self, k: u32) -> bool {
        self.iter().all(|x| x >= k || x * 2 == k || !self.contains(k - x))
    }

    /// Ascending values.
    pub fn iter(self) -> Values {
        Values(self.0)
    }

    pub fn to_vec(self) -> Vec<u32> {
        self.iter().collect()
    }

    /// Lexicographic order of the ascending value lists.
    pub fn lex_cmp(self, other: NumberSet) -> Ordering {
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Ordering::Equal;
        }
        let low = diff & diff.wrapping_neg();
        if self.0 & low != 0 {
            // `self` has the smaller first differing element, unless `other`
            // is a strict prefix of it.
            if other.0 & !(low - 1) == 0 {
                Ordering::Greater
            } else {
                Ordering::Less
            }
        } else if self.0 & !(low - 1) == 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl fmt::Debug for NumberSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<u32> for NumberSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        NumberSet::from_values(iter)
    }
}

pub struct Values(u64);

impl Iterator for Values {
    type Item = u32;

    #[inline]
    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Values {}
