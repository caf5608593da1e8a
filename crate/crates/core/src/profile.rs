//! Profiles (partial column sums used as join keys) and their count tables.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Largest number of components a profile can carry.
pub const MAX_PROFILE_DIMS: usize = 6;
const BITS: u32 = 10;
const OFFSET: i32 = 512;
const MASK: u64 = (1 << BITS) - 1;

/// A short vector of integer components packed into one word.
///
/// Each component occupies 10 bits stored with an offset of 512, so values in
/// `-512..512` are representable; the dimension sits in the top four bits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile(u64);

impl Profile {
    pub fn new(components: &[i32]) -> Result<Self> {
        if components.len() > MAX_PROFILE_DIMS {
            return Err(Error::Internal(format!("profile with {} components", components.len())));
        }
        let mut word = (components.len() as u64) << 60;
        for (idx, &c) in components.iter().enumerate() {
            if !(-OFFSET..OFFSET).contains(&c) {
                return Err(Error::Internal(format!("profile component {c} out of range")));
            }
            word |= ((c + OFFSET) as u64) << (BITS * idx as u32);
        }
        Ok(Profile(word))
    }

    /// Unchecked constructor for hot loops with components known in range.
    #[inline]
    pub(crate) fn pack_unchecked(components: &[i32]) -> Self {
        let mut word = (components.len() as u64) << 60;
        for (idx, &c) in components.iter().enumerate() {
            word |= ((c + OFFSET) as u64) << (BITS * idx as u32);
        }
        Profile(word)
    }

    pub fn dims(self) -> usize {
        (self.0 >> 60) as usize
    }

    pub fn get(self, idx: usize) -> i32 {
        assert!(idx < self.dims(), "component {idx} of a {}-dim profile", self.dims());
        ((self.0 >> (BITS * idx as u32)) & MASK) as i32 - OFFSET
    }

    pub fn components(self) -> Vec<i32> {
        (0..self.dims()).map(|i| self.get(i)).collect()
    }

    pub fn raw(self) -> u64 {
        self.0
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Profile{:?}", self.components())
    }
}

/// Multiset counter `Profile -> count` with a cached total mass.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct ProfileTable {
    counts: HashMap<Profile, u64>,
    total: u64,
}

impl ProfileTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `count` occurrences of `p`; zero counts are ignored so that every
    /// stored key stays strictly positive.
    pub fn add(&mut self, p: Profile, count: u64) -> Result<()> {
        if count == 0 {
            return Ok(());
        }
        let total = self.total.checked_add(count).ok_or(Error::Overflow("profile table total"))?;
        let slot = self.counts.entry(p).or_insert(0);
        *slot = slot.checked_add(count).ok_or(Error::Overflow("profile table entry"))?;
        self.total = total;
        Ok(())
    }

    pub fn increment(&mut self, p: Profile) -> Result<()> {
        self.add(p, 1)
    }

    pub fn get(&self, p: Profile) -> u64 {
        self.counts.get(&p).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn iter(&self) -> impl Iterator<Item = (Profile, u64)> + '_ {
        self.counts.iter().map(|(&p, &c)| (p, c))
    }

    /// Entries in ascending key order.
    pub fn sorted(&self) -> Vec<(Profile, u64)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_unstable();
        v
    }

    pub fn merge(&mut self, other: &ProfileTable) -> Result<()> {
        for (p, c) in other.iter() {
            self.add(p, c)?;
        }
        Ok(())
    }
}

impl fmt::Debug for ProfileTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProfileTable").field("keys", &self.counts.len()).field("total", &self.total).finish()
    }
}

/// `Σ_p a[p]·b[p]` with overflow reported rather than wrapped.
pub fn combine(a: &ProfileTable, b: &ProfileTable) -> Result<u64> {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut acc: u64 = 0;
    for (p, c) in small.iter() {
        let other = large.get(p);
        if other != 0 {
            let prod = c.checked_mul(other).ok_or(Error::Overflow("join product"))?;
            acc = acc.checked_add(prod).ok_or(Error::Overflow("join sum"))?;
        }
    }
    Ok(acc)
}

/// Dense counter over a cube `[-radius, radius]^dims` of integer vectors.
///
/// Vectors map to flat indices linearly, so a vector sum is an index sum
/// around the centre; hot loops add precomputed signed offsets.
#[derive(Clone)]
pub struct DenseBox {
    dims: usize,
    radius: i32,
    width: usize,
    data: Vec<u64>,
}

impl DenseBox {
    pub fn new(dims: usize, radius: i32) -> Self {
        assert!(dims >= 1 && radius >= 0);
        let width = 2 * radius as usize + 1;
        DenseBox { dims, radius, width, data: vec![0; width.pow(dims as u32)] }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn radius(&self) -> i32 {
        self.radius
    }

    /// Flat index of the zero vector.
    pub fn center(&self) -> usize {
        (self.data.len() - 1) / 2
    }

    /// Signed index displacement of a vector relative to the centre.
    pub fn offset(&self, v: &[i32]) -> isize {
        debug_assert_eq!(v.len(), self.dims);
        let mut off = 0isize;
        let mut stride = 1isize;
        for &c in v {
            off += c as isize * stride;
            stride *= self.width as isize;
        }
        off
    }

    pub fn index(&self, v: &[i32]) -> Option<usize> {
        if v.len() != self.dims || v.iter().any(|c| c.abs() > self.radius) {
            return None;
        }
        Some((self.center() as isize + self.offset(v)) as usize)
    }

    pub fn vector(&self, mut idx: usize) -> Vec<i32> {
        let mut v = Vec::with_capacity(self.dims);
        for _ in 0..self.dims {
            v.push((idx % self.width) as i32 - self.radius);
            idx /= self.width;
        }
        v
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [u64] {
        &mut self.data
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    pub fn get(&self, v: &[i32]) -> u64 {
        self.index(v).map_or(0, |i| self.data[i])
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.data.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i, c))
    }

    pub fn total(&self) -> Result<u64> {
        self.data.iter().try_fold(0u64, |acc, &c| acc.checked_add(c)).ok_or(Error::Overflow("dense total"))
    }

    /// Converts to a table, mapping each vector through `key`.
    pub fn to_table(&self, mut key: impl FnMut(&[i32]) -> Profile) -> Result<ProfileTable> {
        let mut t = ProfileTable::new();
        for (i, c) in self.nonzero() {
            t.add(key(&self.vector(i)), c)?;
        }
        Ok(t)
    }
}

impl fmt::Debug for DenseBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DenseBox").field("dims", &self.dims).field("radius", &self.radius).finish()
    }
}
