//! Permutation tables used to arrange a row's value set across columns.

use crate::error::{Error, Result};

/// All permutations of `0..n` in lexicographic order, stored flat.
#[derive(Debug, Clone)]
pub struct PermTable {
    n: usize,
    flat: Vec<u8>,
}

impl PermTable {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > 8 {
            return Err(Error::InvalidOrder { order: n, reason: "permutation tables support 1..=8" });
        }
        let mut cur: Vec<u8> = (0..n as u8).collect();
        let mut flat = Vec::with_capacity((1..=n).product::<usize>() * n);
        loop {
            flat.extend_from_slice(&cur);
            if !next_permutation(&mut cur) {
                break;
            }
        }
        Ok(PermTable { n, flat })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.flat.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    pub fn get(&self, idx: usize) -> &[u8] {
        &self.flat[idx * self.n..(idx + 1) * self.n]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u8]> {
        self.flat.chunks_exact(self.n)
    }
}

/// Advances to the next lexicographic permutation; false after the last.
pub fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// First-row column condition of the canonical form, for odd `n`: every
/// mirrored column pair increases left to right and the left half ascends.
pub fn is_column_canonical(row: &[u32]) -> bool {
    let n = row.len();
    let k = n / 2;
    (0..k).all(|j| row[j] < row[n - 1 - j]) && (1..k).all(|j| row[j - 1] < row[j])
}
