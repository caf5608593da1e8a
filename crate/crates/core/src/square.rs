//! Squares, magic-property predicates and the symmetry operations that
//! preserve associativity.
//!
//! Coordinates in the public API are 1-indexed (`row`, `col` in `1..=n`);
//! storage is row-major.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// Largest order whose value range fits a 64-bit [`NumberSet`](crate::NumberSet).
pub const MAX_ORDER: usize = 7;

/// Magic constant `n(n²+1)/2`.
pub fn magic_sum(n: usize) -> Result<u32> {
    check_order(n)?;
    Ok((n * (n * n + 1) / 2) as u32)
}

/// Sum of two cells at mirrored positions in an associative square: `n²+1`.
pub fn complement_constant(n: usize) -> Result<u32> {
    check_order(n)?;
    Ok((n * n + 1) as u32)
}

pub(crate) fn check_order(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidOrder { order: n, reason: "order must be at least 1" });
    }
    if n > 1000 {
        return Err(Error::InvalidOrder { order: n, reason: "order too large" });
    }
    Ok(())
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Square {
    order: usize,
    cells: Vec<u32>,
}

impl Square {
    /// Builds a square from row-major cells, rejecting anything that is not a
    /// permutation of `1..=n²`.
    pub fn new(order: usize, cells: Vec<u32>) -> Result<Self> {
        check_order(order)?;
        let area = order * order;
        if cells.len() != area {
            return Err(Error::MalformedSquare(format!("expected {area} cells, got {}", cells.len())));
        }
        let mut seen = vec![false; area + 1];
        for &v in &cells {
            let v = v as usize;
            if v == 0 || v > area {
                return Err(Error::MalformedSquare(format!("value {v} outside 1..={area}")));
            }
            if seen[v] {
                return Err(Error::MalformedSquare(format!("value {v} appears twice")));
            }
            seen[v] = true;
        }
        Ok(Square { order, cells })
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::MalformedSquare("rows are not all of length n".into()));
        }
        Square::new(n, rows.concat())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn cells(&self) -> &[u32] {
        &self.cells
    }

    /// Value `X_ij`, 1-indexed.
    pub fn at(&self, row: usize, col: usize) -> u32 {
        debug_assert!((1..=self.order).contains(&row) && (1..=self.order).contains(&col));
        self.cells[(row - 1) * self.order + (col - 1)]
    }

    /// Row `i` (1-indexed) as a slice.
    pub fn row(&self, row: usize) -> &[u32] {
        let n = self.order;
        &self.cells[(row - 1) * n..row * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.cells.chunks(self.order)
    }

    /// Minimum of row `i` (1-indexed).
    pub fn row_min(&self, row: usize) -> u32 {
        *self.row(row).iter().min().expect("order >= 1")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.order);
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(u32::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses the text format written by [`Square::to_text`]: the order on the
    /// first line, then `n` lines of `n` space-separated integers.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::MalformedSquare("empty input".into()))?;
        let order: usize =
            header.trim().parse().map_err(|_| Error::MalformedSquare(format!("bad order line {header:?}")))?;
        let mut rows = Vec::with_capacity(order);
        for line in lines {
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<u32>().map_err(|_| Error::MalformedSquare(format!("bad value {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != order {
                return Err(Error::MalformedSquare(format!("row has {} values, expected {order}", row.len())));
            }
            rows.push(row);
        }
        if rows.len() != order {
            return Err(Error::MalformedSquare(format!("found {} rows, expected {order}", rows.len())));
        }
        Square::new(order, rows.concat())
    }

    fn map_cells(&self, f: impl Fn(usize, usize) -> (usize, usize)) -> Square {
        let n = self.order;
        let mut cells = Vec::with_capacity(n * n);
        for i in 1..=n {
            for j in 1..=n {
                let (si, sj) = f(i, j);
                cells.push(self.at(si, sj));
            }
        }
        Square { order: n, cells }
    }
}

impl fmt::Debug for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Square({})", self.order)?;
        for row in self.rows() {
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct SquareFlags {
    pub semi_magic: bool,
    pub magic: bool,
    pub associative: bool,
}

impl SquareFlags {
    pub const NONE: SquareFlags = SquareFlags { semi_magic: false, magic: false, associative: false };
    pub const ALL: SquareFlags = SquareFlags { semi_magic: true, magic: true, associative: true };
}

pub fn classify(sq: &Square) -> SquareFlags {
    let n = sq.order;
    let m = magic_sum(n).expect("square order validated");
    let k = complement_constant(n).expect("square order validated");
    let rows_ok = (1..=n).all(|i| sq.row(i).iter().sum::<u32>() == m);
    let cols_ok = (1..=n).all(|j| (1..=n).map(|i| sq.at(i, j)).sum::<u32>() == m);
    let semi_magic = rows_ok && cols_ok;
    let diag = (1..=n).map(|i| sq.at(i, i)).sum::<u32>();
    let anti = (1..=n).map(|i| sq.at(i, n + 1 - i)).sum::<u32>();
    let magic = semi_magic && diag == m && anti == m;
    let associative = magic && (1..=n).all(|i| (1..=n).all(|j| sq.at(i, j) + sq.at(n + 1 - i, n + 1 - j) == k));
    SquareFlags { semi_magic, magic, associative }
}

/// Permutations `p` of `1..=n` with `p(i) + p(n+1-i) = n+1`, in lexicographic
/// order of their images. There are `2^k k!` of them for `n = 2k+1`.
pub fn symmetric_row_perms(n: usize) -> Result<Vec<Vec<usize>>> {
    check_order(n)?;
    if n.is_multiple_of(2) || n < 3 {
        return Err(Error::InvalidOrder { order: n, reason: "symmetric permutations need odd n >= 3" });
    }
    let half = n / 2;
    let mut out = Vec::new();
    let mut perm = vec![0usize; n + 1];
    let mut used = vec![false; n + 1];
    perm[half + 1] = half + 1;
    used[half + 1] = true;
    fn rec(pos: usize, n: usize, half: usize, perm: &mut [usize], used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if pos > half {
            out.push(perm[1..].to_vec());
            return;
        }
        for v in 1..=n {
            if used[v] || v == half + 1 {
                continue;
            }
            let mirror = n + 1 - v;
            used[v] = true;
            used[mirror] = true;
            perm[pos] = v;
            perm[n + 1 - pos] = mirror;
            rec(pos + 1, n, half, perm, used, out);
            used[v] = false;
            used[mirror] = false;
        }
    }
    rec(1, n, half, &mut perm, &mut used, &mut out);
    Ok(out)
}

fn is_symmetric_perm(p: &[usize]) -> bool {
    let n = p.len();
    let mut seen = vec![false; n + 1];
    for (idx, &v) in p.iter().enumerate() {
        if v == 0 || v > n || seen[v] {
            return false;
        }
        seen[v] = true;
        if v + p[n - 1 - idx] != n + 1 {
            return false;
        }
    }
    true
}

/// A pair of center-symmetric row and column permutations (1-indexed images).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymmetricPermutation {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl SymmetricPermutation {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        if rows.len() != cols.len() {
            return Err(Error::InvalidPermutation("row and column parts differ in length".into()));
        }
        if !is_symmetric_perm(&rows) || !is_symmetric_perm(&cols) {
            return Err(Error::InvalidPermutation(format!("not center-symmetric: rows {rows:?}, cols {cols:?}")));
        }
        Ok(SymmetricPermutation { rows, cols })
    }

    pub fn identity(n: usize) -> Self {
        let id: Vec<usize> = (1..=n).collect();
        SymmetricPermutation { rows: id.clone(), cols: id }
    }

    pub fn order(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn is_identity(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, &v)| v == i + 1) && self.cols.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    /// Every element of the group for odd `n`, rows-major over
    /// [`symmetric_row_perms`].
    pub fn all(n: usize) -> Result<Vec<SymmetricPermutation>> {
        let perms = symmetric_row_perms(n)?;
        let mut out = Vec::with_capacity(perms.len() * perms.len());
        for r in &perms {
            for c in &perms {
                out.push(SymmetricPermutation { rows: r.clone(), cols: c.clone() });
            }
        }
        Ok(out)
    }
}

/// `result(i, j) = sq(rows(i), cols(j))`.
pub fn apply_symmetric_perm(sq: &Square, p: &SymmetricPermutation) -> Result<Square> {
    if p.order() != sq.order() {
        return Err(Error::DimensionMismatch { expected: sq.order(), actual: p.order() });
    }
    Ok(sq.map_cells(|i, j| (p.rows[i - 1], p.cols[j - 1])))
}

/// An element of the dihedral group of the square: a counter-clockwise
/// rotation by `quarter_turns * 90°`, optionally preceded by a transpose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DihedralOp {
    pub quarter_turns: u8,
    pub transpose: bool,
}

impl DihedralOp {
    pub const IDENTITY: DihedralOp = DihedralOp { quarter_turns: 0, transpose: false };

    pub fn all() -> [DihedralOp; 8] {
        let mut out = [DihedralOp::IDENTITY; 8];
        for (idx, op) in out.iter_mut().enumerate() {
            *op = DihedralOp { quarter_turns: (idx % 4) as u8, transpose: idx >= 4 };
        }
        out
    }

    /// Image of source coordinates: which source cell lands on `(i, j)`.
    fn source(self, n: usize, i: usize, j: usize) -> (usize, usize) {
        // Undo the rotation, then the transpose.
        let (mut r, mut c) = (i, j);
        for _ in 0..self.quarter_turns {
            // Inverse of a counter-clockwise quarter turn.
            let (nr, nc) = (n + 1 - c, r);
            r = nr;
            c = nc;
        }
        if self.transpose {
            (c, r)
        } else {
            (r, c)
        }
    }

    pub fn apply(self, sq: &Square) -> Square {
        let n = sq.order();
        sq.map_cells(|i, j| self.source(n, i, j))
    }

    /// `self.then(other)` applies `self` first.
    pub fn then(self, other: DihedralOp) -> DihedralOp {
        // Resolve by action on a reference square with distinct cells.
        let probe = Square { order: 3, cells: (1..=9).collect() };
        let target = other.apply(&self.apply(&probe));
        DihedralOp::all().into_iter().find(|op| op.apply(&probe) == target).expect("dihedral group is closed")
    }
}

/// All images of an associative square of odd order under the symmetric
/// row/column swap group, plus the rotated coset when `include_rotation`.
pub fn orbit(sq: &Square, include_rotation: bool) -> Result<Vec<Square>> {
    let n = sq.order();
    if n.is_multiple_of(2) {
        return Err(Error::InvalidOrder { order: n, reason: "orbit needs odd order" });
    }
    if !classify(sq).associative {
        return Err(Error::NotAssociative);
    }
    let group = SymmetricPermutation::all(n)?;
    let mut seeds = vec![sq.clone()];
    if include_rotation {
        seeds.push(DihedralOp { quarter_turns: 1, transpose: false }.apply(sq));
    }
    let mut seen = HashSet::with_capacity(group.len() * seeds.len());
    let mut out = Vec::with_capacity(group.len() * seeds.len());
    for seed in &seeds {
        for g in &group {
            let img = apply_symmetric_perm(seed, g)?;
            if !seen.insert(img.clone()) {
                return Err(Error::Internal(format!("duplicate orbit image under {g:?}")));
            }
            out.push(img);
        }
    }
    Ok(out)
}

fn require_order7(sq: &Square) -> Result<()> {
    if sq.order() != 7 {
        return Err(Error::CanonicalOrder(sq.order()));
    }
    Ok(())
}

/// Canonical-form test for order 7: first-row column conditions and the
/// row-minimum ordering `row3 < row1 < row2`, `row_i < row_{8-i}`.
pub fn is_canonical(sq: &Square) -> Result<bool> {
    require_order7(sq)?;
    let x = |j| sq.at(1, j);
    let cols = x(1) < x(7) && x(2) < x(6) && x(3) < x(5) && x(1) < x(2) && x(2) < x(3);
    let m: Vec<u32> = (1..=7).map(|i| sq.row_min(i)).collect();
    let rows = m[0] < m[6] && m[1] < m[5] && m[2] < m[4] && m[2] < m[0] && m[0] < m[1];
    Ok(cols && rows)
}

/// The unique canonical image of an order-7 associative square and the group
/// element producing it.
pub fn canonicalize(sq: &Square) -> Result<(Square, SymmetricPermutation)> {
    require_order7(sq)?;
    if !classify(sq).associative {
        return Err(Error::NotAssociative);
    }
    let n = 7;
    // Orient each mirrored row pair so the smaller minimum is on top.
    let mut pairs: Vec<(u32, usize, usize)> = (1..=3)
        .map(|a| {
            let b = n + 1 - a;
            let (ma, mb) = (sq.row_min(a), sq.row_min(b));
            if ma < mb {
                (ma, a, b)
            } else {
                (mb, b, a)
            }
        })
        .collect();
    pairs.sort_unstable();
    let mut rows = vec![0usize; n];
    // Smallest minimum goes to row 3, then rows 1 and 2.
    for (slot, &(_, top, bottom)) in [3usize, 1, 2].iter().zip(&pairs) {
        rows[slot - 1] = top;
        rows[n - slot] = bottom;
    }
    rows[3] = 4;
    let first = sq.row(rows[0]);
    let mut cpairs: Vec<(u32, usize, usize)> = (1..=3)
        .map(|a| {
            let b = n + 1 - a;
            let (va, vb) = (first[a - 1], first[b - 1]);
            if va < vb {
                (va, a, b)
            } else {
                (vb, b, a)
            }
        })
        .collect();
    cpairs.sort_unstable();
    let mut cols = vec![0usize; n];
    for (pos, &(_, left, right)) in cpairs.iter().enumerate() {
        cols[pos] = left;
        cols[n - 1 - pos] = right;
    }
    cols[3] = 4;
    let perm = SymmetricPermutation::new(rows, cols)?;
    let image = apply_symmetric_perm(sq, &perm)?;
    debug_assert!(is_canonical(&image).unwrap_or(false));
    Ok((image, perm))
}
