//! Dense GF(2) matrices and bitmask element sets.

use std::fmt;

const WORD: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[inline]
pub(crate) fn get_bit(words: &[u64], i: usize) -> bool {
    words[i / WORD] >> (i % WORD) & 1 == 1
}

#[inline]
pub(crate) fn flip_bit(words: &mut [u64], i: usize) {
    words[i / WORD] ^= 1 << (i % WORD);
}

#[inline]
pub(crate) fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

#[inline]
pub(crate) fn is_zero(words: &[u64]) -> bool {
    words.iter().all(|&w| w == 0)
}

fn first_bit(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
}

/// Rank of a list of bit vectors. The input is consumed as scratch space.
pub(crate) fn rank_of_vectors(mut vecs: Vec<Vec<u64>>) -> usize {
    let mut rank = 0;
    let n = vecs.len();
    for i in 0..n {
        let Some(p) = first_bit(&vecs[i]) else { continue };
        rank += 1;
        let pivot = vecs[i].clone();
        for v in vecs.iter_mut().skip(i + 1) {
            if get_bit(v, p) {
                xor_into(v, &pivot);
            }
        }
    }
    rank
}

/// Row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<u64>>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Gf2Matrix {
            rows,
            cols,
            data: vec![vec![0; words_for(cols)]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 entries. All rows must have equal length.
    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged row {i}");
            for (j, &b) in r.iter().enumerate() {
                if b & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub(crate) fn from_bit_rows(cols: usize, data: Vec<Vec<u64>>) -> Self {
        Gf2Matrix {
            rows: data.len(),
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        get_bit(&self.data[r], c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        if self.get(r, c) != value {
            flip_bit(&mut self.data[r], c);
        }
    }

    pub(crate) fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r]
    }

    /// Column `c` packed as a bit vector of length `rows`.
    pub fn column(&self, c: usize) -> Vec<u64> {
        let mut out = vec![0; words_for(self.rows)];
        for r in 0..self.rows {
            if self.get(r, c) {
                flip_bit(&mut out, r);
            }
        }
        out
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c) as u8).collect())
            .collect()
    }

    /// Reduced row echelon form with zero rows dropped, plus the pivot columns.
    pub fn rref(&self) -> (Gf2Matrix, Vec<usize>) {
        self.rref_with_order(&(0..self.cols).collect::<Vec<_>>())
    }

    /// Like [`rref`](Self::rref) but scanning pivot columns in the given order.
    pub fn rref_with_order(&self, order: &[usize]) -> (Gf2Matrix, Vec<usize>) {
        let mut rows = self.data.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for &c in order {
            if next == rows.len() {
                break;
            }
            let Some(found) = (next..rows.len()).find(|&r| get_bit(&rows[r], c)) else {
                continue;
            };
            rows.swap(next, found);
            let pivot = rows[next].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != next && get_bit(row, c) {
                    xor_into(row, &pivot);
                }
            }
            pivots.push(c);
            next += 1;
        }
        rows.truncate(next);
        (Gf2Matrix::from_bit_rows(self.cols, rows), pivots)
    }

    pub fn rank(&self) -> usize {
        rank_of_vectors(self.data.clone())
    }

    /// Basis of the null space {x : A x = 0}, one bit vector of length `cols` per basis element.
    pub fn kernel_basis(&self) -> Vec<Vec<u64>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0; words_for(self.cols)];
            flip_bit(&mut v, free);
            for (i, &p) in pivots.iter().enumerate() {
                if r.get(i, free) {
                    flip_bit(&mut v, p);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// A matrix whose row space is the orthogonal complement of this matrix's row space.
    pub fn orthogonal_complement(&self) -> Gf2Matrix {
        Gf2Matrix::from_bit_rows(self.cols, self.kernel_basis())
    }

    /// Keeps only the listed columns, in the listed order.
    pub fn select_columns(&self, keep: &[usize]) -> Gf2Matrix {
        let mut m = Gf2Matrix::zeros(self.rows, keep.len());
        for r in 0..self.rows {
            for (j, &c) in keep.iter().enumerate() {
                if self.get(r, c) {
                    m.set(r, j, true);
                }
            }
        }
        m
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: String = (0..self.cols).map(|c| if self.get(r, c) { '1' } else { '0' }).collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

/// Subset of an ordered ground set, stored as a bitmask.
///
/// `ground` identifies the ground set (a hash of its labels), so that sets from
/// different matroids are not mixed by accident.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet {
    ground: u64,
    size: usize,
    words: Vec<u64>,
}

impl ElementSet {
    pub fn empty(ground: u64, size: usize) -> Self {
        ElementSet {
            ground,
            size,
            words: vec![0; words_for(size)],
        }
    }

    pub fn full(ground: u64, size: usize) -> Self {
        let mut s = Self::empty(ground, size);
        for i in 0..size {
            s.insert(i);
        }
        s
    }

    pub fn from_indices(ground: u64, size: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(ground, size);
        for i in idx {
            s.insert(i);
        }
        s
    }

    pub(crate) fn from_words(ground: u64, size: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(size));
        ElementSet { ground, size, words }
    }

    pub fn ground(&self) -> u64 {
        self.ground
    }

    /// Size of the ground set this set lives in.
    pub fn universe(&self) -> usize {
        self.size
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.size, "element {i} outside ground set of size {}", self.size);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    pub fn remove(&mut self, i: usize) {
        if i < self.size {
            self.words[i / WORD] &= !(1 << (i % WORD));
        }
    }

    pub fn toggle(&mut self, i: usize) {
        assert!(i < self.size);
        flip_bit(&mut self.words, i);
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.size && get_bit(&self.words, i)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        is_zero(&self.words)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + b)
            })
        })
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        assert!(
            self.ground == other.ground && self.size == other.size,
            "element sets over different ground sets"
        );
        ElementSet {
            ground: self.ground,
            size: self.size,
            words: self.words.iter().zip(&other.words).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn sym_diff(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a ^ b)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_rank() {
        assert_eq!(Gf2Matrix::identity(3).rank(), 3);
        assert_eq!(Gf2Matrix::zeros(2, 4).rank(), 0);
    }

    #[test]
    fn kernel_is_orthogonal() {
        let m = Gf2Matrix::from_rows(&[vec![1, 1, 0, 1], vec![0, 1, 1, 1]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in &k {
            for r in 0..m.rows() {
                let dot: u32 = m.row_words(r).iter().zip(v).map(|(a, b)| (a & b).count_ones()).sum();
                assert_eq!(dot % 2, 0);
            }
        }
    }

    #[test]
    fn wide_matrix_spans_words() {
        let mut m = Gf2Matrix::zeros(2, 130);
        m.set(0, 129, true);
        m.set(1, 64, true);
        m.set(1, 129, true);
        assert_eq!(m.rank(), 2);
        assert_eq!(m.kernel_basis().len(), 128);
    }

    #[test]
    fn element_set_ops() {
        let a = ElementSet::from_indices(7, 70, [1, 65, 3]);
        let b = ElementSet::from_indices(7, 70, [3, 4]);
        assert_eq!(a.sym_diff(&b).iter().collect::<Vec<_>>(), vec![1, 4, 65]);
        assert_eq!(a.intersection(&b).len(), 1);
        assert!(!a.is_subset(&b));
    }

    #[test]
    #[should_panic]
    fn mixing_grounds_panics() {
        let a = ElementSet::empty(1, 4);
        let b = ElementSet::empty(2, 4);
        let _ = a.union(&b);
    }
}
