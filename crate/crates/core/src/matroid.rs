//! Binary matroids over labelled ground sets.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::gf2::{self, ElementSet, Gf2Matrix};

/// A set of element labels. Used wherever sets cross matroid boundaries.
pub type LabelSet = BTreeSet<String>;

/// Default ground-set cap for exhaustive circuit enumeration.
pub const ENUMERATION_CAP: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatroidError {
    #[error("element set belongs to a different ground set")]
    GroundMismatch,
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("matrix has {cols} columns but {labels} labels were given")]
    LabelCount { cols: usize, labels: usize },
    #[error("ground set of {size} elements exceeds enumeration cap {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("given set is not a basis")]
    NotABasis,
    #[error("element already lies in the basis")]
    ElementInBasis,
}

pub fn label_set<I, S>(items: I) -> LabelSet
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    items.into_iter().map(Into::into).collect()
}

pub fn sym_diff(a: &LabelSet, b: &LabelSet) -> LabelSet {
    a.symmetric_difference(b).cloned().collect()
}

#[derive(Clone, Debug)]
pub struct BinaryMatroid {
    matrix: Gf2Matrix,
    labels: Vec<String>,
    index: HashMap<String, usize>,
    columns: Vec<Vec<u64>>,
    ground: u64,
}

impl PartialEq for BinaryMatroid {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix && self.labels == other.labels
    }
}

fn ground_id(labels: &[String]) -> u64 {
    let mut h = DefaultHasher::new();
    labels.hash(&mut h);
    h.finish()
}

impl BinaryMatroid {
    pub fn new(matrix: Gf2Matrix, labels: Vec<String>) -> Result<Self, MatroidError> {
        if matrix.cols() != labels.len() {
            return Err(MatroidError::LabelCount {
                cols: matrix.cols(),
                labels: labels.len(),
            });
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(MatroidError::DuplicateLabel(l.clone()));
            }
        }
        let columns = (0..matrix.cols()).map(|c| matrix.column(c)).collect();
        let ground = ground_id(&labels);
        Ok(BinaryMatroid {
            matrix,
            labels,
            index,
            columns,
            ground,
        })
    }

    /// Builds a matroid whose ground elements are labelled `prefix0`, `prefix1`, ...
    pub fn with_default_labels(matrix: Gf2Matrix, prefix: &str) -> Self {
        let labels = (0..matrix.cols()).map(|i| format!("{prefix}{i}")).collect();
        Self::new(matrix, labels).expect("generated labels are distinct")
    }

    pub fn matrix(&self) -> &Gf2Matrix {
        &self.matrix
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn contains_label(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    pub fn ground_labels(&self) -> LabelSet {
        self.labels.iter().cloned().collect()
    }

    pub fn empty_set(&self) -> ElementSet {
        ElementSet::empty(self.ground, self.len())
    }

    pub fn full_set(&self) -> ElementSet {
        ElementSet::full(self.ground, self.len())
    }

    pub fn set_of_indices(&self, idx: impl IntoIterator<Item = usize>) -> ElementSet {
        ElementSet::from_indices(self.ground, self.len(), idx)
    }

    pub fn set_of<'a, I>(&self, labels: I) -> Result<ElementSet, MatroidError>
    where
        I: IntoIterator<Item = &'a String>,
    {
        let mut s = self.empty_set();
        for l in labels {
            let i = self
                .index_of(l)
                .ok_or_else(|| MatroidError::UnknownElement(l.clone()))?;
            s.insert(i);
        }
        Ok(s)
    }

    pub fn labels_of(&self, s: &ElementSet) -> LabelSet {
        s.iter().map(|i| self.labels[i].clone()).collect()
    }

    fn check(&self, s: &ElementSet) -> Result<(), MatroidError> {
        if s.ground() != self.ground || s.universe() != self.len() {
            return Err(MatroidError::GroundMismatch);
        }
        Ok(())
    }

    fn column_list(&self, s: &ElementSet) -> Vec<Vec<u64>> {
        s.iter().map(|i| self.columns[i].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn rank_of(&self, s: &ElementSet) -> Result<usize, MatroidError> {
        self.check(s)?;
        Ok(gf2::rank_of_vectors(self.column_list(s)))
    }

    pub fn is_independent(&self, s: &ElementSet) -> Result<bool, MatroidError> {
        Ok(self.rank_of(s)? == s.len())
    }

    pub fn is_cycle(&self, s: &ElementSet) -> Result<bool, MatroidError> {
        self.check(s)?;
        let mut acc = vec![0u64; gf2::words_for(self.matrix.rows())];
        for i in s.iter() {
            gf2::xor_into(&mut acc, &self.columns[i]);
        }
        Ok(gf2::is_zero(&acc))
    }

    /// A nonempty cycle is a circuit exactly when its columns have a one-dimensional null space.
    pub fn is_circuit(&self, s: &ElementSet) -> Result<bool, MatroidError> {
        if s.is_empty() || !self.is_cycle(s)? {
            return Ok(false);
        }
        Ok(self.rank_of(s)? + 1 == s.len())
    }

    pub fn is_cycle_labels(&self, s: &LabelSet) -> bool {
        self.set_of(s)
            .map(|e| self.is_cycle(&e).unwrap_or(false))
            .unwrap_or(false)
    }

    pub fn is_circuit_labels(&self, s: &LabelSet) -> bool {
        self.set_of(s)
            .map(|e| self.is_circuit(&e).unwrap_or(false))
            .unwrap_or(false)
    }

    pub fn fundamental_circuit(&self, basis: &ElementSet, e: usize) -> Result<ElementSet, MatroidError> {
        self.check(basis)?;
        if e >= self.len() {
            return Err(MatroidError::UnknownElement(e.to_string()));
        }
        if basis.contains(e) {
            return Err(MatroidError::ElementInBasis);
        }
        if basis.len() != self.rank() || !self.is_independent(basis)? {
            return Err(MatroidError::NotABasis);
        }
        let mut with_e = basis.clone();
        with_e.insert(e);
        Ok(self
            .circuit_within(&with_e, e)?
            .expect("basis plus an element is dependent"))
    }

    /// Some circuit contained in `s` that contains `e`, if one exists.
    pub fn circuit_within(&self, s: &ElementSet, e: usize) -> Result<Option<ElementSet>, MatroidError> {
        self.check(s)?;
        if !s.contains(e) {
            return Ok(None);
        }
        // e lies on a cycle inside `cur` iff removing e keeps the rank.
        let closes = |cur: &ElementSet| -> bool {
            let mut without = cur.clone();
            without.remove(e);
            gf2::rank_of_vectors(self.column_list(cur)) == gf2::rank_of_vectors(self.column_list(&without))
        };
        let mut cur = s.clone();
        if !closes(&cur) {
            return Ok(None);
        }
        for f in s.iter().filter(|&f| f != e) {
            let mut trial = cur.clone();
            trial.remove(f);
            if closes(&trial) {
                cur = trial;
            }
        }
        Ok(Some(cur))
    }

    /// Label-level variant of [`circuit_within`](Self::circuit_within).
    pub fn circuit_within_labels(&self, s: &LabelSet, e: &str) -> Option<LabelSet> {
        let set = self.set_of(s).ok()?;
        let ei = self.index_of(e)?;
        self.circuit_within(&set, ei).ok().flatten().map(|c| self.labels_of(&c))
    }

    /// Basis of the cycle space (the null space of the representation).
    pub fn cycle_space_basis(&self) -> Vec<ElementSet> {
        self.matrix
            .kernel_basis()
            .into_iter()
            .map(|w| ElementSet::from_words(self.ground, self.len(), w))
            .collect()
    }

    /// All cycles, including the empty one.
    pub fn enumerate_cycles(&self) -> Result<Vec<ElementSet>, MatroidError> {
        if self.len() > ENUMERATION_CAP {
            return Err(MatroidError::CapExceeded {
                size: self.len(),
                cap: ENUMERATION_CAP,
            });
        }
        let basis = self.cycle_space_basis();
        let mut out = Vec::with_capacity(1 << basis.len());
        let mut cur = self.empty_set();
        out.push(cur.clone());
        for g in 1u64..(1u64 << basis.len()) {
            let flip = g.trailing_zeros() as usize;
            cur = cur.sym_diff(&basis[flip]);
            out.push(cur.clone());
        }
        Ok(out)
    }

    pub fn enumerate_circuits(&self, size_cap: Option<usize>) -> Result<Vec<ElementSet>, MatroidError> {
        let mut out = Vec::new();
        for c in self.enumerate_cycles()? {
            if c.is_empty() || size_cap.is_some_and(|cap| c.len() > cap) {
                continue;
            }
            if self.rank_of(&c)? + 1 == c.len() {
                out.push(c);
            }
        }
        out.sort();
        Ok(out)
    }

    pub fn enumerate_circuit_labels(&self) -> Result<BTreeSet<LabelSet>, MatroidError> {
        Ok(self
            .enumerate_circuits(None)?
            .iter()
            .map(|c| self.labels_of(c))
            .collect())
    }

    /// Dual matroid. The complement representation has the shape [Dᵀ | I] when
    /// this one reduces to [I | D].
    pub fn dual(&self) -> BinaryMatroid {
        BinaryMatroid::new(self.matrix.orthogonal_complement(), self.labels.clone()).expect("labels unchanged")
    }

    pub fn delete(&self, s: &ElementSet) -> Result<BinaryMatroid, MatroidError> {
        self.check(s)?;
        let keep: Vec<usize> = (0..self.len()).filter(|&i| !s.contains(i)).collect();
        Ok(self.restrict_to(&keep))
    }

    pub fn delete_labels(&self, s: &LabelSet) -> Result<BinaryMatroid, MatroidError> {
        let set = self.set_of(s)?;
        self.delete(&set)
    }

    fn restrict_to(&self, keep: &[usize]) -> BinaryMatroid {
        let labels = keep.iter().map(|&i| self.labels[i].clone()).collect();
        BinaryMatroid::new(self.matrix.select_columns(keep), labels).expect("subset of distinct labels")
    }

    /// Restriction to the given labels; the ground order follows this matroid.
    pub fn restrict_labels(&self, s: &LabelSet) -> Result<BinaryMatroid, MatroidError> {
        let set = self.set_of(s)?;
        let keep: Vec<usize> = set.iter().collect();
        Ok(self.restrict_to(&keep))
    }

    /// Contraction of a single element.
    pub fn contract(&self, e: usize) -> Result<BinaryMatroid, MatroidError> {
        if e >= self.len() {
            return Err(MatroidError::UnknownElement(e.to_string()));
        }
        let d = self.dual();
        let del = d.delete(&d.set_of_indices([e]))?;
        Ok(del.dual())
    }

    pub fn add_parallel(&self, e: &str, label: &str) -> Result<BinaryMatroid, MatroidError> {
        let src = self
            .index_of(e)
            .ok_or_else(|| MatroidError::UnknownElement(e.to_string()))?;
        if self.contains_label(label) {
            return Err(MatroidError::DuplicateLabel(label.to_string()));
        }
        let mut m = Gf2Matrix::zeros(self.matrix.rows(), self.len() + 1);
        for r in 0..self.matrix.rows() {
            for c in 0..self.len() {
                if self.matrix.get(r, c) {
                    m.set(r, c, true);
                }
            }
            if self.matrix.get(r, src) {
                m.set(r, self.len(), true);
            }
        }
        let mut labels = self.labels.clone();
        labels.push(label.to_string());
        BinaryMatroid::new(m, labels)
    }

    pub fn relabel(&self, map: &BTreeMap<String, String>) -> Result<BinaryMatroid, MatroidError> {
        let labels = self
            .labels
            .iter()
            .map(|l| map.get(l).cloned().unwrap_or_else(|| l.clone()))
            .collect();
        BinaryMatroid::new(self.matrix.clone(), labels)
    }

    pub fn is_loop(&self, e: usize) -> bool {
        gf2::is_zero(&self.columns[e])
    }

    pub fn loops(&self) -> Vec<usize> {
        (0..self.len()).filter(|&e| self.is_loop(e)).collect()
    }

    /// Coloops are the elements lying in no circuit.
    pub fn coloops(&self) -> Vec<usize> {
        let full = self.full_set();
        let r = self.rank();
        (0..self.len())
            .filter(|&e| {
                let mut s = full.clone();
                s.remove(e);
                gf2::rank_of_vectors(self.column_list(&s)) < r
            })
            .collect()
    }

    pub fn are_parallel(&self, a: usize, b: usize) -> bool {
        a != b && !self.is_loop(a) && self.columns[a] == self.columns[b]
    }
}

/// The 5x10 matrix whose columns are the ten weight-three vectors of GF(2)^5.
pub fn r10() -> BinaryMatroid {
    r10_with_labels(&(0..10).map(|i| format!("r{i}")).collect::<Vec<_>>())
}

pub fn r10_with_labels(labels: &[String]) -> BinaryMatroid {
    assert_eq!(labels.len(), 10);
    let mut m = Gf2Matrix::zeros(5, 10);
    let mut c = 0;
    for a in 0..5 {
        for b in a + 1..5 {
            for d in b + 1..5 {
                m.set(a, c, true);
                m.set(b, c, true);
                m.set(d, c, true);
                c += 1;
            }
        }
    }
    BinaryMatroid::new(m, labels.to_vec()).expect("r10 labels must be distinct")
}
