//! Brute-force ground truth for small instances.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ctse::CtseInstance;
use crate::emwc::EmwcInstance;
use crate::graph::MultiGraph;
use crate::matroid::{BinaryMatroid, LabelSet};
use crate::solvers::Constraint;

pub const ORACLE_ELEMENT_CAP: usize = 24;
pub const ORACLE_VERTEX_CAP: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{what} has size {size}, above the oracle cap of {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },
}

fn cap(what: &'static str, size: usize, cap: usize) -> Result<(), OracleError> {
    if size > cap {
        Err(OracleError::CapExceeded { what, size, cap })
    } else {
        Ok(())
    }
}

/// All circuits, by walking every subset in Gray-code order and keeping the
/// dependent sets of corank one.
pub fn oracle_circuits(m: &BinaryMatroid) -> Result<BTreeSet<LabelSet>, OracleError> {
    let n = m.len();
    cap("matroid", n, ORACLE_ELEMENT_CAP)?;
    let cols: Vec<Vec<u64>> = (0..n).map(|c| m.matrix().column(c)).collect();
    let words = cols.first().map_or(0, Vec::len);
    let mut acc = vec![0u64; words];
    let mut mask: u32 = 0;
    let mut out = BTreeSet::new();
    for step in 1u32..(1u32 << n) {
        let bit = step.trailing_zeros() as usize;
        mask ^= 1 << bit;
        for (a, c) in acc.iter_mut().zip(&cols[bit]) {
            *a ^= c;
        }
        if acc.iter().any(|&x| x != 0) {
            continue;
        }
        let idx: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let set = m.set_of_indices(idx.iter().copied());
        if m.rank_of(&set).expect("same ground set") + 1 == idx.len() {
            out.insert(idx.iter().map(|&i| m.label(i).to_string()).collect());
        }
    }
    Ok(out)
}

/// Cheapest circuit accepted by `cons`, with its weight. Ties go to the
/// lexicographically smallest label set.
pub fn oracle_constraint(m: &BinaryMatroid, cons: &Constraint) -> Result<Option<(LabelSet, u64)>, OracleError> {
    let mut best: Option<(LabelSet, u64)> = None;
    for c in oracle_circuits(m)? {
        if let Some(w) = cons.check(m, &c) {
            if best.as_ref().is_none_or(|b| w < b.1) {
                best = Some((c, w));
            }
        }
    }
    Ok(best)
}

/// Minimum total weight of a circuit through `terminals`, if at most `ell`.
pub fn oracle_wmsc(
    m: &BinaryMatroid,
    weights: &BTreeMap<String, u64>,
    terminals: &LabelSet,
    ell: u64,
) -> Result<Option<(LabelSet, u64)>, OracleError> {
    let mut best: Option<(LabelSet, u64)> = None;
    for c in oracle_circuits(m)? {
        if !terminals.is_subset(&c) {
            continue;
        }
        let w: u64 = c.iter().map(|e| weights.get(e).copied().unwrap_or(0)).sum();
        if w <= ell && best.as_ref().is_none_or(|b| w < b.1) {
            best = Some((c, w));
        }
    }
    Ok(best)
}

/// A smallest circuit through `terminals`.
pub fn oracle_sc(m: &BinaryMatroid, terminals: &LabelSet) -> Result<Option<LabelSet>, OracleError> {
    Ok(oracle_circuits(m)?
        .into_iter()
        .filter(|c| terminals.is_subset(c))
        .min_by_key(|c| c.len()))
}

fn check_graph(g: &MultiGraph) -> Result<(), OracleError> {
    cap("graph", g.vertex_count(), ORACLE_VERTEX_CAP)
}

/// Cheapest feasible terminal cut-set, by enumerating all minimal cut-sets.
/// The weight counts non-terminal edges only.
pub fn oracle_emwc(inst: &EmwcInstance) -> Result<Option<(LabelSet, u64)>, OracleError> {
    let g = &inst.graph;
    check_graph(g)?;
    let cuts = g
        .enumerate_minimal_cutsets()
        .expect("vertex count below the enumeration cap");
    let extra = |c: &LabelSet| -> u64 {
        c.iter()
            .filter(|l| !inst.terminals.contains(*l))
            .filter_map(|l| g.edge_by_label(l))
            .map(|e| e.weight)
            .sum()
    };
    Ok(cuts
        .into_iter()
        .filter(|c| inst.verify(c))
        .map(|c| {
            let w = extra(&c);
            (c, w)
        })
        .min_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0))))
}

/// Cheapest cycle through the terminals within budget, by enumerating simple cycles.
/// The weight counts non-terminal edges only.
pub fn oracle_ctse(inst: &CtseInstance) -> Result<Option<(LabelSet, u64)>, OracleError> {
    check_graph(&inst.graph)?;
    Ok(inst
        .graph
        .simple_cycles()
        .into_iter()
        .filter(|c| inst.terminals.is_subset(c))
        .map(|c| {
            let w = inst.extra_weight(&c);
            (c, w)
        })
        .filter(|(_, w)| *w <= inst.k)
        .min_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0))))
}
