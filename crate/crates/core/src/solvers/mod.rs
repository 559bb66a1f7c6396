//! Spanning circuit problems on basic matroids and on conflict trees.
//!
//! The weighted problem looks for a circuit through all terminals whose weight
//! outside the terminals stays within a budget; the spanning problem only asks for
//! existence. Both carry a [`Constraint`] that may also prescribe how the circuit
//! meets given element groups and a pivot triangle.

mod basic;
mod constraint;
mod rules;

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::ctse::CtseMode;
use crate::decomp::{compose, BasicNode, ConflictTree, DecompError};
use crate::emwc::{EmwcError, EmwcOptions};
use crate::matroid::{BinaryMatroid, LabelSet};

pub use basic::{
    cut_search, esc_cographic, esc_graphic, esc_node, esc_r10, ewmsc_cographic, ewmsc_graphic, ewmsc_node, ewmsc_r10,
    minimize_node, r10_spanning_size, R10_FREE_CAP, R10_SPANNING_CAP,
};
pub use constraint::{Constraint, Group, GroupOption, Pivot};
pub use rules::{
    leaf_step, scir_rule_1leaf, scir_rule_2leaf, scir_rule_3leaf, wmsc_rule_1leaf, wmsc_rule_2leaf, wmsc_rule_3leaf,
    Lift, Step,
};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Emwc(#[from] EmwcError),
    #[error("inconsistent instance: {0}")]
    Inconsistent(String),
    #[error("{0} node expected")]
    WrongKind(&'static str),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("internal invariant failed: {0}")]
    Invariant(String),
}

/// Which problem a tree instance belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Problem {
    /// Minimum-weight circuits within a budget.
    Weighted,
    /// Existence of a circuit satisfying the constraint.
    Spanning,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverOptions {
    pub emwc: EmwcOptions,
    pub ctse: CtseMode,
}

/// Result of a solver call. A witness is always present on a yes-answer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOutcome {
    pub witness: Option<LabelSet>,
    pub weight: Option<u64>,
}

impl SolveOutcome {
    pub fn no() -> Self {
        SolveOutcome {
            witness: None,
            weight: None,
        }
    }

    pub fn yes(witness: LabelSet, weight: u64) -> Self {
        SolveOutcome {
            witness: Some(witness),
            weight: Some(weight),
        }
    }

    fn from_pair(p: Option<(LabelSet, u64)>) -> Self {
        p.map_or_else(Self::no, |(c, w)| Self::yes(c, w))
    }

    pub fn verdict(&self) -> bool {
        self.witness.is_some()
    }
}

/// A conflict tree with a constraint on the composed matroid.
#[derive(Clone, Debug)]
pub struct TreeInstance {
    pub tree: ConflictTree,
    pub cons: Constraint,
}

impl TreeInstance {
    /// Exact weight of `c` if it is feasible for the composed matroid.
    pub fn check(&self, c: &LabelSet) -> Result<Option<u64>, SolveError> {
        let m = compose(&self.tree)?;
        Ok(self.cons.check(&m, c))
    }
}

/// Checks that the constraint mentions only composed elements, has no pivot, and that
/// every group lies inside one node.
fn check_consistent(tree: &ConflictTree, cons: &Constraint) -> Result<(), SolveError> {
    tree.validate()?;
    let ground = tree.composed_labels();
    let bad = |m: String| Err(SolveError::Inconsistent(m));
    if tree.nodes.len() > 1 && cons.pivot.is_some() {
        return bad("a pivot triangle is only allowed on a single basic node".into());
    }
    for t in &cons.terminals {
        if !ground.contains(t) {
            return bad(format!("terminal `{t}` is not an element of the matroid"));
        }
    }
    for g in &cons.groups {
        if !tree.nodes.iter().any(|n| g.elements.is_subset(&n.labels())) || !g.elements.is_subset(&ground) {
            return bad(format!("group {:?} does not lie inside one node", g.elements));
        }
    }
    Ok(())
}

/// Picks the root: the first node holding a terminal, else one holding a group element.
fn anchored_root(tree: &ConflictTree, cons: &Constraint) -> Option<usize> {
    let anchored = |lab: &String| tree.nodes.iter().position(|n| n.matroid().contains_label(lab));
    cons.terminals
        .iter()
        .find_map(anchored)
        .or_else(|| cons.groups.iter().flat_map(|g| g.elements.iter()).find_map(anchored))
}

/// Solves a tree instance whose root holds a terminal (or, for the spanning problem,
/// a group element). Returns a witness for the composed matroid, unverified.
fn run_rules(inst: TreeInstance, problem: Problem, opts: &SolverOptions) -> Result<Option<LabelSet>, SolveError> {
    let mut cur = inst;
    let mut lifts: Vec<Lift> = Vec::new();
    let base = loop {
        if cur.tree.nodes.len() == 1 {
            let node = &cur.tree.nodes[0];
            break match problem {
                Problem::Weighted => ewmsc_node(node, &cur.cons, opts)?.map(|p| p.0),
                Problem::Spanning => esc_node(node, &cur.cons, opts)?,
            };
        }
        match leaf_step(&cur, problem, opts)? {
            Step::No => return Ok(None),
            Step::Reduced { next, lift } => {
                lifts.push(lift);
                cur = *next;
            }
        }
    };
    let Some(mut c) = base else {
        return Ok(None);
    };
    for lift in lifts.iter().rev() {
        c = lift.apply(&c)?;
    }
    Ok(Some(c))
}

/// Solves a consistent tree instance, returning some feasible witness.
fn solve_tree_once(
    tree: &ConflictTree,
    cons: &Constraint,
    problem: Problem,
    opts: &SolverOptions,
) -> Result<Option<LabelSet>, SolveError> {
    if tree.nodes.len() == 1 {
        let node = &tree.nodes[0];
        return match problem {
            Problem::Weighted => Ok(ewmsc_node(node, cons, opts)?.map(|p| p.0)),
            Problem::Spanning => esc_node(node, cons, opts),
        };
    }
    if let Some(root) = anchored_root(tree, cons) {
        let mut t = tree.clone();
        t.root = root;
        return run_rules(
            TreeInstance {
                tree: t,
                cons: cons.clone(),
            },
            problem,
            opts,
        );
    }
    // Nothing anchors the circuit: try every element as the anchor.
    let mut best: Option<(LabelSet, u64)> = None;
    for e in tree.composed_labels() {
        let mut sub = cons.clone();
        match problem {
            Problem::Weighted => {
                let w = cons.weight(&e);
                let Some(k) = cons.budget.checked_sub(w) else {
                    continue;
                };
                if best.as_ref().is_some_and(|b| b.1 <= w) {
                    continue;
                }
                sub.terminals.insert(e.clone());
                sub.budget = best.as_ref().map_or(k, |b| k.min(b.1 - w - 1));
            }
            Problem::Spanning => sub.groups.push(Group::singleton(&e)),
        }
        let mut t = tree.clone();
        t.root = t.node_of(&e).expect("composed element");
        if let Some(c) = run_rules(TreeInstance { tree: t, cons: sub }, problem, opts)? {
            let w = cons.omega(&c).unwrap_or(0);
            if problem == Problem::Spanning {
                return Ok(Some(c));
            }
            if best.as_ref().is_none_or(|b| w < b.1) {
                best = Some((c, w));
            }
        }
    }
    Ok(best.map(|b| b.0))
}

fn verified(
    tree: &ConflictTree,
    m: &BinaryMatroid,
    cons: &Constraint,
    c: LabelSet,
) -> Result<(LabelSet, u64), SolveError> {
    match cons.check(m, &c) {
        Some(w) => Ok((c, w)),
        None => Err(SolveError::Invariant(format!(
            "witness {c:?} is not feasible for the composed matroid of a {}-node tree",
            tree.nodes.len()
        ))),
    }
}

/// Decides the weighted problem and returns a minimum-weight witness.
///
/// The budget is lowered below each witness found until the instance turns negative.
pub fn solve_ewmsc(tree: &ConflictTree, cons: &Constraint, opts: &SolverOptions) -> Result<SolveOutcome, SolveError> {
    check_consistent(tree, cons)?;
    cons.validate_weighted(&compose(tree)?)?;
    let m = compose(tree)?;
    let mut cur = cons.clone();
    let mut best = None;
    while let Some(c) = solve_tree_once(tree, &cur, Problem::Weighted, opts)? {
        let (c, w) = verified(tree, &m, cons, c)?;
        if w > cur.budget {
            return Err(SolveError::Invariant(format!(
                "witness weight {w} exceeds budget {}",
                cur.budget
            )));
        }
        best = Some((c, w));
        if w == 0 {
            break;
        }
        cur.budget = w - 1;
    }
    Ok(SolveOutcome::from_pair(best))
}

/// Minimum weight circuit through `terminals` with total weight at most `ell`.
/// The reported weight is the total weight of the witness.
pub fn solve_wmsc(
    tree: &ConflictTree,
    terminals: &LabelSet,
    ell: u64,
    opts: &SolverOptions,
) -> Result<SolveOutcome, SolveError> {
    let weights = tree.weights();
    let wt: u64 = terminals.iter().map(|t| weights.get(t).copied().unwrap_or(0)).sum();
    let Some(k) = ell.checked_sub(wt) else {
        check_consistent(tree, &Constraint::weighted(terminals.clone(), weights, 0))?;
        return Ok(SolveOutcome::no());
    };
    let cons = Constraint::weighted(terminals.clone(), weights, k);
    let out = solve_ewmsc(tree, &cons, opts)?;
    Ok(SolveOutcome {
        weight: out.weight.map(|w| w + wt),
        witness: out.witness,
    })
}

/// Decides the spanning problem with groups and an optional pivot.
/// The reported weight is the size of the witness.
pub fn solve_esc(tree: &ConflictTree, cons: &Constraint, opts: &SolverOptions) -> Result<SolveOutcome, SolveError> {
    check_consistent(tree, cons)?;
    let m = compose(tree)?;
    cons.validate(&m)?;
    let spanning = cons.as_spanning();
    match solve_tree_once(tree, &spanning, Problem::Spanning, opts)? {
        Some(c) => {
            let (c, _) = verified(tree, &m, &spanning, c)?;
            let n = c.len() as u64;
            Ok(SolveOutcome::yes(c, n))
        }
        None => Ok(SolveOutcome::no()),
    }
}

/// A circuit containing all of `terminals`.
pub fn solve_sc(tree: &ConflictTree, terminals: &LabelSet, opts: &SolverOptions) -> Result<SolveOutcome, SolveError> {
    solve_esc(tree, &Constraint::spanning(terminals), opts)
}

/// Nodes of degree one other than the root, deepest first.
pub(crate) fn leaves_by_depth(tree: &ConflictTree) -> Vec<usize> {
    let n = tree.nodes.len();
    let mut depth = vec![usize::MAX; n];
    depth[tree.root] = 0;
    let mut queue = VecDeque::from([tree.root]);
    while let Some(x) = queue.pop_front() {
        for (y, _) in tree.neighbors(x) {
            if depth[y] == usize::MAX {
                depth[y] = depth[x] + 1;
                queue.push_back(y);
            }
        }
    }
    let mut leaves: Vec<usize> = (0..n)
        .filter(|&i| i != tree.root && tree.neighbors(i).len() == 1)
        .collect();
    leaves.sort_by_key(|&i| (std::cmp::Reverse(depth[i]), i));
    leaves
}

/// The tree without node `leaf`; indices above it shift down by one.
pub(crate) fn remove_leaf(tree: &ConflictTree, leaf: usize) -> ConflictTree {
    let shift = |i: usize| if i > leaf { i - 1 } else { i };
    let mut nodes: Vec<BasicNode> = tree.nodes.clone();
    nodes.remove(leaf);
    let edges = tree
        .edges
        .iter()
        .filter(|e| e.a != leaf && e.b != leaf)
        .map(|e| crate::decomp::TreeEdge {
            a: shift(e.a),
            b: shift(e.b),
            shared: e.shared.clone(),
        })
        .collect();
    ConflictTree {
        nodes,
        edges,
        root: shift(tree.root),
    }
}

/// Weights restricted to labels of one node.
pub(crate) fn restrict_weights(weights: &BTreeMap<String, u64>, labels: &LabelSet) -> BTreeMap<String, u64> {
    weights
        .iter()
        .filter(|(l, _)| labels.contains(*l))
        .map(|(l, w)| (l.clone(), *w))
        .collect()
}

#[cfg(test)]
mod tests;
