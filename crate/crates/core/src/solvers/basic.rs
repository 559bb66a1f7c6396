//! Solvers for single basic nodes: R10-derived, graphic and cographic.

use std::collections::BTreeMap;

use super::constraint::{Constraint, Group, Pivot};
use super::{SolveError, SolveOutcome, SolverOptions};
use crate::ctse::{solve_ctse, CtseInstance};
use crate::decomp::{BasicNode, NodeKind};
use crate::emwc::{solve_emwc, EmwcInstance};
use crate::graph::MultiGraph;
use crate::matroid::{BinaryMatroid, LabelSet};

/// Nonterminal elements left in an R10-derived node after removing parallels.
pub const R10_FREE_CAP: usize = 10;
/// Elements left in an R10-derived node after the spanning-problem parallel rule.
pub const R10_SPANNING_CAP: usize = 40;
/// Free bits tried by [`cut_search`].
const CUT_SEARCH_BITS: usize = 24;

type Pair = Option<(LabelSet, u64)>;

/// Option index per group together with the summed option weight, for every choice
/// whose sum stays within `cap`.
fn guesses(groups: &[Group], cap: u64) -> Vec<(Vec<usize>, u64)> {
    fn rec(groups: &[Group], cap: u64, cur: &mut Vec<usize>, sum: u64, out: &mut Vec<(Vec<usize>, u64)>) {
        let i = cur.len();
        if i == groups.len() {
            out.push((cur.clone(), sum));
            return;
        }
        for (j, o) in groups[i].options.iter().enumerate() {
            if sum + o.weight <= cap {
                cur.push(j);
                rec(groups, cap, cur, sum + o.weight, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(groups, cap, &mut Vec::new(), 0, &mut out);
    out
}

/// Chosen elements and discarded elements of a guess.
fn split_guess(groups: &[Group], pick: &[usize]) -> (LabelSet, LabelSet) {
    let mut chosen = LabelSet::new();
    let mut dropped = LabelSet::new();
    for (g, &j) in groups.iter().zip(pick) {
        let c = &g.options[j].chosen;
        chosen.extend(c.iter().cloned());
        dropped.extend(g.elements.difference(c).cloned());
    }
    (chosen, dropped)
}

fn keep_better(best: &mut Pair, c: LabelSet, w: u64) {
    if best.as_ref().is_none_or(|b| w < b.1) {
        *best = Some((c, w));
    }
}

/// Prices every edge from the constraint.
fn priced(g: &MultiGraph, cons: &Constraint) -> MultiGraph {
    let mut out = g.clone();
    for e in g.edges() {
        out.set_weight(&e.label, cons.weight(&e.label)).expect("own edge");
    }
    out
}

fn graph_of<'a>(node: &'a BasicNode, want: &'static str) -> Result<&'a MultiGraph, SolveError> {
    match (node.kind(), want) {
        (NodeKind::Graphic(g), "graphic") | (NodeKind::Cographic(g), "cographic") => Ok(g),
        _ => Err(SolveError::WrongKind(want)),
    }
}

fn edge_ids(g: &MultiGraph, labels: &LabelSet) -> Result<Vec<usize>, SolveError> {
    g.edge_indices(labels)
        .map_err(|e| SolveError::Inconsistent(e.to_string()))
}

/// The triangle vertex not incident to the pivot element.
fn pivot_vertex(g: &MultiGraph, p: &Pivot) -> Result<usize, SolveError> {
    let err = || SolveError::Inconsistent(format!("pivot {:?} is not a triangle of the graph", p.triangle));
    let t = g.edge_by_label(&p.t).ok_or_else(err)?;
    let others: Vec<_> = p
        .triangle
        .iter()
        .filter(|l| **l != p.t)
        .map(|l| g.edge_by_label(l).ok_or_else(err))
        .collect::<Result<_, _>>()?;
    let (a, b) = (others[0], others[1]);
    [a.u, a.v]
        .into_iter()
        .find(|&v| (v == b.u || v == b.v) && v != t.u && v != t.v)
        .ok_or_else(err)
}

/// The weighted problem on a graphic node, by guessing group intersections and
/// searching for a cheap cycle through the chosen edges.
fn graphic_core(g: &MultiGraph, cons: &Constraint, opts: &SolverOptions, spanning: bool) -> Result<Pair, SolveError> {
    let positive = cons.groups.iter().all(|x| x.options.iter().all(|o| o.weight >= 1));
    if !spanning && positive && cons.groups.len() as u64 > cons.budget {
        return Ok(None);
    }
    let cap = if spanning { u64::MAX } else { cons.budget };
    let mut best: Pair = None;
    for (pick, s) in guesses(&cons.groups, cap) {
        let (chosen, dropped) = split_guess(&cons.groups, &pick);
        let mut terminals: LabelSet = cons.terminals.union(&chosen).cloned().collect();
        let mut h = g.delete_edges(&edge_ids(g, &dropped)?);
        let mut k = cap - s;
        if let Some(p) = &cons.pivot {
            let v = pivot_vertex(&h, p)?;
            if terminals.iter().any(|l| {
                let e = h.edge_by_label(l).expect("terminal edge");
                e.u == v || e.v == v
            }) {
                continue;
            }
            if !spanning {
                let Some(rest) = k.checked_sub(cons.weight(&p.t)) else {
                    continue;
                };
                k = rest;
            }
            terminals.insert(p.t.clone());
            h = h.delete_vertices(&[v]).0;
        }
        let inst = if spanning {
            let mut unit = h.clone();
            for e in h.edges() {
                unit.set_weight(&e.label, 1).expect("own edge");
            }
            let m = unit.edge_count() as u64;
            CtseInstance::new(unit, terminals, m)
        } else {
            CtseInstance::new(priced(&h, cons), terminals, k)
        };
        if let Some(c) = solve_ctse(&inst, opts.ctse) {
            let w = cons
                .omega(&c)
                .ok_or_else(|| SolveError::Invariant("cycle violates a group".into()))?;
            if spanning {
                return Ok(Some((c, w)));
            }
            keep_better(&mut best, c, w);
        }
    }
    Ok(best)
}

/// Union-find with parity, for forcing the two ends of an edge onto opposite sides.
struct ParityUf {
    parent: Vec<usize>,
    parity: Vec<bool>,
}

impl ParityUf {
    fn new(n: usize) -> Self {
        ParityUf {
            parent: (0..n).collect(),
            parity: vec![false; n],
        }
    }

    fn find(&mut self, x: usize) -> (usize, bool) {
        if self.parent[x] == x {
            return (x, false);
        }
        let (r, p) = self.find(self.parent[x]);
        self.parent[x] = r;
        self.parity[x] ^= p;
        (r, self.parity[x])
    }

    /// Records side(a) xor side(b) = diff; false on contradiction.
    fn union(&mut self, a: usize, b: usize, diff: bool) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return (pa ^ pb) == diff;
        }
        self.parent[ra] = rb;
        self.parity[ra] = pa ^ pb ^ diff;
        true
    }
}

/// Cheapest minimal cut-set of a connected graph that contains every terminal edge
/// and keeps all of `together` on one side. The weight counts non-terminal edges only.
///
/// Terminal edges force their ends apart; the remaining freedom is one side bit per
/// class of vertices linked by terminal edges, searched exhaustively.
pub fn cut_search(g: &MultiGraph, terminals: &LabelSet, together: &[usize], k: u64) -> Result<Pair, SolveError> {
    cut_search_flipped(g, terminals, together, None, k)
}

/// As [`cut_search`]; with `flip`, the sides must stay connected after toggling the
/// vertices marked in `flip`, so that the cut's symmetric difference with the bond
/// of `flip` is again a bond.
fn cut_search_flipped(
    g: &MultiGraph,
    terminals: &LabelSet,
    together: &[usize],
    flip: Option<&[bool]>,
    k: u64,
) -> Result<Pair, SolveError> {
    let n = g.vertex_count();
    if n < 2 {
        return Ok(None);
    }
    let mut uf = ParityUf::new(n);
    for l in terminals {
        let e = g
            .edge_by_label(l)
            .ok_or_else(|| SolveError::Inconsistent(format!("unknown terminal edge `{l}`")))?;
        if !uf.union(e.u, e.v, true) {
            return Ok(None);
        }
    }
    for w in together.windows(2) {
        if !uf.union(w[0], w[1], false) {
            return Ok(None);
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    let mut slot = vec![0usize; n];
    let mut par = vec![false; n];
    for v in 0..n {
        let (r, p) = uf.find(v);
        par[v] = p;
        slot[v] = match roots.iter().position(|&x| x == r) {
            Some(i) => i,
            None => {
                roots.push(r);
                roots.len() - 1
            }
        };
    }
    let bits = roots.len() - 1;
    if bits > CUT_SEARCH_BITS {
        return Err(SolveError::TooLarge(format!("cut search over {bits} free classes")));
    }
    let adj = g.incidence();
    let tmask: Vec<bool> = g.edges().iter().map(|e| terminals.contains(&e.label)).collect();
    let connected = |side: &[bool], want: bool| -> bool {
        let Some(start) = (0..n).find(|&v| side[v] == want) else {
            return false;
        };
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &(_, y) in &adj[x] {
                if side[y] == want && !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == side.iter().filter(|&&s| s == want).count()
    };
    let mut best: Option<(u64, Vec<bool>)> = None;
    let mut side = vec![false; n];
    for mask in 0u64..(1u64 << bits) {
        for v in 0..n {
            let bit = slot[v] > 0 && (mask >> (slot[v] - 1)) & 1 == 1;
            side[v] = par[v] ^ bit;
        }
        let mut w: u64 = 0;
        for (i, e) in g.edges().iter().enumerate() {
            if side[e.u] != side[e.v] && !tmask[i] {
                w = w.saturating_add(e.weight);
            }
        }
        if w > k || best.as_ref().is_some_and(|b| b.0 <= w) {
            continue;
        }
        if !(connected(&side, true) && connected(&side, false)) {
            continue;
        }
        if let Some(f) = flip {
            let toggled: Vec<bool> = side.iter().zip(f).map(|(a, b)| a ^ b).collect();
            if !(connected(&toggled, true) && connected(&toggled, false)) {
                continue;
            }
        }
        best = Some((w, side.clone()));
    }
    Ok(best.map(|(w, side)| {
        let c = g
            .edges()
            .iter()
            .filter(|e| side[e.u] != side[e.v])
            .map(|e| e.label.clone())
            .collect();
        (c, w)
    }))
}

/// The weighted (or, with `spanning`, unpriced) problem on a cographic node, by
/// guessing group intersections and searching for a cut through the chosen edges.
fn cographic_core(
    g0: &MultiGraph,
    cons: &Constraint,
    opts: &SolverOptions,
    spanning: bool,
) -> Result<Pair, SolveError> {
    let positive = cons.groups.iter().all(|x| x.options.iter().all(|o| o.weight >= 1));
    if !spanning && positive && cons.groups.len() as u64 > cons.budget {
        return Ok(None);
    }
    let g = g0.connectify();
    let cap = if spanning { u64::MAX } else { cons.budget };
    let mut best: Pair = None;
    for (pick, s) in guesses(&cons.groups, cap) {
        let (chosen, dropped) = split_guess(&cons.groups, &pick);
        let mut terminals: LabelSet = cons.terminals.union(&chosen).cloned().collect();
        let (h, _) = g.contract_edges(&edge_ids(&g, &dropped)?);
        let mut k = cap - s;
        let mut together = Vec::new();
        let mut flip = None;
        if let Some(p) = &cons.pivot {
            if !spanning {
                let Some(rest) = k.checked_sub(cons.weight(&p.t)) else {
                    continue;
                };
                k = rest;
            }
            terminals.insert(p.t.clone());
            for l in p.triangle.iter().filter(|l| **l != p.t) {
                let e = h.edge_by_label(l).expect("pivot edge survives contraction");
                together.extend([e.u, e.v]);
            }
            together.sort_unstable();
            together.dedup();
            // One side of the triangle's bond; the other endpoint set of the
            // remaining triangle edges lies on a single side of any valid cut.
            let zi = edge_ids(&h, &p.triangle)?;
            let (ids, count) = h.component_ids_with(|i| !zi.contains(&i));
            if count != 2 {
                return Err(SolveError::Invariant("pivot triangle is not a bond of the node".into()));
            }
            flip = Some((0..h.vertex_count()).map(|v| ids[v] == ids[0]).collect::<Vec<bool>>());
        }
        if terminals
            .iter()
            .any(|l| h.edge_by_label(l).is_some_and(|e| e.is_loop()))
        {
            continue;
        }
        let h = if spanning {
            let mut z = h.clone();
            for e in h.edges() {
                z.set_weight(&e.label, 0).expect("own edge");
            }
            z
        } else {
            priced(&h, cons)
        };
        let zero_free = h
            .edges()
            .iter()
            .any(|e| !terminals.contains(&e.label) && !e.is_loop() && e.weight == 0);
        // The engine cannot see the pivot's connectivity condition, so pivots go to
        // the exhaustive search as well.
        let found = if spanning || zero_free || flip.is_some() {
            cut_search_flipped(&h, &terminals, &together, flip.as_deref(), k)?.map(|p| p.0)
        } else {
            solve_emwc(&EmwcInstance::new(h, terminals, together, Vec::new(), k), &opts.emwc)?
        };
        if let Some(c) = found {
            let w = cons
                .omega(&c)
                .ok_or_else(|| SolveError::Invariant("cut violates a group".into()))?;
            if spanning {
                return Ok(Some((c, w)));
            }
            keep_better(&mut best, c, w);
        }
    }
    Ok(best)
}

/// Drops parallel elements outside `keep`, preferring lighter ones; returns the kept
/// elements outside `keep`.
fn dedupe_parallels(m: &BinaryMatroid, keep: &LabelSet, cons: &Constraint) -> Vec<String> {
    let mut order: Vec<usize> = (0..m.len()).filter(|&i| !keep.contains(m.label(i))).collect();
    order.sort_by_key(|&i| (cons.weight(m.label(i)), i));
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        if !kept.iter().any(|&j| m.are_parallel(i, j)) {
            kept.push(i);
        }
    }
    kept.sort_unstable();
    kept.into_iter().map(|i| m.label(i).to_string()).collect()
}

/// Cheapest feasible circuit among `mandatory` plus a subset of `free`.
fn subsets(m: &BinaryMatroid, cons: &Constraint, mandatory: &LabelSet, free: &[String], best: &mut Pair) {
    for mask in 0u64..(1u64 << free.len()) {
        let mut c = mandatory.clone();
        for (i, f) in free.iter().enumerate() {
            if (mask >> i) & 1 == 1 {
                c.insert(f.clone());
            }
        }
        if c.is_empty() {
            continue;
        }
        if let Some(w) = cons.check(m, &c) {
            keep_better(best, c, w);
        }
    }
}

fn r10_weighted(node: &BasicNode, cons: &Constraint) -> Result<Pair, SolveError> {
    let NodeKind::R10Derived(_) = node.kind() else {
        return Err(SolveError::WrongKind("r10"));
    };
    // R10-derived matroids have no odd circuits, so no triangle groups or pivots.
    if !cons.groups.is_empty() || cons.pivot.is_some() {
        return Ok(None);
    }
    let m = node.matroid();
    let free = dedupe_parallels(m, &cons.terminals, cons);
    if free.len() > R10_FREE_CAP {
        return Err(SolveError::Invariant(format!(
            "{} nonterminal elements remain after removing parallels",
            free.len()
        )));
    }
    let mut best = None;
    subsets(m, cons, &cons.terminals, &free, &mut best);
    Ok(best)
}

/// Elements left for the spanning search on an R10-derived node once parallels
/// outside groups and terminals are removed.
pub fn r10_spanning_size(node: &BasicNode, cons: &Constraint) -> usize {
    let fixed: LabelSet = cons.group_elements().union(&cons.terminals).cloned().collect();
    fixed.len() + dedupe_parallels(node.matroid(), &fixed, cons).len()
}

fn r10_spanning(node: &BasicNode, cons: &Constraint) -> Result<Pair, SolveError> {
    let NodeKind::R10Derived(_) = node.kind() else {
        return Err(SolveError::WrongKind("r10"));
    };
    if cons.groups.len() > 10 || cons.pivot.is_some() {
        return Ok(None);
    }
    let m = node.matroid();
    let fixed: LabelSet = cons.group_elements().union(&cons.terminals).cloned().collect();
    let free = dedupe_parallels(m, &fixed, cons);
    if free.len() + fixed.len() > R10_SPANNING_CAP {
        return Err(SolveError::TooLarge(format!(
            "{} elements remain after removing parallels",
            free.len() + fixed.len()
        )));
    }
    let mut best = None;
    for (pick, _) in guesses(&cons.groups, u64::MAX) {
        let (chosen, _) = split_guess(&cons.groups, &pick);
        let mandatory: LabelSet = chosen.union(&cons.terminals).cloned().collect();
        subsets(m, cons, &mandatory, &free, &mut best);
        if best.is_some() {
            break;
        }
    }
    Ok(best)
}

fn confirmed(node: &BasicNode, cons: &Constraint, res: Pair) -> Result<Pair, SolveError> {
    if let Some((c, w)) = &res {
        if cons.check(node.matroid(), c) != Some(*w) {
            return Err(SolveError::Invariant(format!(
                "{} solver returned {c:?} with weight {w}, which is not feasible",
                node.kind_name()
            )));
        }
    }
    Ok(res)
}

/// The weighted problem on an R10-derived node.
pub fn ewmsc_r10(node: &BasicNode, cons: &Constraint) -> Result<SolveOutcome, SolveError> {
    Ok(SolveOutcome::from_pair(confirmed(
        node,
        cons,
        r10_weighted(node, cons)?,
    )?))
}

/// The weighted problem on a graphic node. Minimum weight in exhaustive CTSE mode.
pub fn ewmsc_graphic(node: &BasicNode, cons: &Constraint, opts: &SolverOptions) -> Result<SolveOutcome, SolveError> {
    let g = graph_of(node, "graphic")?;
    Ok(SolveOutcome::from_pair(confirmed(
        node,
        cons,
        graphic_core(g, cons, opts, false)?,
    )?))
}

/// The weighted problem on a cographic node. Any feasible witness.
pub fn ewmsc_cographic(node: &BasicNode, cons: &Constraint, opts: &SolverOptions) -> Result<SolveOutcome, SolveError> {
    let g = graph_of(node, "cographic")?;
    Ok(SolveOutcome::from_pair(confirmed(
        node,
        cons,
        cographic_core(g, cons, opts, false)?,
    )?))
}

/// Dispatches the weighted problem by node kind; the witness is checked.
pub fn ewmsc_node(node: &BasicNode, cons: &Constraint, opts: &SolverOptions) -> Result<Pair, SolveError> {
    let res = match node.kind() {
        NodeKind::R10Derived(_) => r10_weighted(node, cons)?,
        NodeKind::Graphic(g) => graphic_core(g, cons, opts, false)?,
        NodeKind::Cographic(g) => cographic_core(g, cons, opts, false)?,
    };
    confirmed(node, cons, res)
}

/// Minimum-weight feasible circuit of a node, found by lowering the budget below
/// each witness until none remains.
pub fn minimize_node(node: &BasicNode, cons: &Constraint, opts: &SolverOptions) -> Result<Pair, SolveError> {
    let mut cur = cons.clone();
    let mut best = None;
    while let Some((c, w)) = ewmsc_node(node, &cur, opts)? {
        best = Some((c, w));
        if w == 0 {
            break;
        }
        cur.budget = w - 1;
    }
    Ok(best)
}

fn spanning_view(cons: &Constraint) -> Constraint {
    let mut c = cons.clone();
    c.weights = BTreeMap::new();
    c.budget = u64::MAX;
    c
}

/// The spanning problem on an R10-derived node.
pub fn esc_r10(node: &BasicNode, cons: &Constraint) -> Result<SolveOutcome, SolveError> {
    let view = spanning_view(cons);
    let res = confirmed(node, &view, r10_spanning(node, &view)?)?;
    Ok(SolveOutcome::from_pair(res.map(|(c, _)| {
        let n = c.len() as u64;
        (c, n)
    })))
}

/// The spanning problem on a graphic node.
pub fn esc_graphic(node: &BasicNode, cons: &Constraint, opts: &SolverOptions) -> Result<SolveOutcome, SolveError> {
    let g = graph_of(node, "graphic")?;
    let view = spanning_view(cons);
    let res = confirmed(node, &view, graphic_core(g, &view, opts, true)?)?;
    Ok(SolveOutcome::from_pair(res.map(|(c, _)| {
        let n = c.len() as u64;
        (c, n)
    })))
}

/// The spanning problem on a cographic node.
pub fn esc_cographic(node: &BasicNode, cons: &Constraint, opts: &SolverOptions) -> Result<SolveOutcome, SolveError> {
    let g = graph_of(node, "cographic")?;
    let view = spanning_view(cons);
    let res = confirmed(node, &view, cographic_core(g, &view, opts, true)?)?;
    Ok(SolveOutcome::from_pair(res.map(|(c, _)| {
        let n = c.len() as u64;
        (c, n)
    })))
}

/// Dispatches the spanning problem by node kind; the witness is checked. Weights and
/// budget of `cons` are ignored.
pub fn esc_node(node: &BasicNode, cons: &Constraint, opts: &SolverOptions) -> Result<Option<LabelSet>, SolveError> {
    let view = spanning_view(cons);
    let res = match node.kind() {
        NodeKind::R10Derived(_) => r10_spanning(node, &view)?,
        NodeKind::Graphic(g) => graphic_core(g, &view, opts, true)?,
        NodeKind::Cographic(g) => cographic_core(g, &view, opts, true)?,
    };
    Ok(confirmed(node, &view, res)?.map(|p| p.0))
}
