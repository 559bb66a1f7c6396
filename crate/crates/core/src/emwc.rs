//! Minimal cut-sets containing prescribed edges (EMWC) and the bordered variant
//! used by recursive understanding.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{MultiGraph, VertexCut};
use crate::matroid::LabelSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmwcError {
    #[error("graph is not connected")]
    Disconnected,
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("internal invariant failed: {0}")]
    Invariant(String),
}

/// Graph, terminal edges, vertex sets that must land on opposite sides, and the budget
/// on the weight of non-terminal cut edges.
#[derive(Clone, Debug)]
pub struct EmwcInstance {
    pub graph: MultiGraph,
    pub terminals: LabelSet,
    pub r1: Vec<usize>,
    pub r2: Vec<usize>,
    pub k: u64,
}

impl EmwcInstance {
    pub fn new(graph: MultiGraph, terminals: LabelSet, r1: Vec<usize>, r2: Vec<usize>, k: u64) -> Self {
        EmwcInstance {
            graph,
            terminals,
            r1,
            r2,
            k,
        }
    }

    /// Builds an instance from vertex names.
    pub fn from_names(
        graph: MultiGraph,
        terminals: LabelSet,
        r1: &[String],
        r2: &[String],
        k: u64,
    ) -> Result<Self, EmwcError> {
        let lookup = |names: &[String]| -> Result<Vec<usize>, EmwcError> {
            names
                .iter()
                .map(|n| graph.vertex_index(n).ok_or_else(|| EmwcError::UnknownVertex(n.clone())))
                .collect()
        };
        let (a, b) = (lookup(r1)?, lookup(r2)?);
        Ok(Self::new(graph, terminals, a, b, k))
    }

    pub fn check(&self) -> Result<(), EmwcError> {
        if !self.graph.is_connected() {
            return Err(EmwcError::Disconnected);
        }
        for t in &self.terminals {
            if self.graph.edge_index(t).is_none() {
                return Err(EmwcError::UnknownEdge(t.clone()));
            }
        }
        Ok(())
    }

    fn terminal_mask(&self) -> Vec<bool> {
        terminal_mask(&self.graph, &self.terminals)
    }

    /// Whether `c` is a feasible answer for this instance.
    pub fn verify(&self, c: &LabelSet) -> bool {
        is_terminal_cut(&self.graph, &self.terminal_mask(), &self.r1, &self.r2, self.k, c)
    }
}

fn terminal_mask(g: &MultiGraph, t: &LabelSet) -> Vec<bool> {
    g.edges().iter().map(|e| t.contains(&e.label)).collect()
}

/// The two parameters of the separation machinery: cut size `p` and side size `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParamPair {
    pub p: u64,
    pub q: u64,
}

impl ParamPair {
    /// p = 2k and q = k²·2^(4k + 4k·⌈log₂ 4k⌉) + 4k + 1, saturating.
    pub fn for_budget(k: u64) -> Self {
        let log = if k == 0 {
            0
        } else {
            64 - (4 * k - 1).leading_zeros() as u64
        };
        let exp = 4 * k + 4 * k * log;
        let pow = if exp >= 64 { u64::MAX } else { 1u64 << exp };
        let q = (k * k).saturating_mul(pow).saturating_add(4 * k).saturating_add(1);
        ParamPair { p: 2 * k, q }
    }

    pub fn pq(&self) -> u64 {
        self.p.saturating_mul(self.q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColoringMode {
    /// Deterministic family covering every admissible split.
    Exhaustive,
    /// Independent random colorings from a seeded generator.
    Random { seed: u64, rounds: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EmwcOptions {
    /// `None` uses the parameters derived from the budget.
    pub params: Option<ParamPair>,
    pub coloring: ColoringMode,
}

impl Default for EmwcOptions {
    fn default() -> Self {
        EmwcOptions {
            params: None,
            coloring: ColoringMode::Exhaustive,
        }
    }
}

impl EmwcOptions {
    pub fn with_params(p: u64, q: u64) -> Self {
        EmwcOptions {
            params: Some(ParamPair { p, q }),
            coloring: ColoringMode::Exhaustive,
        }
    }

    fn resolve(&self, k: u64) -> ParamPair {
        self.params.unwrap_or_else(|| ParamPair::for_budget(k))
    }
}

fn r_placement_ok(ids: &[usize], r1: &[usize], r2: &[usize]) -> bool {
    let side = |r: &[usize]| -> Option<Option<usize>> {
        let mut it = r.iter().map(|&v| ids[v]);
        match it.next() {
            None => Some(None),
            Some(first) => it.all(|x| x == first).then_some(Some(first)),
        }
    };
    match (side(r1), side(r2)) {
        (Some(Some(a)), Some(Some(b))) => a != b,
        (Some(_), Some(_)) => true,
        _ => false,
    }
}

/// Checks that `c` is a minimal cut-set containing every terminal, within budget,
/// with `r1` and `r2` in distinct components of G − C. The graph must be connected.
pub fn is_terminal_cut(g: &MultiGraph, tmask: &[bool], r1: &[usize], r2: &[usize], k: u64, c: &LabelSet) -> bool {
    let Ok(idx) = g.edge_indices(c) else {
        return false;
    };
    let mut in_c = vec![false; g.edge_count()];
    for &i in &idx {
        in_c[i] = true;
    }
    if (0..g.edge_count()).any(|i| tmask[i] && !in_c[i]) {
        return false;
    }
    let extra: u64 = idx.iter().filter(|&&i| !tmask[i]).map(|&i| g.edge(i).weight).sum();
    if extra > k || !g.is_minimal_cutset_idx(&idx) {
        return false;
    }
    let (ids, _) = g.component_ids_with(|i| !in_c[i]);
    r_placement_ok(&ids, r1, r2)
}

fn cut_labels(g: &MultiGraph, cut: &VertexCut) -> LabelSet {
    cut.crossing(g).into_iter().map(|i| g.edge(i).label.clone()).collect()
}

/// Exhaustive search over non-terminal edge sets within budget.
pub fn brute_force(g: &MultiGraph, tmask: &[bool], r1: &[usize], r2: &[usize], k: u64) -> Option<LabelSet> {
    if intersects(r1, r2) || (0..g.edge_count()).any(|i| tmask[i] && g.edge(i).is_loop()) {
        return None;
    }
    let cand: Vec<usize> = (0..g.edge_count())
        .filter(|&i| !tmask[i] && !g.edge(i).is_loop() && g.edge(i).weight <= k)
        .collect();
    let base: Vec<usize> = (0..g.edge_count()).filter(|&i| tmask[i]).collect();
    let mut chosen = base.clone();
    fn rec(
        g: &MultiGraph,
        cand: &[usize],
        from: usize,
        left: u64,
        chosen: &mut Vec<usize>,
        test: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if test(chosen) {
            return true;
        }
        for j in from..cand.len() {
            let w = g.edge(cand[j]).weight;
            if w <= left {
                chosen.push(cand[j]);
                if rec(g, cand, j + 1, left - w, chosen, test) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut test = |set: &[usize]| -> bool {
        if !g.is_minimal_cutset_idx(set) {
            return false;
        }
        let mut in_c = vec![false; g.edge_count()];
        for &i in set {
            in_c[i] = true;
        }
        let (ids, _) = g.component_ids_with(|i| !in_c[i]);
        r_placement_ok(&ids, r1, r2)
    };
    if rec(g, &cand, 0, k, &mut chosen, &mut test) {
        Some(chosen.iter().map(|&i| g.edge(i).label.clone()).collect())
    } else {
        None
    }
}

fn intersects(a: &[usize], b: &[usize]) -> bool {
    a.iter().any(|x| b.contains(x))
}

// ---------------------------------------------------------------------------
// Odd cycle transversal by iterative compression.

/// Simple adjacency lists of a multigraph. Loops are kept as self-adjacency.
fn simple_adjacency(g: &MultiGraph) -> Vec<Vec<usize>> {
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); g.vertex_count()];
    for e in g.edges() {
        adj[e.u].insert(e.v);
        adj[e.v].insert(e.u);
    }
    adj.into_iter().map(|s| s.into_iter().collect()).collect()
}

/// A set of at most `k` vertices whose removal leaves `g` bipartite.
pub fn oct(g: &MultiGraph, k: usize) -> Option<Vec<usize>> {
    oct_adj(&simple_adjacency(g), k)
}

pub(crate) fn oct_adj(adj: &[Vec<usize>], k: usize) -> Option<Vec<usize>> {
    let mut sol: Vec<usize> = Vec::new();
    for i in 0..adj.len() {
        sol.push(i);
        if sol.len() > k {
            sol = compress(adj, i + 1, &sol, k)?;
        }
    }
    sol.sort_unstable();
    Some(sol)
}

/// Two-coloring of the active vertices outside `removed`, or None if not bipartite.
fn two_color(adj: &[Vec<usize>], active: usize, removed: &[bool]) -> Option<Vec<u8>> {
    let mut color = vec![u8::MAX; active];
    for s in 0..active {
        if removed[s] || color[s] != u8::MAX {
            continue;
        }
        color[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if y >= active || removed[y] {
                    continue;
                }
                if color[y] == u8::MAX {
                    color[y] = 1 - color[x];
                    queue.push_back(y);
                } else if color[y] == color[x] {
                    return None;
                }
            }
        }
    }
    Some(color)
}

/// Shrinks a transversal of size k+1 of the graph on the first `active` vertices to size ≤ k.
fn compress(adj: &[Vec<usize>], active: usize, s: &[usize], k: usize) -> Option<Vec<usize>> {
    let m = s.len();
    let mut in_s = vec![false; active];
    for &v in s {
        in_s[v] = true;
    }
    let side = two_color(adj, active, &in_s).expect("previous transversal leaves a bipartite graph");
    let total = 3usize.pow(m as u32);
    for code in 0..total {
        // 0 = delete, 1 = left, 2 = right
        let mut assign = vec![0u8; m];
        let mut c = code;
        for a in assign.iter_mut() {
            *a = (c % 3) as u8;
            c /= 3;
        }
        let deleted = assign.iter().filter(|&&a| a == 0).count();
        if deleted > k {
            continue;
        }
        let mut label = vec![0u8; active];
        for (j, &v) in s.iter().enumerate() {
            label[v] = assign[j];
        }
        let consistent = s
            .iter()
            .all(|&v| label[v] == 0 || adj[v].iter().all(|&y| y >= active || !in_s[y] || label[y] != label[v]));
        if !consistent {
            continue;
        }
        let mut budget = k - deleted;
        // need bit 1: must end on the left; bit 2: must end on the right.
        let mut need = vec![0u8; active];
        for &v in s {
            if label[v] == 0 {
                continue;
            }
            let bit = if label[v] == 1 { 2 } else { 1 };
            for &y in &adj[v] {
                if y < active && !in_s[y] {
                    need[y] |= bit;
                }
            }
        }
        let mut forced = Vec::new();
        for v in 0..active {
            if !in_s[v] && need[v] == 3 {
                forced.push(v);
            }
        }
        if forced.len() > budget {
            continue;
        }
        budget -= forced.len();
        let mut blocked = in_s.clone();
        for &v in &forced {
            blocked[v] = true;
        }
        let mut keep = Vec::new();
        let mut flip = Vec::new();
        for v in 0..active {
            if blocked[v] || need[v] == 0 {
                continue;
            }
            let target = if need[v] == 1 { 0 } else { 1 };
            if target == side[v] {
                keep.push(v);
            } else {
                flip.push(v);
            }
        }
        if let Some(cut) = min_vertex_cut(adj, active, &blocked, &keep, &flip, budget) {
            let mut out: Vec<usize> = s
                .iter()
                .zip(&assign)
                .filter(|(_, &a)| a == 0)
                .map(|(&v, _)| v)
                .collect();
            out.extend(forced);
            out.extend(cut);
            return Some(out);
        }
    }
    None
}

/// Smallest vertex set (terminals deletable) separating `from` and `to`, if its size is ≤ limit.
fn min_vertex_cut(
    adj: &[Vec<usize>],
    active: usize,
    blocked: &[bool],
    from: &[usize],
    to: &[usize],
    limit: usize,
) -> Option<Vec<usize>> {
    if from.is_empty() || to.is_empty() {
        return Some(Vec::new());
    }
    const INF: i32 = i32::MAX / 4;
    let source = 2 * active;
    let sink = source + 1;
    let mut net = FlowNet::new(sink + 1);
    for v in 0..active {
        if blocked[v] {
            continue;
        }
        net.add(2 * v, 2 * v + 1, 1);
        for &y in &adj[v] {
            if y < active && !blocked[y] && y != v {
                net.add(2 * v + 1, 2 * y, INF);
            }
        }
    }
    for &v in from {
        net.add(source, 2 * v, INF);
    }
    for &v in to {
        net.add(2 * v + 1, sink, INF);
    }
    let flow = net.max_flow(source, sink, limit as i32 + 1);
    if flow as usize > limit {
        return None;
    }
    let reach = net.reachable(source);
    Some(
        (0..active)
            .filter(|&v| !blocked[v] && reach[2 * v] && !reach[2 * v + 1])
            .collect(),
    )
}

struct FlowNet {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i32>,
}

impl FlowNet {
    fn new(n: usize) -> Self {
        FlowNet {
            head: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn add(&mut self, a: usize, b: usize, c: i32) {
        self.head[a].push(self.to.len());
        self.to.push(b);
        self.cap.push(c);
        self.head[b].push(self.to.len());
        self.to.push(a);
        self.cap.push(0);
    }

    fn max_flow(&mut self, s: usize, t: usize, stop: i32) -> i32 {
        let mut flow = 0;
        while flow < stop {
            let mut prev = vec![usize::MAX; self.head.len()];
            let mut seen = vec![false; self.head.len()];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                if x == t {
                    break;
                }
                for &e in &self.head[x] {
                    let y = self.to[e];
                    if self.cap[e] > 0 && !seen[y] {
                        seen[y] = true;
                        prev[y] = e;
                        queue.push_back(y);
                    }
                }
            }
            if !seen[t] {
                break;
            }
            let mut v = t;
            while v != s {
                let e = prev[v];
                self.cap[e] -= 1;
                self.cap[e ^ 1] += 1;
                v = self.to[e ^ 1];
            }
            flow += 1;
        }
        flow
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &e in &self.head[x] {
                let y = self.to[e];
                if self.cap[e] > 0 && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }
}

// ---------------------------------------------------------------------------
// Initial cut through the transversal reduction.

/// A cut (A,B) with every terminal crossing and non-terminal crossing weight at most `k`,
/// found by reduction to odd cycle transversal. None if no such cut exists.
pub fn initial_cut(g: &MultiGraph, terminals: &LabelSet, k: u64) -> Option<VertexCut> {
    initial_cut_mask(g, &terminal_mask(g, terminals), k)
}

fn initial_cut_mask(g: &MultiGraph, tmask: &[bool], k: u64) -> Option<VertexCut> {
    let copies = (k + 1) as usize;
    let n = g.vertex_count();
    let mut terminal_pairs = BTreeSet::new();
    let mut subdivided = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        if e.is_loop() {
            if tmask[i] {
                return None;
            }
            continue;
        }
        if tmask[i] {
            terminal_pairs.insert((e.u.min(e.v), e.u.max(e.v)));
        } else {
            let r = e.weight.min(k + 1) as usize;
            if r > 0 {
                subdivided.push((e.u, e.v, r));
            }
        }
    }
    let twin = |v: usize, j: usize| v * copies + j;
    let mut total = n * copies;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); total];
    let link = |adj: &mut Vec<Vec<usize>>, a: usize, b: usize| {
        adj[a].push(b);
        adj[b].push(a);
    };
    for &(u, v) in &terminal_pairs {
        for a in 0..copies {
            for b in 0..copies {
                link(&mut adj, twin(u, a), twin(v, b));
            }
        }
    }
    for &(u, v, r) in &subdivided {
        for _ in 0..r {
            let z = total;
            total += 1;
            adj.push(Vec::new());
            for a in 0..copies {
                link(&mut adj, z, twin(u, a));
                link(&mut adj, z, twin(v, a));
            }
        }
    }
    let s = oct_adj(&adj, k as usize)?;
    let mut removed = vec![false; total];
    for &v in &s {
        removed[v] = true;
    }
    let color = two_color(&adj, total, &removed).expect("transversal leaves a bipartite graph");
    let in_a = (0..n)
        .map(|v| {
            let j = (0..copies)
                .find(|&j| !removed[twin(v, j)])
                .expect("k+1 twins outlive k deletions");
            color[twin(v, j)] == 0
        })
        .collect();
    Some(VertexCut { in_a })
}

// ---------------------------------------------------------------------------
// Good separations and separation families.

fn binomial_sum(n: usize, upto: usize) -> u128 {
    let mut total: u128 = 0;
    let mut c: u128 = 1;
    for j in 0..=upto.min(n) {
        total += c;
        c = c * (n - j) as u128 / (j + 1) as u128;
    }
    total
}

/// A cut with both sides larger than `q`, at most `p` crossing edges, and both sides
/// connected. None means the graph is (pq, p)-unbreakable.
pub fn good_separation(g: &MultiGraph, q: u64, p: u64) -> Option<VertexCut> {
    let n = g.vertex_count();
    if (n as u64) < q.saturating_mul(2).saturating_add(2) {
        return None;
    }
    let real: Vec<usize> = (0..g.edge_count()).filter(|&i| !g.edge(i).is_loop()).collect();
    let by_edges = binomial_sum(real.len(), p as usize);
    if n <= 24 && (1u128 << (n - 1)) <= by_edges {
        let need = q as usize + 1;
        for mask in 0u64..(1u64 << (n - 1)) {
            let a_size = 1 + mask.count_ones() as usize;
            if a_size < need || n - a_size < need {
                continue;
            }
            let in_a: Vec<bool> = (0..n).map(|v| v == 0 || mask >> (v - 1) & 1 == 1).collect();
            let crossing = real.iter().filter(|&&i| in_a[g.edge(i).u] != in_a[g.edge(i).v]).count();
            if crossing as u64 > p {
                continue;
            }
            let in_b: Vec<bool> = in_a.iter().map(|x| !x).collect();
            if g.induces_connected(&in_a) && g.induces_connected(&in_b) {
                return Some(VertexCut { in_a });
            }
        }
        return None;
    }
    let mut pick = Vec::new();
    fn rec(g: &MultiGraph, real: &[usize], from: usize, left: u64, q: u64, pick: &mut Vec<usize>) -> Option<VertexCut> {
        if !pick.is_empty() {
            let mut removed = vec![false; g.edge_count()];
            for &i in pick.iter() {
                removed[i] = true;
            }
            let (ids, count) = g.component_ids_with(|i| !removed[i]);
            if count == 2 && pick.iter().all(|&i| ids[g.edge(i).u] != ids[g.edge(i).v]) {
                let a = ids.iter().filter(|&&c| c == 0).count() as u64;
                let b = ids.len() as u64 - a;
                if a > q && b > q {
                    return Some(VertexCut {
                        in_a: ids.iter().map(|&c| c == 0).collect(),
                    });
                }
            }
        }
        if left == 0 {
            return None;
        }
        for j in from..real.len() {
            pick.push(real[j]);
            if let Some(c) = rec(g, real, j + 1, left - 1, q, pick) {
                return Some(c);
            }
            pick.pop();
        }
        None
    }
    rec(g, &real, 0, p, q, &mut pick)
}

/// Subsets S of `universe` such that every disjoint pair (A, B) with |A| ≤ a and |B| ≤ b
/// has A ⊆ S and B ∩ S = ∅ for some member S.
#[derive(Clone, Debug)]
pub struct SeparationFamily {
    pub sets: Vec<Vec<usize>>,
    /// Upper bound on the probability that a fixed pair is not split (0 when exhaustive).
    pub failure_bound: f64,
}

pub fn separation_family(universe: &[usize], a: u64, b: u64, mode: ColoringMode) -> SeparationFamily {
    let n = universe.len();
    match mode {
        ColoringMode::Exhaustive if n <= 20 => {
            let (a, b) = (a.min(n as u64) as usize, b.min(n as u64) as usize);
            let power = 1u128 << n;
            let by_a = binomial_sum(n, a);
            let by_b = binomial_sum(n, b);
            let sets = if power <= by_a.min(by_b) {
                (0..(1u64 << n))
                    .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).map(|i| universe[i]).collect())
                    .collect()
            } else if by_a <= by_b {
                subsets_up_to(universe, a)
            } else {
                subsets_up_to(universe, b)
                    .into_iter()
                    .map(|out| universe.iter().copied().filter(|v| !out.contains(v)).collect())
                    .collect()
            };
            SeparationFamily {
                sets,
                failure_bound: 0.0,
            }
        }
        ColoringMode::Exhaustive => random_family(universe, a, b, 0, default_rounds(a, b)),
        ColoringMode::Random { seed, rounds } => random_family(universe, a, b, seed, rounds),
    }
}

fn split_probability(a: u64, b: u64) -> f64 {
    if a == 0 || b == 0 {
        return 1.0;
    }
    let pr = a as f64 / (a + b) as f64;
    pr.powi(a as i32) * (1.0 - pr).powi(b as i32)
}

/// Rounds so that a fixed pair is missed with probability at most 1e-6.
pub fn default_rounds(a: u64, b: u64) -> usize {
    let p = split_probability(a, b);
    ((1e6f64).ln() / p).ceil().min(1e7) as usize
}

fn random_family(universe: &[usize], a: u64, b: u64, seed: u64, rounds: usize) -> SeparationFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pr = if a + b == 0 { 0.5 } else { a as f64 / (a + b) as f64 };
    let sets = (0..rounds.max(1))
        .map(|_| universe.iter().copied().filter(|_| rng.gen_bool(pr)).collect())
        .collect();
    let miss = (1.0 - split_probability(a, b)).powi(rounds.max(1) as i32);
    SeparationFamily {
        sets,
        failure_bound: miss,
    }
}

fn subsets_up_to(universe: &[usize], size: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut cur = Vec::new();
    fn rec(u: &[usize], from: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            return;
        }
        for j in from..u.len() {
            cur.push(u[j]);
            out.push(cur.clone());
            rec(u, j + 1, size, cur, out);
            cur.pop();
        }
    }
    rec(universe, 0, size, &mut cur, &mut out);
    out
}

// ---------------------------------------------------------------------------
// Random separation on unbreakable graphs.

/// Solves an instance on a (pq, p)-unbreakable graph. Unbreakability is the caller's duty.
pub fn solve_unbreakable(inst: &EmwcInstance, params: ParamPair, mode: ColoringMode) -> Option<LabelSet> {
    solve_unbreakable_raw(
        &inst.graph,
        &inst.terminal_mask(),
        &inst.r1,
        &inst.r2,
        inst.k,
        params,
        mode,
    )
}

fn solve_unbreakable_raw(
    g: &MultiGraph,
    tmask: &[bool],
    r1: &[usize],
    r2: &[usize],
    k: u64,
    params: ParamPair,
    mode: ColoringMode,
) -> Option<LabelSet> {
    if intersects(r1, r2) {
        return None;
    }
    let n = g.vertex_count();
    let pq = params.pq();
    if n as u64 <= pq {
        return brute_force(g, tmask, r1, r2, k);
    }
    let start = initial_cut_mask(g, tmask, k)?;
    let universe: Vec<usize> = (0..n).collect();
    let family = separation_family(&universe, pq, params.p, mode);
    let adj = g.incidence();
    let mut tried = BTreeSet::new();
    for red_set in &family.sets {
        let mut red = vec![false; n];
        for &v in red_set {
            red[v] = true;
        }
        let comps = reduce_coloring(g, &adj, tmask, &start, &mut red);
        if !tried.insert(comps.clone()) {
            continue;
        }
        if comps.len() >= 63 {
            continue;
        }
        for mask in 0u64..(1u64 << comps.len()) {
            let mut in_a = start.in_a.clone();
            for (j, comp) in comps.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    for &v in comp {
                        in_a[v] = !in_a[v];
                    }
                }
            }
            let cand = cut_labels(g, &VertexCut { in_a });
            if is_terminal_cut(g, tmask, r1, r2, k, &cand) {
                return Some(cand);
            }
        }
    }
    None
}

/// Applies the terminal and crossing recoloring rules until neither fires and returns
/// the surviving red components.
fn reduce_coloring(
    g: &MultiGraph,
    adj: &[Vec<(usize, usize)>],
    tmask: &[bool],
    start: &VertexCut,
    red: &mut [bool],
) -> Vec<Vec<usize>> {
    loop {
        let comps = red_components(adj, red);
        let mut changed = false;
        for comp in &comps {
            let inside: BTreeSet<usize> = comp.iter().copied().collect();
            let mut touches_blue_terminal = false;
            let mut crossing = false;
            for &x in comp {
                for &(ei, y) in &adj[x] {
                    if inside.contains(&y) {
                        continue;
                    }
                    if tmask[ei] && !red[y] {
                        touches_blue_terminal = true;
                    }
                    if start.in_a[x] != start.in_a[y] {
                        crossing = true;
                    }
                }
            }
            if touches_blue_terminal || !crossing {
                for &x in comp {
                    red[x] = false;
                }
                changed = true;
            }
        }
        if !changed {
            let _ = g;
            return comps;
        }
    }
}

fn red_components(adj: &[Vec<(usize, usize)>], red: &[bool]) -> Vec<Vec<usize>> {
    let n = red.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if !red[s] || seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &(_, y) in &adj[x] {
                if red[y] && !seen[y] {
                    seen[y] = true;
                    comp.push(y);
                    stack.push(y);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

// ---------------------------------------------------------------------------
// Bordered variant and recursive understanding.

#[derive(Clone, Debug)]
pub struct BorderInstance {
    pub base: EmwcInstance,
    /// Border terminal vertices. Positions, not vertices, index the output keys.
    pub border: Vec<usize>,
}

/// One border contraction plus a budget.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BorderKey {
    /// Partition of border positions into blocks.
    pub blocks: Vec<Vec<usize>>,
    /// For each block, true if it joins the first terminal set.
    pub sides: Vec<bool>,
    pub budget: u64,
}

#[derive(Clone, Debug, Default)]
pub struct BorderOutput {
    pub entries: BTreeMap<BorderKey, Option<LabelSet>>,
}

impl BorderOutput {
    pub fn witnesses(&self) -> impl Iterator<Item = &LabelSet> {
        self.entries.values().flatten()
    }
}

/// The graph and terminal vertex sets after contracting each block of a border partition.
pub fn border_contraction(
    g: &MultiGraph,
    r1: &[usize],
    r2: &[usize],
    border: &[usize],
    blocks: &[Vec<usize>],
    sides: &[bool],
) -> (MultiGraph, Vec<usize>, Vec<usize>) {
    let groups: Vec<Vec<usize>> = blocks.iter().map(|b| b.iter().map(|&p| border[p]).collect()).collect();
    let (h, map) = g.contract_vertex_groups(&groups);
    let mut a: BTreeSet<usize> = r1.iter().map(|&v| map[v]).collect();
    let mut b: BTreeSet<usize> = r2.iter().map(|&v| map[v]).collect();
    for (blk, &s) in blocks.iter().zip(sides) {
        let v = map[border[blk[0]]];
        if s {
            a.insert(v);
        } else {
            b.insert(v);
        }
    }
    (h, a.into_iter().collect(), b.into_iter().collect())
}

/// All set partitions of {0, .., m-1}, blocks in order of first element.
pub fn set_partitions(m: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    fn rec(i: usize, m: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == m {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            rec(i + 1, m, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        rec(i + 1, m, blocks, out);
        blocks.pop();
    }
    rec(0, m, &mut blocks, &mut out);
    out
}

fn border_keys(m: usize) -> Vec<(Vec<Vec<usize>>, Vec<bool>)> {
    let mut out = Vec::new();
    for blocks in set_partitions(m) {
        let t = blocks.len();
        for mask in 0u64..(1u64 << t) {
            let sides = (0..t).map(|j| mask >> j & 1 == 1).collect();
            out.push((blocks.clone(), sides));
        }
    }
    out
}

#[derive(Clone, Copy)]
enum LeafSolver {
    Unbreakable,
    Exact,
}

struct Ctx {
    params: ParamPair,
    mode: ColoringMode,
}

pub fn border_solve(inst: &BorderInstance, opts: &EmwcOptions) -> BorderOutput {
    let ctx = Ctx {
        params: opts.resolve(inst.base.k),
        mode: opts.coloring,
    };
    let tmask = inst.base.terminal_mask();
    let entries = border_rec(
        &ctx,
        &inst.base.graph,
        &tmask,
        &inst.base.r1,
        &inst.base.r2,
        inst.base.k,
        &inst.border,
    );
    BorderOutput { entries }
}

fn all_empty(m: usize, k: u64) -> BTreeMap<BorderKey, Option<LabelSet>> {
    let mut out = BTreeMap::new();
    for (blocks, sides) in border_keys(m) {
        for budget in 0..=k {
            out.insert(
                BorderKey {
                    blocks: blocks.clone(),
                    sides: sides.clone(),
                    budget,
                },
                None,
            );
        }
    }
    out
}

fn border_rec(
    ctx: &Ctx,
    g: &MultiGraph,
    tmask: &[bool],
    r1: &[usize],
    r2: &[usize],
    k: u64,
    border: &[usize],
) -> BTreeMap<BorderKey, Option<LabelSet>> {
    // Stopping rule. Components of G − T that hold no border vertex can never merge,
    // so two of them plus anything else leave at least three sides.
    let (ids, count) = g.component_ids_with(|i| !tmask[i]);
    let mut has_border = vec![false; count];
    for &v in border {
        has_border[ids[v]] = true;
    }
    let plain = has_border.iter().filter(|&&b| !b).count();
    let marked = count - plain;
    if plain >= 2 && !(plain == 2 && marked == 0) {
        return all_empty(border.len(), k);
    }

    let Some(sep) = good_separation(g, ctx.params.q, ctx.params.p) else {
        return solve_each_key(ctx, g, tmask, r1, r2, k, border, LeafSolver::Unbreakable);
    };

    // Recurse on the side holding at most p distinct border vertices.
    let distinct =
        |side: bool| -> BTreeSet<usize> { border.iter().copied().filter(|&v| sep.in_a[v] == side).collect() };
    let side = distinct(true).len() as u64 <= ctx.params.p;
    let in_u: Vec<bool> = sep.in_a.iter().map(|&a| a == side).collect();
    let (sub, map) = g.induced(&in_u);
    let mut sub_border: BTreeSet<usize> = distinct(side).into_iter().map(|v| map[v]).collect();
    for e in g.edges() {
        if in_u[e.u] != in_u[e.v] {
            let inner = if in_u[e.u] { e.u } else { e.v };
            sub_border.insert(map[inner]);
        }
    }
    let sub_border: Vec<usize> = sub_border.into_iter().collect();
    let sub_t = terminal_mask(&sub, &labels_where(g, tmask));
    let sub_r1: Vec<usize> = r1.iter().filter(|&&v| in_u[v]).map(|&v| map[v]).collect();
    let sub_r2: Vec<usize> = r2.iter().filter(|&&v| in_u[v]).map(|&v| map[v]).collect();
    let sub_out = border_rec(ctx, &sub, &sub_t, &sub_r1, &sub_r2, k, &sub_border);
    let keep: BTreeSet<String> = sub_out.values().flatten().flatten().cloned().collect();

    let contract: Vec<usize> = (0..g.edge_count())
        .filter(|&i| {
            let e = g.edge(i);
            in_u[e.u] && in_u[e.v] && !tmask[i] && !keep.contains(&e.label)
        })
        .collect();
    let (reduced, alpha) = g.contract_edges(&contract);
    if reduced.vertex_count() >= g.vertex_count() {
        return solve_each_key(ctx, g, tmask, r1, r2, k, border, LeafSolver::Exact);
    }
    let red_t = terminal_mask(&reduced, &labels_where(g, tmask));
    let red_r1: Vec<usize> = r1.iter().map(|&v| alpha[v]).collect();
    let red_r2: Vec<usize> = r2.iter().map(|&v| alpha[v]).collect();
    let red_border: Vec<usize> = border.iter().map(|&v| alpha[v]).collect();
    border_rec(ctx, &reduced, &red_t, &red_r1, &red_r2, k, &red_border)
}

fn labels_where(g: &MultiGraph, mask: &[bool]) -> LabelSet {
    (0..g.edge_count())
        .filter(|&i| mask[i])
        .map(|i| g.edge(i).label.clone())
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn solve_each_key(
    ctx: &Ctx,
    g: &MultiGraph,
    tmask: &[bool],
    r1: &[usize],
    r2: &[usize],
    k: u64,
    border: &[usize],
    how: LeafSolver,
) -> BTreeMap<BorderKey, Option<LabelSet>> {
    let terminals = labels_where(g, tmask);
    let mut out = BTreeMap::new();
    for (blocks, sides) in border_keys(border.len()) {
        let (h, a, b) = border_contraction(g, r1, r2, border, &blocks, &sides);
        let ht = terminal_mask(&h, &terminals);
        let mut found: Vec<Option<LabelSet>> = vec![None; k as usize + 1];
        if !intersects(&a, &b) {
            // Solve for the largest budget, then retry below the weight found.
            let mut budget = Some(k);
            while let Some(bud) = budget {
                let res = match how {
                    LeafSolver::Unbreakable => solve_unbreakable_raw(&h, &ht, &a, &b, bud, ctx.params, ctx.mode),
                    LeafSolver::Exact => brute_force(&h, &ht, &a, &b, bud),
                };
                let Some(c) = res else { break };
                assert!(
                    is_terminal_cut(&h, &ht, &a, &b, bud, &c),
                    "border witness failed verification"
                );
                let w = h.weight_of(&c) - h.weight_of(&c.intersection(&terminals).cloned().collect());
                for slot in found.iter_mut().take(bud as usize + 1).skip(w as usize) {
                    *slot = Some(c.clone());
                }
                budget = w.checked_sub(1);
            }
        }
        for (budget, f) in found.into_iter().enumerate() {
            out.insert(
                BorderKey {
                    blocks: blocks.clone(),
                    sides: sides.clone(),
                    budget: budget as u64,
                },
                f,
            );
        }
    }
    out
}

/// Decides the instance and returns a verified witness.
pub fn solve_emwc(inst: &EmwcInstance, opts: &EmwcOptions) -> Result<Option<LabelSet>, EmwcError> {
    inst.check()?;
    if intersects(&inst.r1, &inst.r2) {
        return Ok(None);
    }
    let out = border_solve(
        &BorderInstance {
            base: inst.clone(),
            border: Vec::new(),
        },
        opts,
    );
    let key = BorderKey {
        blocks: Vec::new(),
        sides: Vec::new(),
        budget: inst.k,
    };
    let res = out.entries.get(&key).cloned().flatten();
    if let Some(c) = &res {
        if !inst.verify(c) {
            return Err(EmwcError::Invariant(format!("returned cut {c:?} fails verification")));
        }
    }
    Ok(res)
}

/// Weight of the cut between A₁△A₂ and its complement.
pub fn interaction_weight(g: &MultiGraph, c1: &VertexCut, c2: &VertexCut) -> u64 {
    let x: Vec<bool> = c1.in_a.iter().zip(&c2.in_a).map(|(a, b)| a != b).collect();
    g.edges().iter().filter(|e| x[e.u] != x[e.v]).map(|e| e.weight).sum()
}

/// min(|A₁△A₂|, |A₁△B₂|).
pub fn cut_distance(c1: &VertexCut, c2: &VertexCut) -> usize {
    let d = c1.in_a.iter().zip(&c2.in_a).filter(|(a, b)| a != b).count();
    d.min(c1.in_a.len() - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::label_set;

    fn c4() -> MultiGraph {
        MultiGraph::from_edge_list(&[
            ("ab", "a", "b", 1),
            ("bc", "b", "c", 1),
            ("cd", "c", "d", 1),
            ("da", "d", "a", 1),
        ])
    }

    fn cycle(n: usize) -> MultiGraph {
        let mut g = MultiGraph::new();
        for i in 0..n {
            g.add_named_edge(&format!("e{i}"), &format!("v{i}"), &format!("v{}", (i + 1) % n), 1)
                .unwrap();
        }
        g
    }

    fn clique(prefix: &str, n: usize) -> MultiGraph {
        let mut g = MultiGraph::new();
        for i in 0..n {
            g.ensure_vertex(&format!("{prefix}{i}"));
        }
        for i in 0..n {
            for j in i + 1..n {
                g.add_named_edge(
                    &format!("{prefix}{i}-{j}"),
                    &format!("{prefix}{i}"),
                    &format!("{prefix}{j}"),
                    1,
                )
                .unwrap();
            }
        }
        g
    }

    #[test]
    fn oct_examples() {
        assert!(oct(&cycle(5), 1).is_some());
        assert_eq!(oct(&cycle(4), 0), Some(vec![]));
        let mut two = cycle(3);
        for (l, u, v) in [("f0", "w0", "w1"), ("f1", "w1", "w2"), ("f2", "w2", "w0")] {
            two.add_named_edge(l, u, v, 1).unwrap();
        }
        assert_eq!(oct(&two, 1), None);
        assert_eq!(oct(&two, 2).map(|s| s.len()), Some(2));
    }

    #[test]
    fn initial_cut_examples() {
        let g = c4();
        let cut = initial_cut(&g, &g.edge_labels(), 0).unwrap();
        assert_eq!(cut_labels(&g, &cut), g.edge_labels());
        let t = cycle(3);
        assert!(initial_cut(&t, &t.edge_labels(), 3).is_none());
        let mut l = c4();
        let a = l.vertex_index("a").unwrap();
        l.add_edge("loop", a, a, 1).unwrap();
        assert!(initial_cut(&l, &label_set(["loop"]), 2).is_none());
    }

    #[test]
    fn good_separation_examples() {
        let mut g = clique("x", 3);
        let h = clique("y", 3);
        for e in h.edges() {
            g.add_named_edge(&e.label, h.vertex_name(e.u), h.vertex_name(e.v), 1)
                .unwrap();
        }
        g.add_named_edge("bridge", "x0", "y0", 1).unwrap();
        let sep = good_separation(&g, 2, 1).unwrap();
        assert_eq!(cut_labels(&g, &sep), label_set(["bridge"]));
        assert!(good_separation(&clique("k", 6), 2, 2).is_none());
        let mut path = MultiGraph::new();
        for i in 0..5 {
            path.add_named_edge(&format!("p{i}"), &format!("v{i}"), &format!("v{}", i + 1), 1)
                .unwrap();
        }
        let sep = good_separation(&path, 2, 1).unwrap();
        assert_eq!(cut_labels(&path, &sep), label_set(["p2"]));
    }

    #[test]
    fn separation_family_splits() {
        let u: Vec<usize> = (0..5).collect();
        let fam = separation_family(&u, 1, 1, ColoringMode::Exhaustive);
        for a in 0..5 {
            for b in 0..5 {
                if a != b {
                    assert!(fam.sets.iter().any(|s| s.contains(&a) && !s.contains(&b)));
                }
            }
        }
        assert_eq!(
            separation_family(&[], 0, 0, ColoringMode::Exhaustive).sets,
            vec![Vec::<usize>::new()]
        );
        assert_eq!(separation_family(&u, 5, 5, ColoringMode::Exhaustive).sets.len(), 32);
    }

    #[test]
    fn emwc_examples() {
        let g = c4();
        let ix = |n: &str| g.vertex_index(n).unwrap();
        let inst = EmwcInstance::new(g.clone(), label_set(["ab"]), vec![ix("a")], vec![ix("c")], 1);
        let c = solve_emwc(&inst, &EmwcOptions::default()).unwrap().unwrap();
        assert!(inst.verify(&c) && c.len() == 2 && c.contains("ab"));
        let same = EmwcInstance::new(g.clone(), label_set(["ab"]), vec![ix("a")], vec![ix("a")], 3);
        assert_eq!(solve_emwc(&same, &EmwcOptions::default()).unwrap(), None);
        let star = MultiGraph::from_edge_list(&[("x", "c", "a", 1), ("y", "c", "b", 1), ("z", "c", "d", 1)]);
        let inst = EmwcInstance::new(star, label_set(["x"]), vec![], vec![], 0);
        assert_eq!(
            solve_emwc(&inst, &EmwcOptions::default()).unwrap(),
            Some(label_set(["x"]))
        );
    }

    #[test]
    fn small_params_exercise_recursion() {
        let mut g = clique("x", 4);
        let h = clique("y", 4);
        for e in h.edges() {
            g.add_named_edge(&e.label, h.vertex_name(e.u), h.vertex_name(e.v), 1)
                .unwrap();
        }
        g.add_named_edge("b1", "x0", "y0", 1).unwrap();
        g.add_named_edge("b2", "x1", "y1", 1).unwrap();
        let inst = EmwcInstance::new(g, label_set(["b1"]), vec![], vec![], 1);
        let opts = EmwcOptions::with_params(2, 1);
        let c = solve_emwc(&inst, &opts).unwrap().unwrap();
        assert_eq!(c, label_set(["b1", "b2"]));
    }

    #[test]
    fn budget_derived_params() {
        assert_eq!(ParamPair::for_budget(1), ParamPair { p: 2, q: 4096 + 5 });
        assert_eq!(ParamPair::for_budget(0).q, 1);
        assert_eq!(ParamPair::for_budget(5).q, u64::MAX);
    }

    #[test]
    fn partitions_are_bell_numbers() {
        let counts: Vec<usize> = (0..6).map(|m| set_partitions(m).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52]);
    }
}
