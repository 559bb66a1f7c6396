//! Minimum extra-weight cycle through a prescribed edge set (CTSE), by color coding.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::MultiGraph;
use crate::matroid::LabelSet;

const INF: u64 = u64::MAX / 4;

#[derive(Clone, Debug)]
pub struct CtseInstance {
    pub graph: MultiGraph,
    pub terminals: LabelSet,
    pub k: u64,
}

impl CtseInstance {
    pub fn new(graph: MultiGraph, terminals: LabelSet, k: u64) -> Self {
        CtseInstance { graph, terminals, k }
    }

    /// Weight of `c` outside the terminals.
    pub fn extra_weight(&self, c: &LabelSet) -> u64 {
        c.iter()
            .filter(|l| !self.terminals.contains(*l))
            .filter_map(|l| self.graph.edge_by_label(l))
            .map(|e| e.weight)
            .sum()
    }

    /// Whether `c` is a cycle containing the terminals within budget.
    pub fn verify(&self, c: &LabelSet) -> bool {
        let Ok(idx) = self.graph.edge_indices(c) else {
            return false;
        };
        self.terminals.is_subset(c) && is_cycle_edges(&self.graph, &idx) && self.extra_weight(c) <= self.k
    }
}

/// Whether the edges form exactly one cycle (a loop, a parallel pair, or a longer simple cycle).
pub fn is_cycle_edges(g: &MultiGraph, idx: &[usize]) -> bool {
    if idx.is_empty() {
        return false;
    }
    let mut deg = vec![0usize; g.vertex_count()];
    for &i in idx {
        let e = g.edge(i);
        deg[e.u] += 1;
        deg[e.v] += 1;
    }
    if deg.iter().any(|&d| d != 0 && d != 2) {
        return false;
    }
    let mut chosen = vec![false; g.edge_count()];
    for &i in idx {
        chosen[i] = true;
    }
    let (ids, _) = g.component_ids_with(|i| chosen[i]);
    let first = ids[g.edge(idx[0]).u];
    idx.iter().all(|&i| ids[g.edge(i).u] == first)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CtseMode {
    /// One injective coloring per h-subset of off-terminal vertices.
    #[default]
    Exhaustive,
    /// Uniform random colorings; `rounds = None` picks ⌈21·e^h⌉.
    Random { seed: u64, rounds: Option<usize> },
}

/// A colored instance after dissolving: `in_u` marks terminal endpoints, `colors`
/// the color of each usable off-terminal vertex.
#[derive(Clone, Debug)]
pub struct Coloring {
    pub colors: Vec<Option<usize>>,
    pub h: usize,
}

/// s(X, u, z) for a fixed source `u`, indexed `[X][z]`.
#[derive(Clone, Debug)]
pub struct PathTable {
    pub source: usize,
    pub values: Vec<Vec<u64>>,
}

impl PathTable {
    pub fn get(&self, x: usize, z: usize) -> u64 {
        self.values[x][z]
    }
}

/// Cheapest usable edge between each adjacent pair, as `(neighbor, weight, edge)`.
fn light_adjacency(g: &MultiGraph, usable: &[bool]) -> Vec<Vec<(usize, u64, usize)>> {
    let mut best: Vec<BTreeMap<usize, (u64, usize)>> = vec![BTreeMap::new(); g.vertex_count()];
    for (i, e) in g.edges().iter().enumerate() {
        if !usable[i] || e.is_loop() {
            continue;
        }
        for (a, b) in [(e.u, e.v), (e.v, e.u)] {
            let slot = best[a].entry(b).or_insert((e.weight, i));
            if e.weight < slot.0 {
                *slot = (e.weight, i);
            }
        }
    }
    best.into_iter()
        .map(|m| m.into_iter().map(|(v, (w, i))| (v, w, i)).collect())
        .collect()
}

/// Path tables from `u`: internal vertices lie outside `in_u`, and off-terminal vertices use
/// distinct colors drawn from X. Only edges marked `usable` are traversed.
pub fn dp_paths(g: &MultiGraph, in_u: &[bool], usable: &[bool], coloring: &Coloring, u: usize) -> PathTable {
    let adj = light_adjacency(g, usable);
    dp_paths_adj(&adj, in_u, coloring, u)
}

fn dp_paths_adj(adj: &[Vec<(usize, u64, usize)>], in_u: &[bool], coloring: &Coloring, u: usize) -> PathTable {
    let n = adj.len();
    let full = 1usize << coloring.h;
    let mut values = vec![vec![INF; n]; full];
    let inner = |x: usize| x == u || (!in_u[x] && coloring.colors[x].is_some());
    for x in 0..full {
        values[x][u] = 0;
        for z in 0..n {
            if in_u[z] || z == u {
                continue;
            }
            let Some(c) = coloring.colors[z] else { continue };
            if x >> c & 1 == 0 {
                continue;
            }
            let prev = x & !(1 << c);
            let mut best = INF;
            for &(y, w, _) in &adj[z] {
                if inner(y) {
                    best = best.min(values[prev][y].saturating_add(w));
                }
            }
            values[x][z] = best;
        }
        for z in 0..n {
            if !in_u[z] || z == u {
                continue;
            }
            let mut best = INF;
            for &(y, w, _) in &adj[z] {
                if inner(y) {
                    best = best.min(values[x][y].saturating_add(w));
                }
            }
            values[x][z] = best;
        }
    }
    for row in values.iter_mut() {
        for v in row.iter_mut() {
            if *v >= INF {
                *v = INF;
            }
        }
    }
    PathTable { source: u, values }
}

/// Edges of a path realizing `table.values[x][z]`.
fn trace_path(
    adj: &[Vec<(usize, u64, usize)>],
    in_u: &[bool],
    coloring: &Coloring,
    table: &PathTable,
    mut x: usize,
    mut z: usize,
) -> Vec<usize> {
    let u = table.source;
    let inner = |y: usize| y == u || (!in_u[y] && coloring.colors[y].is_some());
    let mut out = Vec::new();
    while z != u {
        let target = table.values[x][z];
        let prev_x = if in_u[z] {
            x
        } else {
            x & !(1 << coloring.colors[z].expect("colored"))
        };
        let &(y, _, e) = adj[z]
            .iter()
            .find(|&&(y, w, _)| inner(y) && table.values[prev_x][y].saturating_add(w) == target)
            .expect("table value has a predecessor");
        out.push(e);
        x = prev_x;
        z = y;
    }
    out
}

/// Segment of a stitched cycle: a colored path from `from` to `to` using colors `colors`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Segment {
    pub from: usize,
    pub to: usize,
    pub colors: usize,
}

/// Stitches path tables into the cheapest colorful cycle through all terminal pairs
/// (`terminals[0]` is the pair the cycle starts and ends on). Needs a table for every
/// terminal endpoint. Returns the extra weight and the connecting segments.
pub fn dp_stitch(
    tables: &BTreeMap<usize, PathTable>,
    terminals: &[(usize, usize)],
    h: usize,
) -> Option<(u64, Vec<Segment>)> {
    let r = terminals.len();
    assert!(r >= 2, "stitching needs two terminal pairs");
    let full = (1usize << h) - 1;
    let m = r - 1;
    let ends = |j: usize| [terminals[j].0, terminals[j].1];
    let y1 = terminals[0].1;
    let x1 = terminals[0].0;
    let s = |from: usize, x: usize, to: usize| tables[&from].get(x, to);
    // cp[X][Y][2*j+e]: path from y1, visiting pairs in Y (bits over pairs 1..r), ending at end e of pair j.
    let states = 1usize << m;
    let mut cp = vec![vec![vec![INF; 2 * r]; states]; full + 1];
    let mut choice: Vec<Vec<Vec<(usize, usize)>>> = vec![vec![vec![(usize::MAX, 0); 2 * r]; states]; full + 1];
    for y in 1..states {
        for x in 0..=full {
            for j in 1..r {
                if y >> (j - 1) & 1 == 0 {
                    continue;
                }
                for e in 0..2 {
                    let enter = ends(j)[1 - e];
                    let rest = y & !(1 << (j - 1));
                    let mut best = INF;
                    let mut arg = (usize::MAX, 0);
                    let mut sub = x;
                    loop {
                        if rest == 0 {
                            let val = s(y1, sub, enter);
                            if val < best {
                                best = val;
                                arg = (usize::MAX, sub);
                            }
                        } else {
                            for l in 1..r {
                                if rest >> (l - 1) & 1 == 0 {
                                    continue;
                                }
                                for f in 0..2 {
                                    let head = cp[x & !sub][rest][2 * l + f];
                                    if head >= INF {
                                        continue;
                                    }
                                    let val = head.saturating_add(s(ends(l)[f], sub, enter));
                                    if val < best {
                                        best = val;
                                        arg = (2 * l + f, sub);
                                    }
                                }
                            }
                        }
                        if sub == 0 {
                            break;
                        }
                        sub = (sub - 1) & x;
                    }
                    cp[x][y][2 * j + e] = best.min(INF);
                    choice[x][y][2 * j + e] = arg;
                }
            }
        }
    }
    let all = states - 1;
    let mut best = INF;
    let mut arg = (0, 0);
    for j in 1..r {
        for e in 0..2 {
            let mut sub = full;
            loop {
                let head = cp[full & !sub][all][2 * j + e];
                if head < INF {
                    let val = head.saturating_add(s(ends(j)[e], sub, x1));
                    if val < best {
                        best = val;
                        arg = (2 * j + e, sub);
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & full;
            }
        }
    }
    if best >= INF {
        return None;
    }
    let mut segments = vec![Segment {
        from: ends(arg.0 / 2)[arg.0 % 2],
        to: x1,
        colors: arg.1,
    }];
    let (mut x, mut y, mut slot) = (full & !arg.1, all, arg.0);
    loop {
        let (prev, sub) = choice[x][y][slot];
        let j = slot / 2;
        let enter = ends(j)[1 - slot % 2];
        let rest = y & !(1 << (j - 1));
        if prev == usize::MAX {
            segments.push(Segment {
                from: y1,
                to: enter,
                colors: sub,
            });
            break;
        }
        segments.push(Segment {
            from: ends(prev / 2)[prev % 2],
            to: enter,
            colors: sub,
        });
        x &= !sub;
        y = rest;
        slot = prev;
    }
    segments.reverse();
    Some((best, segments))
}

/// The instance after dissolving terminal paths into single edges.
struct Dissolved {
    graph: MultiGraph,
    /// Dissolved terminal edges as (x, y, original labels).
    pairs: Vec<(usize, usize, Vec<String>)>,
    /// Edge index in `graph` → original label, for non-terminal edges.
    origin: Vec<Option<String>>,
}

enum Prepared {
    Done(Option<LabelSet>),
    Reduced(Dissolved),
}

fn prepare(inst: &CtseInstance) -> Prepared {
    let g = &inst.graph;
    let t_idx: Vec<usize> = match g.edge_indices(&inst.terminals) {
        Ok(v) => v,
        Err(_) => return Prepared::Done(None),
    };
    let mut deg = vec![0usize; g.vertex_count()];
    for &i in &t_idx {
        let e = g.edge(i);
        deg[e.u] += 1;
        deg[e.v] += 1;
    }
    if deg.iter().any(|&d| d > 2) {
        return Prepared::Done(None);
    }
    let mut in_t = vec![false; g.edge_count()];
    for &i in &t_idx {
        in_t[i] = true;
    }
    let (ids, _) = g.component_ids_with(|i| in_t[i]);
    // Group terminal edges by component of G[T].
    let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &i in &t_idx {
        comps.entry(ids[g.edge(i).u]).or_default().push(i);
    }
    let mut paths = Vec::new();
    for edges in comps.values() {
        let closed = edges.iter().all(|&i| {
            let e = g.edge(i);
            deg[e.u] == 2 && deg[e.v] == 2
        });
        if closed {
            // A terminal cycle is only feasible when it is all of T.
            return Prepared::Done((comps.len() == 1).then(|| inst.terminals.clone()));
        }
        paths.push(edges.clone());
    }
    let non_t_positive = (0..g.edge_count()).all(|i| in_t[i] || g.edge(i).weight >= 1);
    if non_t_positive && paths.len() as u64 > inst.k && !paths.is_empty() {
        return Prepared::Done(None);
    }

    // Walk each path from an end vertex.
    let inc = g.incidence();
    let mut interior = vec![false; g.vertex_count()];
    let mut ends = Vec::new();
    for edges in &paths {
        let start = edges
            .iter()
            .flat_map(|&i| [g.edge(i).u, g.edge(i).v])
            .find(|&v| deg[v] == 1)
            .expect("path component has an end");
        let mut labels = Vec::new();
        let mut cur = start;
        let mut last = usize::MAX;
        loop {
            let next = inc[cur].iter().find(|&&(i, _)| in_t[i] && i != last);
            let Some(&(i, y)) = next else { break };
            labels.push(g.edge(i).label.clone());
            last = i;
            cur = y;
            if deg[cur] == 1 {
                break;
            }
            interior[cur] = true;
        }
        ends.push((start, cur, labels));
    }
    let mut h = MultiGraph::new();
    let mut map = vec![usize::MAX; g.vertex_count()];
    for v in 0..g.vertex_count() {
        if !interior[v] {
            map[v] = h.add_vertex(g.vertex_name(v)).expect("names are unique");
        }
    }
    let mut origin = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        if in_t[i] || e.is_loop() || interior[e.u] || interior[e.v] {
            continue;
        }
        h.add_edge(&e.label, map[e.u], map[e.v], e.weight)
            .expect("labels are unique");
        origin.push(Some(e.label.clone()));
    }
    let mut pairs = Vec::new();
    for (n, (x, y, labels)) in ends.into_iter().enumerate() {
        let mut name = format!("#terminal{n}");
        while g.edge_index(&name).is_some() {
            name.push('#');
        }
        h.add_edge(&name, map[x], map[y], 1).expect("fresh label");
        origin.push(None);
        pairs.push((map[x], map[y], labels));
    }
    Prepared::Reduced(Dissolved {
        graph: h,
        pairs,
        origin,
    })
}

fn dijkstra(adj: &[Vec<(usize, u64, usize)>], src: usize, blocked: &[bool]) -> (Vec<u64>, Vec<usize>) {
    let n = adj.len();
    let mut dist = vec![INF; n];
    let mut pred = vec![usize::MAX; n];
    dist[src] = 0;
    let mut heap = BinaryHeap::from([Reverse((0u64, src))]);
    while let Some(Reverse((d, x))) = heap.pop() {
        if d > dist[x] {
            continue;
        }
        for &(y, w, e) in &adj[x] {
            if blocked[e] {
                continue;
            }
            let nd = d + w;
            if nd < dist[y] {
                dist[y] = nd;
                pred[y] = e;
                heap.push(Reverse((nd, y)));
            }
        }
    }
    (dist, pred)
}

fn unwind(g: &MultiGraph, pred: &[usize], mut v: usize, src: usize) -> Vec<usize> {
    let mut out = Vec::new();
    while v != src {
        let e = pred[v];
        out.push(e);
        v = g.edge(e).other(v);
    }
    out
}

/// Full adjacency (all parallel edges) for Dijkstra with per-edge blocking.
fn full_adjacency(g: &MultiGraph, usable: &[bool]) -> Vec<Vec<(usize, u64, usize)>> {
    let mut adj = vec![Vec::new(); g.vertex_count()];
    for (i, e) in g.edges().iter().enumerate() {
        if usable[i] && !e.is_loop() {
            adj[e.u].push((e.v, e.weight, i));
            adj[e.v].push((e.u, e.weight, i));
        }
    }
    adj
}

/// Cheapest cycle overall, used when no terminal is prescribed.
fn min_cycle(g: &MultiGraph, k: u64) -> Option<LabelSet> {
    let mut best: Option<(u64, Vec<usize>)> = None;
    for (i, e) in g.edges().iter().enumerate() {
        if e.is_loop() && best.as_ref().is_none_or(|b| e.weight < b.0) {
            best = Some((e.weight, vec![i]));
        }
    }
    let adj = full_adjacency(g, &vec![true; g.edge_count()]);
    for (i, e) in g.edges().iter().enumerate() {
        if e.is_loop() {
            continue;
        }
        let mut blocked = vec![false; g.edge_count()];
        blocked[i] = true;
        let (dist, pred) = dijkstra(&adj, e.u, &blocked);
        if dist[e.v] >= INF {
            continue;
        }
        let total = dist[e.v] + e.weight;
        if best.as_ref().is_none_or(|b| total < b.0) {
            let mut cyc = unwind(g, &pred, e.v, e.u);
            cyc.push(i);
            best = Some((total, cyc));
        }
    }
    let (w, cyc) = best?;
    (w <= k).then(|| cyc.into_iter().map(|i| g.edge(i).label.clone()).collect())
}

/// Number of rounds used by the random mode when none is given.
pub fn default_rounds(h: usize) -> usize {
    (21.0 * (h as f64).exp()).ceil() as usize
}

fn colorings(off: &[usize], n: usize, h: usize, mode: CtseMode) -> Vec<Coloring> {
    match mode {
        CtseMode::Exhaustive => {
            if off.len() <= h {
                let mut colors = vec![None; n];
                for (c, &v) in off.iter().enumerate() {
                    colors[v] = Some(c);
                }
                return vec![Coloring { colors, h }];
            }
            let mut out = Vec::new();
            let mut pick = Vec::new();
            fn rec(off: &[usize], n: usize, h: usize, from: usize, pick: &mut Vec<usize>, out: &mut Vec<Coloring>) {
                if pick.len() == h {
                    let mut colors = vec![None; n];
                    for (c, &v) in pick.iter().enumerate() {
                        colors[v] = Some(c);
                    }
                    out.push(Coloring { colors, h });
                    return;
                }
                for j in from..off.len() {
                    if off.len() - j < h - pick.len() {
                        break;
                    }
                    pick.push(off[j]);
                    rec(off, n, h, j + 1, pick, out);
                    pick.pop();
                }
            }
            rec(off, n, h, 0, &mut pick, &mut out);
            out
        }
        CtseMode::Random { seed, rounds } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rounds = rounds.unwrap_or_else(|| default_rounds(h));
            (0..rounds.max(1))
                .map(|_| {
                    let mut colors = vec![None; n];
                    if h > 0 {
                        for &v in off {
                            colors[v] = Some(rng.gen_range(0..h));
                        }
                    }
                    Coloring { colors, h }
                })
                .collect()
        }
    }
}

/// Finds a cycle through every terminal with extra weight at most k, of minimum extra
/// weight over the colorings tried (optimal in exhaustive mode).
pub fn solve_ctse(inst: &CtseInstance, mode: CtseMode) -> Option<LabelSet> {
    if inst.terminals.is_empty() {
        return min_cycle(&inst.graph, inst.k);
    }
    let d = match prepare(inst) {
        Prepared::Done(res) => return res,
        Prepared::Reduced(d) => d,
    };
    let g = &d.graph;
    let usable: Vec<bool> = d.origin.iter().map(|o| o.is_some()).collect();
    let expand = |edges: &[usize]| -> LabelSet {
        let mut out: LabelSet = edges
            .iter()
            .map(|&i| d.origin[i].clone().expect("path edges are original"))
            .collect();
        for (_, _, labels) in &d.pairs {
            out.extend(labels.iter().cloned());
        }
        out
    };
    let r = d.pairs.len();
    if r == 1 {
        let (x, y, _) = d.pairs[0];
        let adj = full_adjacency(g, &usable);
        let (dist, pred) = dijkstra(&adj, x, &vec![false; g.edge_count()]);
        if dist[y] > inst.k {
            return None;
        }
        return Some(expand(&unwind(g, &pred, y, x)));
    }
    let mut in_u = vec![false; g.vertex_count()];
    for &(x, y, _) in &d.pairs {
        in_u[x] = true;
        in_u[y] = true;
    }
    let zero = (0..g.edge_count())
        .filter(|&i| usable[i] && g.edge(i).weight == 0)
        .count() as u64;
    let room = (inst.k + zero).checked_sub(r as u64)?;
    let off: Vec<usize> = (0..g.vertex_count()).filter(|&v| !in_u[v]).collect();
    let h = (room as usize).min(off.len());
    let adj = light_adjacency(g, &usable);
    let terminals: Vec<(usize, usize)> = d.pairs.iter().map(|&(x, y, _)| (x, y)).collect();
    let mut best: Option<(u64, Vec<usize>)> = None;
    for coloring in colorings(&off, g.vertex_count(), h, mode) {
        let tables: BTreeMap<usize, PathTable> = terminals
            .iter()
            .flat_map(|&(x, y)| [x, y])
            .map(|u| (u, dp_paths_adj(&adj, &in_u, &coloring, u)))
            .collect();
        let Some((value, segments)) = dp_stitch(&tables, &terminals, h) else {
            continue;
        };
        if value > inst.k || best.as_ref().is_some_and(|b| b.0 <= value) {
            continue;
        }
        let mut edges = Vec::new();
        for seg in segments {
            edges.extend(trace_path(
                &adj,
                &in_u,
                &coloring,
                &tables[&seg.from],
                seg.colors,
                seg.to,
            ));
        }
        best = Some((value, edges));
    }
    best.map(|(_, edges)| expand(&edges))
}

/// Oracle-free check used by callers that need a verified answer.
pub fn solve_ctse_verified(inst: &CtseInstance, mode: CtseMode) -> Result<Option<LabelSet>, String> {
    let res = solve_ctse(inst, mode);
    if let Some(c) = &res {
        if !inst.verify(c) {
            return Err(format!("cycle {c:?} fails verification"));
        }
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::label_set;

    fn k4() -> MultiGraph {
        MultiGraph::from_edge_list(&[
            ("ab", "a", "b", 1),
            ("ac", "a", "c", 1),
            ("ad", "a", "d", 1),
            ("bc", "b", "c", 1),
            ("bd", "b", "d", 1),
            ("cd", "c", "d", 1),
        ])
    }

    #[test]
    fn square_through_one_edge() {
        let g = MultiGraph::from_edge_list(&[
            ("e1", "a", "b", 1),
            ("e2", "b", "c", 1),
            ("e3", "c", "d", 1),
            ("e4", "d", "a", 1),
        ]);
        let inst = CtseInstance::new(g, label_set(["e1"]), 3);
        let c = solve_ctse(&inst, CtseMode::Exhaustive).unwrap();
        assert_eq!(c, label_set(["e1", "e2", "e3", "e4"]));
        let tight = CtseInstance { k: 2, ..inst };
        assert_eq!(solve_ctse(&tight, CtseMode::Exhaustive), None);
    }

    #[test]
    fn claw_terminals_stop() {
        let g = MultiGraph::from_edge_list(&[
            ("x", "c", "a", 1),
            ("y", "c", "b", 1),
            ("z", "c", "d", 1),
            ("w", "a", "b", 1),
        ]);
        let inst = CtseInstance::new(g, label_set(["x", "y", "z"]), 10);
        assert_eq!(solve_ctse(&inst, CtseMode::Exhaustive), None);
    }

    #[test]
    fn k4_two_disjoint_terminals() {
        let inst = CtseInstance::new(k4(), label_set(["ab", "cd"]), 2);
        let c = solve_ctse(&inst, CtseMode::Exhaustive).unwrap();
        assert!(inst.verify(&c));
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn terminal_path_dissolves() {
        let inst = CtseInstance::new(k4(), label_set(["ab", "bc"]), 1);
        assert_eq!(
            solve_ctse(&inst, CtseMode::Exhaustive),
            Some(label_set(["ab", "bc", "ac"]))
        );
    }

    #[test]
    fn terminal_cycle_is_its_own_answer() {
        let inst = CtseInstance::new(k4(), label_set(["ab", "bc", "ac"]), 0);
        assert_eq!(
            solve_ctse(&inst, CtseMode::Exhaustive),
            Some(label_set(["ab", "bc", "ac"]))
        );
        let two = CtseInstance::new(k4(), label_set(["ab", "bc", "ac", "cd"]), 5);
        assert_eq!(solve_ctse(&two, CtseMode::Exhaustive), None);
    }

    #[test]
    fn empty_terminals_find_girth() {
        let inst = CtseInstance::new(k4(), LabelSet::new(), 3);
        assert_eq!(solve_ctse(&inst, CtseMode::Exhaustive).map(|c| c.len()), Some(3));
        let inst = CtseInstance::new(k4(), LabelSet::new(), 2);
        assert_eq!(solve_ctse(&inst, CtseMode::Exhaustive), None);
    }

    #[test]
    fn single_path_table() {
        let g = MultiGraph::from_edge_list(&[("ua", "u", "a", 2), ("av", "a", "v", 3)]);
        let (u, a, v) = (0, 1, 2);
        let in_u = vec![true, false, true];
        let coloring = Coloring {
            colors: vec![None, Some(0), None],
            h: 1,
        };
        let t = dp_paths(&g, &in_u, &[true, true], &coloring, u);
        assert_eq!(t.get(1, v), 5);
        assert_eq!(t.get(0, v), INF);
        assert_eq!(t.get(1, a), 2);
    }

    #[test]
    fn random_mode_matches() {
        let inst = CtseInstance::new(k4(), label_set(["ab", "cd"]), 2);
        let c = solve_ctse(&inst, CtseMode::Random { seed: 7, rounds: None }).unwrap();
        assert!(inst.verify(&c));
    }
}
