//! Multigraphs with loops and parallel edges, cuts, contractions, and their
//! cycle and bond matroids.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::gf2::Gf2Matrix;
use crate::matroid::{BinaryMatroid, LabelSet};

/// Vertex cap for exhaustive cut enumeration.
pub const CUT_ENUMERATION_CAP: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge label `{0}`")]
    DuplicateEdge(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph has {size} vertices, above the cap of {cap}")]
    CapExceeded { size: usize, cap: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub label: String,
    pub u: usize,
    pub v: usize,
    pub weight: u64,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// Undirected multigraph. Vertices carry string ids, edges carry distinct labels.
///
/// Weights read from files are at least 1. Solvers may create zero-weight edges
/// internally for elements that are free to use.
#[derive(Clone, Debug, Default)]
pub struct MultiGraph {
    names: Vec<String>,
    edges: Vec<Edge>,
    vindex: HashMap<String, usize>,
    eindex: HashMap<String, usize>,
}

impl PartialEq for MultiGraph {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.edges == other.edges
    }
}

/// Two-sided partition of the vertex set. `in_a[v]` tells which side `v` is on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexCut {
    pub in_a: Vec<bool>,
}

impl VertexCut {
    pub fn from_side_a(n: usize, a: impl IntoIterator<Item = usize>) -> Self {
        let mut in_a = vec![false; n];
        for v in a {
            in_a[v] = true;
        }
        VertexCut { in_a }
    }

    pub fn side_a(&self) -> Vec<usize> {
        (0..self.in_a.len()).filter(|&v| self.in_a[v]).collect()
    }

    pub fn side_b(&self) -> Vec<usize> {
        (0..self.in_a.len()).filter(|&v| !self.in_a[v]).collect()
    }

    /// Indices of edges with endpoints on different sides.
    pub fn crossing(&self, g: &MultiGraph) -> Vec<usize> {
        (0..g.edge_count())
            .filter(|&i| {
                let e = g.edge(i);
                self.in_a[e.u] != self.in_a[e.v]
            })
            .collect()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let n = self.parent[c];
            self.parent[c] = r;
            c = n;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

impl MultiGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, name: &str) -> Result<usize, GraphError> {
        if self.vindex.contains_key(name) {
            return Err(GraphError::DuplicateVertex(name.to_string()));
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.vindex.insert(name.to_string(), id);
        Ok(id)
    }

    /// Returns the vertex with this id, creating it if needed.
    pub fn ensure_vertex(&mut self, name: &str) -> usize {
        match self.vindex.get(name) {
            Some(&v) => v,
            None => self.add_vertex(name).expect("checked absent"),
        }
    }

    pub fn add_edge(&mut self, label: &str, u: usize, v: usize, weight: u64) -> Result<usize, GraphError> {
        if self.eindex.contains_key(label) {
            return Err(GraphError::DuplicateEdge(label.to_string()));
        }
        for x in [u, v] {
            if x >= self.names.len() {
                return Err(GraphError::UnknownVertex(x.to_string()));
            }
        }
        let id = self.edges.len();
        self.edges.push(Edge {
            label: label.to_string(),
            u,
            v,
            weight,
        });
        self.eindex.insert(label.to_string(), id);
        Ok(id)
    }

    /// Convenience builder: vertices by name, created on demand.
    pub fn add_named_edge(&mut self, label: &str, u: &str, v: &str, weight: u64) -> Result<usize, GraphError> {
        let a = self.ensure_vertex(u);
        let b = self.ensure_vertex(v);
        self.add_edge(label, a, b, weight)
    }

    /// Builds a graph from `(label, u, v, weight)` tuples.
    pub fn from_edge_list(edges: &[(&str, &str, &str, u64)]) -> Self {
        let mut g = MultiGraph::new();
        for (l, u, v, w) in edges {
            g.add_named_edge(l, u, v, *w).expect("distinct labels");
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vindex.get(name).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &Edge {
        &self.edges[i]
    }

    pub fn edge_index(&self, label: &str) -> Option<usize> {
        self.eindex.get(label).copied()
    }

    pub fn edge_by_label(&self, label: &str) -> Option<&Edge> {
        self.edge_index(label).map(|i| &self.edges[i])
    }

    pub fn edge_labels(&self) -> LabelSet {
        self.edges.iter().map(|e| e.label.clone()).collect()
    }

    pub fn weight_of(&self, labels: &LabelSet) -> u64 {
        labels
            .iter()
            .filter_map(|l| self.edge_by_label(l))
            .map(|e| e.weight)
            .sum()
    }

    pub fn set_weight(&mut self, label: &str, weight: u64) -> Result<(), GraphError> {
        let i = self
            .edge_index(label)
            .ok_or_else(|| GraphError::UnknownEdge(label.to_string()))?;
        self.edges[i].weight = weight;
        Ok(())
    }

    pub fn edge_indices(&self, labels: &LabelSet) -> Result<Vec<usize>, GraphError> {
        labels
            .iter()
            .map(|l| self.edge_index(l).ok_or_else(|| GraphError::UnknownEdge(l.clone())))
            .collect()
    }

    pub fn vertex_indices<'a, I>(&self, names: I) -> Result<Vec<usize>, GraphError>
    where
        I: IntoIterator<Item = &'a String>,
    {
        names
            .into_iter()
            .map(|n| self.vertex_index(n).ok_or_else(|| GraphError::UnknownVertex(n.clone())))
            .collect()
    }

    /// Incidence lists: for each vertex, `(edge index, other endpoint)`. Loops appear once.
    pub fn incidence(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.u].push((i, e.v));
            if !e.is_loop() {
                adj[e.v].push((i, e.u));
            }
        }
        adj
    }

    /// Component id per vertex using only edges accepted by `keep`; returns (ids, count).
    pub fn component_ids_with(&self, keep: impl Fn(usize) -> bool) -> (Vec<usize>, usize) {
        let mut uf = UnionFind::new(self.vertex_count());
        for (i, e) in self.edges.iter().enumerate() {
            if keep(i) {
                uf.union(e.u, e.v);
            }
        }
        let mut ids = vec![usize::MAX; self.vertex_count()];
        let mut count = 0;
        for v in 0..self.vertex_count() {
            let r = uf.find(v);
            if ids[r] == usize::MAX {
                ids[r] = count;
                count += 1;
            }
            ids[v] = ids[r];
        }
        (ids, count)
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let (ids, count) = self.component_ids_with(|_| true);
        let mut out = vec![Vec::new(); count];
        for (v, &c) in ids.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Whether the vertices marked in `side` induce a connected subgraph (false when empty).
    pub fn induces_connected(&self, side: &[bool]) -> bool {
        let Some(start) = side.iter().position(|&b| b) else {
            return false;
        };
        let adj = self.incidence();
        let mut seen = vec![false; self.vertex_count()];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &(_, y) in &adj[x] {
                if side[y] && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        side.iter().zip(&seen).all(|(&s, &t)| !s || t)
    }

    /// Merges all vertices of `x` into one, keeping every edge. Returns the new graph and
    /// the vertex map from old to new indices.
    pub fn contract_vertex_set(&self, x: &[usize]) -> Result<(MultiGraph, Vec<usize>), GraphError> {
        for &v in x {
            if v >= self.vertex_count() {
                return Err(GraphError::UnknownVertex(v.to_string()));
            }
        }
        let mut uf = UnionFind::new(self.vertex_count());
        for w in x.windows(2) {
            uf.union(w[0], w[1]);
        }
        Ok(self.quotient(&mut uf, |_| false))
    }

    /// Merges each group of vertices. Groups may overlap, in which case they fuse.
    pub fn contract_vertex_groups(&self, groups: &[Vec<usize>]) -> (MultiGraph, Vec<usize>) {
        let mut uf = UnionFind::new(self.vertex_count());
        for g in groups {
            for w in g.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        self.quotient(&mut uf, |_| false)
    }

    /// Contracts the listed edges: endpoints merge and the listed edges disappear;
    /// other edges between merged vertices become loops.
    pub fn contract_edges(&self, edges: &[usize]) -> (MultiGraph, Vec<usize>) {
        let mut uf = UnionFind::new(self.vertex_count());
        let mut drop = vec![false; self.edge_count()];
        for &i in edges {
            uf.union(self.edges[i].u, self.edges[i].v);
            drop[i] = true;
        }
        self.quotient(&mut uf, |i| drop[i])
    }

    pub fn contract_edge(&self, label: &str) -> Result<MultiGraph, GraphError> {
        let i = self
            .edge_index(label)
            .ok_or_else(|| GraphError::UnknownEdge(label.to_string()))?;
        Ok(self.contract_edges(&[i]).0)
    }

    fn quotient(&self, uf: &mut UnionFind, drop: impl Fn(usize) -> bool) -> (MultiGraph, Vec<usize>) {
        let mut g = MultiGraph::new();
        let mut map = vec![usize::MAX; self.vertex_count()];
        let mut rep_new = HashMap::new();
        for (v, slot) in map.iter_mut().enumerate() {
            let r = uf.find(v);
            *slot = *rep_new
                .entry(r)
                .or_insert_with(|| g.add_vertex(&self.names[r]).expect("representatives are distinct"));
        }
        for (i, e) in self.edges.iter().enumerate() {
            if drop(i) {
                continue;
            }
            g.add_edge(&e.label, map[e.u], map[e.v], e.weight)
                .expect("labels stay distinct");
        }
        (g, map)
    }

    pub fn delete_edges(&self, edges: &[usize]) -> MultiGraph {
        let mut drop = vec![false; self.edge_count()];
        for &i in edges {
            drop[i] = true;
        }
        let mut g = MultiGraph::new();
        for n in &self.names {
            g.add_vertex(n).expect("distinct");
        }
        for (i, e) in self.edges.iter().enumerate() {
            if !drop[i] {
                g.add_edge(&e.label, e.u, e.v, e.weight).expect("distinct");
            }
        }
        g
    }

    /// Subgraph induced by the marked vertices, with the map from old to new indices
    /// (`usize::MAX` for removed vertices).
    pub fn induced(&self, keep: &[bool]) -> (MultiGraph, Vec<usize>) {
        let mut g = MultiGraph::new();
        let mut map = vec![usize::MAX; self.vertex_count()];
        for v in 0..self.vertex_count() {
            if keep[v] {
                map[v] = g.add_vertex(&self.names[v]).expect("distinct");
            }
        }
        for e in &self.edges {
            if keep[e.u] && keep[e.v] {
                g.add_edge(&e.label, map[e.u], map[e.v], e.weight).expect("distinct");
            }
        }
        (g, map)
    }

    pub fn delete_vertices(&self, vs: &[usize]) -> (MultiGraph, Vec<usize>) {
        let mut keep = vec![true; self.vertex_count()];
        for &v in vs {
            keep[v] = false;
        }
        self.induced(&keep)
    }

    /// Whether `s` equals E(A,B) for a cut whose sides both induce connected subgraphs.
    pub fn is_minimal_cutset(&self, s: &LabelSet) -> Result<bool, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        let idx = self.edge_indices(s)?;
        Ok(self.is_minimal_cutset_idx(&idx))
    }

    pub(crate) fn is_minimal_cutset_idx(&self, idx: &[usize]) -> bool {
        if idx.is_empty() {
            return false;
        }
        let mut removed = vec![false; self.edge_count()];
        for &i in idx {
            removed[i] = true;
        }
        let (ids, count) = self.component_ids_with(|i| !removed[i]);
        count == 2 && idx.iter().all(|&i| ids[self.edges[i].u] != ids[self.edges[i].v])
    }

    /// All minimal cut-sets (bonds). Disconnected graphs contribute the bonds of each component.
    pub fn enumerate_minimal_cutsets(&self) -> Result<Vec<LabelSet>, GraphError> {
        if self.vertex_count() > CUT_ENUMERATION_CAP {
            return Err(GraphError::CapExceeded {
                size: self.vertex_count(),
                cap: CUT_ENUMERATION_CAP,
            });
        }
        let mut out = BTreeSet::new();
        for comp in self.components() {
            if comp.len() < 2 {
                continue;
            }
            let rest = &comp[1..];
            for mask in 0u32..(1u32 << rest.len()) {
                let mut in_a = vec![false; self.vertex_count()];
                let mut in_b = vec![false; self.vertex_count()];
                in_a[comp[0]] = true;
                for (j, &v) in rest.iter().enumerate() {
                    if mask >> j & 1 == 1 {
                        in_a[v] = true;
                    } else {
                        in_b[v] = true;
                    }
                }
                if !in_b.iter().any(|&b| b) {
                    continue;
                }
                if self.induces_connected(&in_a) && self.induces_connected(&in_b) {
                    let cut: LabelSet = self
                        .edges
                        .iter()
                        .filter(|e| in_a[e.u] != in_a[e.v] && (in_a[e.u] || in_b[e.u]) && (in_a[e.v] || in_b[e.v]))
                        .map(|e| e.label.clone())
                        .collect();
                    out.insert(cut);
                }
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Edge sets of all simple cycles, loops and parallel pairs included.
    pub fn simple_cycles(&self) -> Vec<LabelSet> {
        let adj = self.incidence();
        let mut out = BTreeSet::new();
        for e in &self.edges {
            if e.is_loop() {
                out.insert(LabelSet::from([e.label.clone()]));
            }
        }
        let n = self.vertex_count();
        for s in 0..n {
            let mut on_path = vec![false; n];
            on_path[s] = true;
            let mut path_edges = Vec::new();
            self.cycle_dfs(&adj, s, s, &mut on_path, &mut path_edges, &mut out);
        }
        out.into_iter().collect()
    }

    fn cycle_dfs(
        &self,
        adj: &[Vec<(usize, usize)>],
        start: usize,
        at: usize,
        on_path: &mut [bool],
        path_edges: &mut Vec<usize>,
        out: &mut BTreeSet<LabelSet>,
    ) {
        for &(ei, y) in &adj[at] {
            if y == at || path_edges.last() == Some(&ei) {
                continue;
            }
            if y == start {
                if !path_edges.is_empty() {
                    let mut c: LabelSet = path_edges.iter().map(|&i| self.edges[i].label.clone()).collect();
                    c.insert(self.edges[ei].label.clone());
                    out.insert(c);
                }
                continue;
            }
            if y < start || on_path[y] {
                continue;
            }
            on_path[y] = true;
            path_edges.push(ei);
            self.cycle_dfs(adj, start, y, on_path, path_edges, out);
            path_edges.pop();
            on_path[y] = false;
        }
    }

    /// Cycle matroid from the vertex-edge incidence matrix; loops are zero columns.
    pub fn cycle_matroid(&self) -> BinaryMatroid {
        let mut m = Gf2Matrix::zeros(self.vertex_count(), self.edge_count());
        for (i, e) in self.edges.iter().enumerate() {
            if !e.is_loop() {
                m.set(e.u, i, true);
                m.set(e.v, i, true);
            }
        }
        let labels = self.edges.iter().map(|e| e.label.clone()).collect();
        BinaryMatroid::new(m, labels).expect("edge labels are distinct")
    }

    pub fn bond_matroid(&self) -> BinaryMatroid {
        self.cycle_matroid().dual()
    }

    /// Identifies one vertex of every component with the first component's vertex.
    /// Gluing at a single vertex leaves the cycle and bond matroids unchanged.
    pub fn connectify(&self) -> MultiGraph {
        let comps = self.components();
        if comps.len() <= 1 {
            return self.clone();
        }
        let reps: Vec<usize> = comps.iter().map(|c| c[0]).collect();
        self.contract_vertex_set(&reps).expect("valid vertices").0
    }

    /// Subdivides an edge with a fresh vertex; the new edge gets `new_label`.
    pub fn subdivide(&self, label: &str, new_label: &str, vertex: &str) -> Result<MultiGraph, GraphError> {
        let i = self
            .edge_index(label)
            .ok_or_else(|| GraphError::UnknownEdge(label.to_string()))?;
        let mut g = self.clone();
        let x = g.add_vertex(vertex)?;
        let (v, w) = (g.edges[i].v, g.edges[i].weight);
        g.edges[i].v = x;
        g.add_edge(new_label, x, v, w)?;
        Ok(g)
    }
}
