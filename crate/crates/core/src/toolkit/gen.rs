//! Random instances and the clique hardness construction.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::decomp::{BasicNode, ConflictTree, NodeKind, R10Edit};
use crate::graph::{GraphError, MultiGraph};
use crate::matroid::LabelSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

type EdgeList = Vec<(String, usize, usize, u64)>;

fn build(n: usize, edges: &EdgeList) -> MultiGraph {
    let mut g = MultiGraph::new();
    for i in 0..n {
        g.add_vertex(&format!("v{i}")).expect("fresh vertex");
    }
    for (l, u, v, w) in edges {
        g.add_edge(l, *u, *v, *w).expect("fresh label");
    }
    g
}

struct Labels(usize);

impl Labels {
    fn next(&mut self) -> String {
        self.0 += 1;
        format!("e{}", self.0)
    }
}

/// Connected multigraph: a random spanning tree plus `extra` random non-loop edges.
fn connected_edges(rng: &mut ChaCha8Rng, n: usize, extra: usize, max_w: u64, labels: &mut Labels) -> EdgeList {
    let mut edges = EdgeList::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((labels.next(), u, v, rng.gen_range(1..=max_w)));
    }
    if n >= 2 {
        for _ in 0..extra {
            let u = rng.gen_range(0..n);
            let mut v = rng.gen_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            edges.push((labels.next(), u, v, rng.gen_range(1..=max_w)));
        }
    }
    edges
}

/// A connected random multigraph with `n` vertices, `n - 1 + extra` edges labelled
/// `e1, e2, ...` and weights in `1..=max_w`.
pub fn gen_random_graph(seed: u64, n: usize, extra: usize, max_w: u64) -> MultiGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels = Labels(0);
    let edges = connected_edges(&mut rng, n.max(1), extra, max_w.max(1), &mut labels);
    build(n.max(1), &edges)
}

/// The circulant graph on `n` vertices with the given offsets, which is regular.
pub fn gen_regular_graph(n: usize, offsets: &[usize]) -> Result<MultiGraph, GenError> {
    let mut g = MultiGraph::new();
    for i in 0..n {
        g.add_vertex(&format!("g{i}"))?;
    }
    let mut seen = std::collections::BTreeSet::new();
    for &o in offsets {
        if o == 0 || 2 * o > n {
            return Err(GenError::Precondition(format!("offset {o} is not in 1..={}", n / 2)));
        }
        for i in 0..n {
            let j = (i + o) % n;
            let key = (i.min(j), i.max(j));
            if seen.insert(key) {
                g.add_edge(&format!("g{}_{}", key.0, key.1), key.0, key.1, 1)?;
            }
        }
    }
    Ok(g)
}

/// Picks a non-loop, non-coloop element of `m` not in `used`.
fn free_element(rng: &mut ChaCha8Rng, node: &BasicNode, used: &LabelSet) -> Option<String> {
    let m = node.matroid();
    let coloops = m.coloops();
    let cand: Vec<String> = (0..m.len())
        .filter(|&i| !m.is_loop(i) && !coloops.contains(&i) && !used.contains(m.label(i)))
        .map(|i| m.label(i).to_string())
        .collect();
    cand.choose(rng).cloned()
}

/// Picks a 3-element circuit of `node` avoiding `used`.
fn free_triangle(rng: &mut ChaCha8Rng, node: &BasicNode, used: &LabelSet) -> Option<Vec<String>> {
    let m = node.matroid();
    let free: Vec<String> = m.labels().iter().filter(|l| !used.contains(*l)).cloned().collect();
    let mut found = Vec::new();
    for i in 0..free.len() {
        for j in i + 1..free.len() {
            for k in j + 1..free.len() {
                let t: LabelSet = [free[i].clone(), free[j].clone(), free[k].clone()].into();
                if m.is_circuit_labels(&t) {
                    found.push(t.into_iter().collect::<Vec<_>>());
                }
            }
        }
    }
    found.choose(rng).cloned()
}

fn graph_node(rng: &mut ChaCha8Rng, g: MultiGraph) -> BasicNode {
    if rng.gen_bool(0.5) {
        BasicNode::graphic(g)
    } else {
        BasicNode::cographic(g)
    }
}

fn r10_node(rng: &mut ChaCha8Rng, labels: &mut Labels, keep: Option<&str>) -> BasicNode {
    let mut base: Vec<String> = (0..10).map(|_| labels.next()).collect();
    if let Some(k) = keep {
        base[0] = k.to_string();
    }
    let weights: BTreeMap<String, u64> = base.iter().map(|l| (l.clone(), rng.gen_range(1..=3))).collect();
    BasicNode::new(NodeKind::R10Derived(R10Edit {
        base_labels: base,
        parallels: Vec::new(),
        deleted: Vec::new(),
        weights,
    }))
    .expect("ten base labels")
}

/// A random small node of 3 to 6 vertices. When `shared` is set, the node contains
/// those labels: one element, or a triangle as a circuit.
fn random_node(rng: &mut ChaCha8Rng, labels: &mut Labels, shared: &[String], max_elems: usize) -> Option<BasicNode> {
    for _ in 0..32 {
        let n = rng.gen_range(3..=5);
        let extra = rng.gen_range(0..=2);
        let mut edges = connected_edges(rng, n, extra, 3, labels);
        let cographic = rng.gen_bool(0.5);
        match shared.len() {
            0 => {}
            1 => {
                let i = rng.gen_range(0..edges.len());
                edges[i].0 = shared[0].clone();
                if cographic {
                    // A bridge is a loop of the bond matroid; give it a parallel edge.
                    let (u, v) = (edges[i].1, edges[i].2);
                    edges.push((labels.next(), u, v, rng.gen_range(1..=3)));
                }
            }
            3 => {
                if cographic {
                    // A vertex of degree three with the triangle as its star.
                    let hub = n;
                    for l in shared {
                        edges.push((l.clone(), hub, rng.gen_range(0..n), 1));
                    }
                    let g = build(n + 1, &edges);
                    if g.edge_count() <= max_elems {
                        return Some(BasicNode::cographic(g));
                    }
                    continue;
                }
                let (a, b, c) = (0, 1, 2);
                edges.push((shared[0].clone(), a, b, 1));
                edges.push((shared[1].clone(), b, c, 1));
                edges.push((shared[2].clone(), c, a, 1));
            }
            _ => return None,
        }
        if edges.len() > max_elems {
            continue;
        }
        let g = build(n, &edges);
        let node = if shared.len() == 3 {
            BasicNode::graphic(g)
        } else if cographic {
            BasicNode::cographic(g)
        } else {
            BasicNode::graphic(g)
        };
        let m = node.matroid();
        let ok = match shared.len() {
            1 => {
                let i = m.index_of(&shared[0]).expect("label present");
                !m.is_loop(i) && !m.coloops().contains(&i)
            }
            3 => m.is_circuit_labels(&shared.iter().cloned().collect()),
            _ => true,
        };
        if ok {
            return Some(node);
        }
    }
    None
}

/// A valid conflict tree with at most `node_budget` nodes whose composed matroid has
/// at most `size_budget` elements. Nodes are small graphic, cographic or R10 pieces
/// joined by 1-, 2- and 3-sums; 3-sums use a triangle present in both nodes.
pub fn gen_random_tree(seed: u64, node_budget: usize, size_budget: usize) -> ConflictTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels = Labels(0);
    let root = if size_budget >= 10 && rng.gen_bool(0.1) {
        r10_node(&mut rng, &mut labels, None)
    } else {
        let cap = size_budget.clamp(3, 9);
        let n = rng.gen_range(3..=4);
        let extra = rng.gen_range(0..=cap.saturating_sub(n - 1).min(3));
        let g = build(n, &connected_edges(&mut rng, n, extra, 3, &mut labels));
        graph_node(&mut rng, g)
    };
    let mut size = root.matroid().len();
    let mut nodes = vec![root];
    let mut pairs = Vec::new();
    let mut used = LabelSet::new();
    for _ in 1..node_budget.max(1) {
        let parent = rng.gen_range(0..nodes.len());
        let kind = rng.gen_range(0..10);
        let (shared, room) = if kind < 1 {
            (Vec::new(), size_budget.saturating_sub(size))
        } else if kind < 5 {
            match free_element(&mut rng, &nodes[parent], &used) {
                Some(e) => (vec![e], (size_budget + 2).saturating_sub(size)),
                None => continue,
            }
        } else {
            match free_triangle(&mut rng, &nodes[parent], &used) {
                Some(t) => (t, (size_budget + 6).saturating_sub(size)),
                None => continue,
            }
        };
        let child = if shared.len() == 1 && room >= 10 && rng.gen_bool(0.15) {
            Some(r10_node(&mut rng, &mut labels, Some(&shared[0])))
        } else if room >= 3 {
            random_node(&mut rng, &mut labels, &shared, room)
        } else {
            None
        };
        let Some(child) = child else { continue };
        size = size + child.matroid().len() - 2 * shared.len();
        used.extend(shared.iter().cloned());
        nodes.push(child);
        pairs.push((parent, nodes.len() - 1));
    }
    ConflictTree::from_nodes(nodes, &pairs, 0)
}

/// The weighted instance of the clique hardness construction on a bond matroid.
#[derive(Clone, Debug)]
pub struct CliqueReduction {
    pub graph: MultiGraph,
    pub terminals: LabelSet,
    pub ell: u64,
    /// Order of the source graph.
    pub n: usize,
    /// Degree of the source graph.
    pub d: usize,
    pub k: usize,
}

impl CliqueReduction {
    pub fn tree(&self) -> ConflictTree {
        ConflictTree::single(BasicNode::cographic(self.graph.clone()))
    }

    pub fn expected_vertices(&self) -> usize {
        2 * self.n + self.k + 2 * self.n * self.n
    }
}

/// Builds H from a d-regular graph G and a partition of V(G) into k classes:
/// G, a selector vertex per class joined to its class, an n-clique joined to V(G),
/// a 2n²-clique joined to that clique, and terminal edges from the first big-clique
/// vertex to each selector. The budget is n + (n + d - k + 1)k with unit weights.
///
/// Requires k < d ≤ n - 1. The complete graph K4 with two classes is accepted.
pub fn gen_clique_reduction(g: &MultiGraph, k: usize, partition: &[Vec<String>]) -> Result<CliqueReduction, GenError> {
    let n = g.vertex_count();
    let bad = |s: String| Err(GenError::Precondition(s));
    if n == 0 {
        return bad("empty graph".into());
    }
    let deg: Vec<usize> = (0..n)
        .map(|v| {
            g.edges()
                .iter()
                .map(|e| usize::from(e.u == v) + usize::from(e.v == v))
                .sum()
        })
        .collect();
    let d = deg[0];
    if deg.iter().any(|&x| x != d) {
        return bad("graph is not regular".into());
    }
    if g.edges().iter().any(|e| e.is_loop()) {
        return bad("graph has a loop".into());
    }
    if !(k < d && d < n) {
        return bad(format!("need k < d <= n - 1, got k={k}, d={d}, n={n}"));
    }
    if partition.len() != k || partition.iter().any(Vec::is_empty) {
        return bad(format!("partition must have {k} nonempty classes"));
    }
    let mut class = vec![usize::MAX; n];
    for (i, part) in partition.iter().enumerate() {
        for name in part {
            let v = g
                .vertex_index(name)
                .ok_or_else(|| GenError::Graph(GraphError::UnknownVertex(name.clone())))?;
            if class[v] != usize::MAX {
                return bad(format!("vertex `{name}` is in two classes"));
            }
            class[v] = i;
        }
    }
    if class.contains(&usize::MAX) {
        return bad("partition does not cover the graph".into());
    }

    let p = 2 * n * n;
    let mut h = MultiGraph::new();
    let src: Vec<usize> = (0..n)
        .map(|v| h.add_vertex(&format!("g:{}", g.vertex_name(v))))
        .collect::<Result<_, _>>()?;
    let sel: Vec<usize> = (1..=k)
        .map(|i| h.add_vertex(&format!("s{i}")))
        .collect::<Result<_, _>>()?;
    let xs: Vec<usize> = (1..=n)
        .map(|i| h.add_vertex(&format!("x{i}")))
        .collect::<Result<_, _>>()?;
    let ys: Vec<usize> = (1..=p)
        .map(|i| h.add_vertex(&format!("y{i}")))
        .collect::<Result<_, _>>()?;
    fn join(h: &mut MultiGraph, a: usize, b: usize) -> Result<String, GenError> {
        let label = format!("{}~{}", h.vertex_name(a), h.vertex_name(b));
        h.add_edge(&label, a, b, 1)?;
        Ok(label)
    }
    for e in g.edges() {
        join(&mut h, src[e.u], src[e.v])?;
    }
    for v in 0..n {
        join(&mut h, sel[class[v]], src[v])?;
    }
    for i in 0..n {
        for j in i + 1..n {
            join(&mut h, xs[i], xs[j])?;
        }
        for &s in &src[..n] {
            join(&mut h, xs[i], s)?;
        }
    }
    for i in 0..p {
        for j in i + 1..p {
            join(&mut h, ys[i], ys[j])?;
        }
        for &x in &xs {
            join(&mut h, ys[i], x)?;
        }
    }
    let mut terminals = LabelSet::new();
    for &s in &sel {
        terminals.insert(join(&mut h, ys[0], s)?);
    }
    Ok(CliqueReduction {
        graph: h,
        terminals,
        ell: (n + (n + d - k + 1) * k) as u64,
        n,
        d,
        k,
    })
}
