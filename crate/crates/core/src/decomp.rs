//! Extended 1-, 2- and 3-sums, conflict trees of basic matroids, and the
//! circuit calculus of sums.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::gf2::{self, Gf2Matrix};
use crate::graph::{GraphError, MultiGraph};
use crate::matroid::{r10_with_labels, sym_diff, BinaryMatroid, LabelSet, MatroidError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecompError {
    #[error("shared label set has {0} elements; sums allow 0, 1 or 3")]
    SharedSize(usize),
    #[error("shared triple {0:?} is not a circuit of both summands")]
    TripleNotCircuit(LabelSet),
    #[error("invalid conflict tree: {0}")]
    InvalidTree(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Edits applied to R10 to obtain a basic node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct R10Edit {
    /// Labels of the ten columns of R10, in column order.
    pub base_labels: Vec<String>,
    /// Added elements as `(new label, label it is parallel to)`, applied in order.
    pub parallels: Vec<(String, String)>,
    /// Labels deleted after the parallel additions.
    pub deleted: Vec<String>,
    /// Element weights; missing entries weigh 1.
    pub weights: BTreeMap<String, u64>,
}

impl R10Edit {
    pub fn plain() -> Self {
        R10Edit {
            base_labels: (0..10).map(|i| format!("r{i}")).collect(),
            parallels: Vec::new(),
            deleted: Vec::new(),
            weights: BTreeMap::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodeKind {
    Graphic(MultiGraph),
    Cographic(MultiGraph),
    R10Derived(R10Edit),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasicNode {
    kind: NodeKind,
    matroid: BinaryMatroid,
}

impl BasicNode {
    pub fn new(kind: NodeKind) -> Result<Self, DecompError> {
        let matroid = match &kind {
            NodeKind::Graphic(g) => g.cycle_matroid(),
            NodeKind::Cographic(g) => g.bond_matroid(),
            NodeKind::R10Derived(edit) => {
                if edit.base_labels.len() != 10 {
                    return Err(DecompError::Precondition(format!(
                        "R10 needs 10 base labels, got {}",
                        edit.base_labels.len()
                    )));
                }
                let mut m = r10_with_labels(&edit.base_labels);
                for (new, of) in &edit.parallels {
                    m = m.add_parallel(of, new)?;
                }
                let del: LabelSet = edit.deleted.iter().cloned().collect();
                m.delete_labels(&del)?
            }
        };
        Ok(BasicNode { kind, matroid })
    }

    pub fn graphic(g: MultiGraph) -> Self {
        Self::new(NodeKind::Graphic(g)).expect("graphs always yield a matroid")
    }

    pub fn cographic(g: MultiGraph) -> Self {
        Self::new(NodeKind::Cographic(g)).expect("graphs always yield a matroid")
    }

    pub fn kind(&self) -> &NodeKind {
        &self.kind
    }

    pub fn matroid(&self) -> &BinaryMatroid {
        &self.matroid
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            NodeKind::Graphic(_) => "graphic",
            NodeKind::Cographic(_) => "cographic",
            NodeKind::R10Derived(_) => "r10",
        }
    }

    pub fn labels(&self) -> LabelSet {
        self.matroid.ground_labels()
    }

    pub fn weight(&self, label: &str) -> u64 {
        match &self.kind {
            NodeKind::Graphic(g) | NodeKind::Cographic(g) => g.edge_by_label(label).map_or(1, |e| e.weight),
            NodeKind::R10Derived(edit) => edit.weights.get(label).copied().unwrap_or(1),
        }
    }

    /// The node with one element deleted from its matroid. For a cographic node
    /// this contracts the edge of the underlying graph.
    pub fn delete_element(&self, label: &str) -> Result<BasicNode, DecompError> {
        let kind = match &self.kind {
            NodeKind::Graphic(g) => {
                let i = g
                    .edge_index(label)
                    .ok_or_else(|| GraphError::UnknownEdge(label.to_string()))?;
                NodeKind::Graphic(g.delete_edges(&[i]))
            }
            NodeKind::Cographic(g) => NodeKind::Cographic(g.contract_edge(label)?),
            NodeKind::R10Derived(edit) => {
                if !self.matroid.contains_label(label) {
                    return Err(MatroidError::UnknownElement(label.to_string()).into());
                }
                let mut e = edit.clone();
                e.deleted.push(label.to_string());
                NodeKind::R10Derived(e)
            }
        };
        BasicNode::new(kind)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeEdge {
    pub a: usize,
    pub b: usize,
    pub shared: LabelSet,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConflictTree {
    pub nodes: Vec<BasicNode>,
    pub edges: Vec<TreeEdge>,
    pub root: usize,
}

impl ConflictTree {
    pub fn single(node: BasicNode) -> Self {
        ConflictTree {
            nodes: vec![node],
            edges: Vec::new(),
            root: 0,
        }
    }

    /// Builds a tree, deriving each edge's shared labels from the node label sets.
    pub fn from_nodes(nodes: Vec<BasicNode>, pairs: &[(usize, usize)], root: usize) -> Self {
        let edges = pairs
            .iter()
            .map(|&(a, b)| TreeEdge {
                a,
                b,
                shared: nodes[a].labels().intersection(&nodes[b].labels()).cloned().collect(),
            })
            .collect();
        ConflictTree { nodes, edges, root }
    }

    pub fn neighbors(&self, i: usize) -> Vec<(usize, &LabelSet)> {
        self.edges
            .iter()
            .filter_map(|e| {
                if e.a == i {
                    Some((e.b, &e.shared))
                } else if e.b == i {
                    Some((e.a, &e.shared))
                } else {
                    None
                }
            })
            .collect()
    }

    /// Labels used on tree edges.
    pub fn shared_labels(&self) -> LabelSet {
        self.edges.iter().flat_map(|e| e.shared.iter().cloned()).collect()
    }

    /// Ground set of the composed matroid.
    pub fn composed_labels(&self) -> LabelSet {
        let shared = self.shared_labels();
        self.nodes
            .iter()
            .flat_map(|n| n.labels())
            .filter(|l| !shared.contains(l))
            .collect()
    }

    /// Node holding a (non-shared or shared) label; the first one if shared.
    pub fn node_of(&self, label: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.matroid().contains_label(label))
    }

    /// Weights of the composed ground elements, read from the nodes.
    pub fn weights(&self) -> BTreeMap<String, u64> {
        let shared = self.shared_labels();
        let mut w = BTreeMap::new();
        for n in &self.nodes {
            for l in n.labels() {
                if !shared.contains(&l) {
                    let x = n.weight(&l);
                    w.insert(l, x);
                }
            }
        }
        w
    }

    /// Checks every tree invariant and reports the first violation.
    pub fn validate(&self) -> Result<(), DecompError> {
        let bad = |m: String| Err(DecompError::InvalidTree(m));
        let n = self.nodes.len();
        if n == 0 {
            return bad("no nodes".into());
        }
        if self.root >= n {
            return bad(format!("root {} out of range", self.root));
        }
        if self.edges.len() != n - 1 {
            return bad(format!(
                "{} nodes need {} tree edges, found {}",
                n,
                n - 1,
                self.edges.len()
            ));
        }
        let mut comp: Vec<usize> = (0..n).collect();
        fn find(c: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while c[r] != r {
                r = c[r];
            }
            c[x] = r;
            r
        }
        for e in &self.edges {
            if e.a >= n || e.b >= n || e.a == e.b {
                return bad(format!("edge ({}, {}) has invalid endpoints", e.a, e.b));
            }
            let (ra, rb) = (find(&mut comp, e.a), find(&mut comp, e.b));
            if ra == rb {
                return bad("tree edges contain a cycle".into());
            }
            comp[ra] = rb;
        }
        let labels: Vec<LabelSet> = self.nodes.iter().map(BasicNode::labels).collect();
        let mut adjacent = vec![vec![false; n]; n];
        for e in &self.edges {
            adjacent[e.a][e.b] = true;
            adjacent[e.b][e.a] = true;
            let common: LabelSet = labels[e.a].intersection(&labels[e.b]).cloned().collect();
            if common != e.shared {
                return bad(format!(
                    "edge ({}, {}) lists {:?} but the nodes share {:?}",
                    e.a, e.b, e.shared, common
                ));
            }
            if ![0, 1, 3].contains(&e.shared.len()) {
                return bad(format!(
                    "edge ({}, {}) shares {} labels; allowed sizes are 0, 1 and 3",
                    e.a,
                    e.b,
                    e.shared.len()
                ));
            }
            if e.shared.len() == 3 {
                for x in [e.a, e.b] {
                    if !self.nodes[x].matroid().is_circuit_labels(&e.shared) {
                        return bad(format!("shared triple {:?} is not a circuit of node {}", e.shared, x));
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if !adjacent[i][j] && labels[i].intersection(&labels[j]).next().is_some() {
                    return bad(format!("nonadjacent nodes {i} and {j} share labels"));
                }
            }
        }
        Ok(())
    }

    /// Tree edges in breadth-first order from the root.
    pub fn bfs_edge_order(&self) -> Vec<usize> {
        let mut seen = vec![false; self.nodes.len()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([self.root]);
        seen[self.root] = true;
        while let Some(x) = queue.pop_front() {
            for (i, e) in self.edges.iter().enumerate() {
                let y = if e.a == x {
                    e.b
                } else if e.b == x {
                    e.a
                } else {
                    continue;
                };
                if !seen[y] {
                    seen[y] = true;
                    order.push(i);
                    queue.push_back(y);
                }
            }
        }
        order
    }
}

/// Extended sum of two binary matroids along their common labels.
pub fn sum(m1: &BinaryMatroid, m2: &BinaryMatroid) -> Result<BinaryMatroid, DecompError> {
    let shared: LabelSet = m1.labels().iter().filter(|l| m2.contains_label(l)).cloned().collect();
    if ![0, 1, 3].contains(&shared.len()) {
        return Err(DecompError::SharedSize(shared.len()));
    }
    if shared.len() == 3 && !(m1.is_circuit_labels(&shared) && m2.is_circuit_labels(&shared)) {
        return Err(DecompError::TripleNotCircuit(shared));
    }

    // Joint coordinates: shared labels first, then the private labels of each side.
    let mut joint: Vec<String> = shared.iter().cloned().collect();
    joint.extend(m1.labels().iter().filter(|l| !shared.contains(*l)).cloned());
    joint.extend(m2.labels().iter().filter(|l| !shared.contains(*l)).cloned());
    let pos: BTreeMap<&str, usize> = joint.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let width = joint.len();

    let mut rows = Vec::new();
    for m in [m1, m2] {
        for c in m.cycle_space_basis() {
            let mut v = vec![0u64; gf2::words_for(width)];
            for i in c.iter() {
                gf2::flip_bit(&mut v, pos[m.label(i)]);
            }
            rows.push(v);
        }
    }
    let span = Gf2Matrix::from_bit_rows(width, rows);
    let (reduced, pivots) = span.rref();
    let z = shared.len();
    // Rows whose leading entry lies past the shared block vanish on it.
    let keep_cols: Vec<usize> = (z..width).collect();
    let mut cycles = Vec::new();
    for (r, &p) in pivots.iter().enumerate() {
        if p >= z {
            let sel = Gf2Matrix::from_bit_rows(width, vec![reduced.row_words(r).to_vec()]).select_columns(&keep_cols);
            cycles.push(sel.row_words(0).to_vec());
        }
    }
    let cycle_matrix = Gf2Matrix::from_bit_rows(width - z, cycles);
    let rep = cycle_matrix.orthogonal_complement();
    Ok(BinaryMatroid::new(rep, joint[z..].to_vec())?)
}

pub fn compose(tree: &ConflictTree) -> Result<BinaryMatroid, DecompError> {
    tree.validate()?;
    compose_in_order(tree, &tree.bfs_edge_order())
}

/// Folds the sums over the tree edges in the given order. Every order of the
/// tree edges yields the same matroid.
pub fn compose_in_order(tree: &ConflictTree, order: &[usize]) -> Result<BinaryMatroid, DecompError> {
    let n = tree.nodes.len();
    if order.len() != tree.edges.len() || order.iter().collect::<BTreeSet<_>>().len() != order.len() {
        return Err(DecompError::Precondition(
            "edge order must list every tree edge once".into(),
        ));
    }
    let mut parts: Vec<Option<BinaryMatroid>> = tree.nodes.iter().map(|x| Some(x.matroid().clone())).collect();
    let mut owner: Vec<usize> = (0..n).collect();
    for &ei in order {
        let e = &tree.edges[ei];
        let (oa, ob) = (owner[e.a], owner[e.b]);
        let a = parts[oa].take().expect("live part");
        let b = parts[ob].take().expect("live part");
        parts[oa] = Some(sum(&a, &b)?);
        for o in owner.iter_mut() {
            if *o == ob {
                *o = oa;
            }
        }
    }
    Ok(parts[owner[tree.root]].take().expect("root part"))
}

fn circuit_sets(m: &BinaryMatroid) -> Result<Vec<LabelSet>, DecompError> {
    Ok(m.enumerate_circuit_labels()?.into_iter().collect())
}

/// Circuits of a 1-sum: the union of the two circuit families.
pub fn sum1_circuits(m1: &BinaryMatroid, m2: &BinaryMatroid) -> Result<BTreeSet<LabelSet>, DecompError> {
    let mut out: BTreeSet<LabelSet> = circuit_sets(m1)?.into_iter().collect();
    out.extend(circuit_sets(m2)?);
    Ok(out)
}

/// Circuits of a 2-sum along `e`, assembled from the circuits of the summands.
pub fn sum2_circuits(m1: &BinaryMatroid, m2: &BinaryMatroid, e: &str) -> Result<BTreeSet<LabelSet>, DecompError> {
    let c1 = circuit_sets(m1)?;
    let c2 = circuit_sets(m2)?;
    let mut out = BTreeSet::new();
    for c in c1.iter().chain(&c2) {
        if !c.contains(e) {
            out.insert(c.clone());
        }
    }
    for a in c1.iter().filter(|c| c.contains(e)) {
        for b in c2.iter().filter(|c| c.contains(e)) {
            out.insert(sym_diff(a, b));
        }
    }
    Ok(out)
}

/// Circuits of a 3-sum along the triangle `z`.
pub fn sum3_circuits(m1: &BinaryMatroid, m2: &BinaryMatroid, z: &LabelSet) -> Result<BTreeSet<LabelSet>, DecompError> {
    let c1 = circuit_sets(m1)?;
    let c2 = circuit_sets(m2)?;
    let s1: BTreeSet<&LabelSet> = c1.iter().collect();
    let s2: BTreeSet<&LabelSet> = c2.iter().collect();
    let mut out = BTreeSet::new();
    for c in c1.iter().chain(&c2) {
        if c.is_disjoint(z) {
            out.insert(c.clone());
        }
    }
    for a in &c1 {
        let ia: LabelSet = a.intersection(z).cloned().collect();
        if ia.len() != 1 {
            continue;
        }
        let a_closes = s1.contains(&sym_diff(a, z));
        for b in &c2 {
            let ib: LabelSet = b.intersection(z).cloned().collect();
            if ib != ia {
                continue;
            }
            if a_closes || s2.contains(&sym_diff(b, z)) {
                out.insert(sym_diff(a, b));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TriangleSplit {
    One(LabelSet),
    /// Two disjoint circuits; the first meets the triangle in its first free element.
    Two(LabelSet, LabelSet),
}

fn triangle_check(m: &BinaryMatroid, z: &LabelSet, c: &LabelSet, meet: usize) -> Result<LabelSet, DecompError> {
    if z.len() != 3 || !m.is_circuit_labels(z) {
        return Err(DecompError::Precondition("Z must be a 3-element circuit".into()));
    }
    if !m.is_circuit_labels(c) {
        return Err(DecompError::Precondition("C must be a circuit".into()));
    }
    let common: LabelSet = c.intersection(z).cloned().collect();
    if common.len() != meet {
        return Err(DecompError::Precondition(format!("C must meet Z in {meet} element(s)")));
    }
    Ok(common)
}

/// For a circuit meeting the triangle `z` in one element, C△Z is either a circuit or
/// splits into two circuits, each containing one of the other triangle elements.
pub fn triangle_split(m: &BinaryMatroid, z: &LabelSet, c: &LabelSet) -> Result<TriangleSplit, DecompError> {
    let common = triangle_check(m, z, c, 1)?;
    let d = sym_diff(c, z);
    if m.is_circuit_labels(&d) {
        return Ok(TriangleSplit::One(d));
    }
    let free: Vec<&String> = z.difference(&common).collect();
    let first = m
        .circuit_within_labels(&d, free[0])
        .ok_or_else(|| DecompError::Precondition("C△Z is not a cycle".into()))?;
    let second: LabelSet = d.difference(&first).cloned().collect();
    Ok(TriangleSplit::Two(first, second))
}

/// For a circuit meeting the triangle in two elements, C△Z is again a circuit.
pub fn triangle_merge(m: &BinaryMatroid, z: &LabelSet, c: &LabelSet) -> Result<LabelSet, DecompError> {
    triangle_check(m, z, c, 2)?;
    Ok(sym_diff(c, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::label_set;

    fn triangle(a: &str, b: &str, c: &str) -> MultiGraph {
        MultiGraph::from_edge_list(&[(a, "x", "y", 1), (b, "y", "z", 1), (c, "z", "x", 1)])
    }

    pub(crate) fn k4(labels: [&str; 6]) -> MultiGraph {
        let vs = ["a", "b", "c", "d"];
        let mut g = MultiGraph::new();
        let mut k = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                g.add_named_edge(labels[k], vs[i], vs[j], 1).unwrap();
                k += 1;
            }
        }
        g
    }

    #[test]
    fn two_triangles_make_a_square() {
        let m1 = triangle("e", "p", "q").cycle_matroid();
        let m2 = triangle("e", "r", "s").cycle_matroid();
        let s = sum(&m1, &m2).unwrap();
        let circuits = s.enumerate_circuit_labels().unwrap();
        assert_eq!(circuits, BTreeSet::from([label_set(["p", "q", "r", "s"])]));
        assert_eq!(sum2_circuits(&m1, &m2, "e").unwrap(), circuits);
    }

    #[test]
    fn disjoint_sum_unions_circuits() {
        let m1 = triangle("a", "b", "c").cycle_matroid();
        let m2 = triangle("d", "e", "f").cycle_matroid();
        let s = sum(&m1, &m2).unwrap();
        assert_eq!(s.enumerate_circuit_labels().unwrap(), sum1_circuits(&m1, &m2).unwrap());
    }

    #[test]
    fn k4_three_sum_matches_characterization() {
        // ab, ac, ad, bc, bd, cd; triangle {ab, ac, bc}.
        let m1 = k4(["z1", "z2", "p1", "z3", "p2", "p3"]).cycle_matroid();
        let m2 = k4(["z1", "z2", "q1", "z3", "q2", "q3"]).cycle_matroid();
        let z = label_set(["z1", "z2", "z3"]);
        let s = sum(&m1, &m2).unwrap();
        assert_eq!(
            s.enumerate_circuit_labels().unwrap(),
            sum3_circuits(&m1, &m2, &z).unwrap()
        );
    }

    #[test]
    fn bad_shared_sizes_rejected() {
        let m1 = triangle("a", "b", "c").cycle_matroid();
        let m2 = triangle("a", "b", "d").cycle_matroid();
        assert_eq!(sum(&m1, &m2), Err(DecompError::SharedSize(2)));
    }

    #[test]
    fn validation_diagnostics() {
        let single = ConflictTree::single(BasicNode::graphic(triangle("a", "b", "c")));
        assert!(single.validate().is_ok());
        let t = ConflictTree::from_nodes(
            vec![
                BasicNode::graphic(triangle("a", "b", "c")),
                BasicNode::graphic(triangle("a", "b", "d")),
            ],
            &[(0, 1)],
            0,
        );
        assert!(t.validate().is_err());
        // The triple {ab, ac, ad} is a star of K4, not a cycle.
        let star = ConflictTree::from_nodes(
            vec![
                BasicNode::graphic(k4(["z1", "z2", "z3", "p1", "p2", "p3"])),
                BasicNode::cographic(k4(["z1", "z2", "z3", "q1", "q2", "q3"])),
            ],
            &[(0, 1)],
            0,
        );
        assert!(matches!(star.validate(), Err(DecompError::InvalidTree(_))));
    }

    #[test]
    fn compose_path_of_triangles_is_c4() {
        let t = ConflictTree::from_nodes(
            vec![
                BasicNode::graphic(triangle("e", "p", "q")),
                BasicNode::graphic(triangle("e", "r", "s")),
            ],
            &[(0, 1)],
            0,
        );
        let m = compose(&t).unwrap();
        assert_eq!(m.len(), 4);
        assert!(m.is_circuit_labels(&label_set(["p", "q", "r", "s"])));
    }

    #[test]
    fn triangle_split_and_merge() {
        let g = k4(["ab", "ac", "ad", "bc", "bd", "cd"]);
        let m = g.cycle_matroid();
        let z = label_set(["ab", "ac", "bc"]);
        // C = ab, bd, da meets Z in ab; C△Z = ac, bc, bd, ad which is a 4-cycle.
        let c = label_set(["ab", "bd", "ad"]);
        assert_eq!(
            triangle_split(&m, &z, &c).unwrap(),
            TriangleSplit::One(label_set(["ac", "ad", "bc", "bd"]))
        );
        let c2 = label_set(["ab", "bc", "cd", "ad"]);
        let merged = triangle_merge(&m, &z, &c2).unwrap();
        assert!(m.is_circuit_labels(&merged));
    }

    #[test]
    fn cographic_triangle_splits() {
        // K4 bond matroid: the star at a is a 3-circuit.
        let g = k4(["ab", "ac", "ad", "bc", "bd", "cd"]);
        let m = g.bond_matroid();
        let z = label_set(["ab", "ac", "ad"]);
        let c = label_set(["ad", "bd", "cd"]);
        match triangle_split(&m, &z, &c).unwrap() {
            TriangleSplit::One(d) => assert!(m.is_circuit_labels(&d)),
            TriangleSplit::Two(x, y) => {
                assert!(m.is_circuit_labels(&x) && m.is_circuit_labels(&y));
                assert!(m.is_circuit_labels(&sym_diff(&x, &z)));
                assert!(m.is_circuit_labels(&sym_diff(&y, &z)));
            }
        }
    }
}
