//! Instance families shared by the benchmarks.

use spancirc::ctse::CtseInstance;
use spancirc::emwc::EmwcInstance;
use spancirc::toolkit::{gen_random_graph, gen_random_tree};
use spancirc::{BasicNode, ConflictTree, LabelSet, MultiGraph};

/// A cycle `c0..c{n-1}` plus chords `d_i` skipping one vertex, weights 1 and 2.
pub fn square_of_cycle(n: usize) -> MultiGraph {
    let mut g = MultiGraph::new();
    for i in 0..n {
        g.add_vertex(&format!("v{i}")).unwrap();
    }
    for i in 0..n {
        g.add_edge(&format!("c{i}"), i, (i + 1) % n, 1).unwrap();
        g.add_edge(&format!("d{i}"), i, (i + 2) % n, 2).unwrap();
    }
    g
}

pub fn graphic_tree(n: usize) -> ConflictTree {
    ConflictTree::single(BasicNode::graphic(square_of_cycle(n)))
}

pub fn cographic_tree(n: usize) -> ConflictTree {
    ConflictTree::single(BasicNode::cographic(square_of_cycle(n)))
}

pub fn first_terminal() -> LabelSet {
    ["c0".to_string()].into()
}

pub fn ctse_instance(n: usize, k: u64) -> CtseInstance {
    CtseInstance::new(square_of_cycle(n), first_terminal(), k)
}

pub fn emwc_instance(seed: u64, n: usize, k: u64) -> EmwcInstance {
    let g = gen_random_graph(seed, n, n / 2, 3);
    let t: LabelSet = g.edges().iter().take(1).map(|e| e.label.clone()).collect();
    EmwcInstance::new(g, t, vec![0], vec![n - 1], k)
}

/// Random multi-node trees with one terminal each.
pub fn random_trees(count: u64) -> Vec<(ConflictTree, LabelSet)> {
    (0..count)
        .map(|seed| {
            let t = gen_random_tree(seed, 3, 16);
            let terms = t.composed_labels().into_iter().take(1).collect();
            (t, terms)
        })
        .collect()
}
