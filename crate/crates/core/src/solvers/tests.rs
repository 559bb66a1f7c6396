use std::collections::BTreeMap;

use super::*;
use crate::decomp::{NodeKind, R10Edit};
use crate::graph::MultiGraph;
use crate::matroid::label_set;
use crate::toolkit::gen::gen_random_tree;
use crate::toolkit::oracle::{oracle_constraint, oracle_sc, oracle_wmsc};

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn c4() -> MultiGraph {
    MultiGraph::from_edge_list(&[
        ("e1", "a", "b", 1),
        ("e2", "b", "c", 1),
        ("e3", "c", "d", 1),
        ("e4", "d", "a", 1),
    ])
}

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

fn two_triangles() -> ConflictTree {
    let t1 = MultiGraph::from_edge_list(&[("e1", "a", "b", 1), ("e2", "b", "c", 1), ("f", "c", "a", 1)]);
    let t2 = MultiGraph::from_edge_list(&[("f", "p", "q", 1), ("e3", "q", "r", 1), ("e4", "r", "p", 1)]);
    ConflictTree::from_nodes(vec![BasicNode::graphic(t1), BasicNode::graphic(t2)], &[(0, 1)], 0)
}

#[test]
fn graphic_four_cycle_spans_with_budget_four() {
    let t = ConflictTree::single(BasicNode::graphic(c4()));
    let out = solve_wmsc(&t, &label_set(["e1"]), 4, &opts()).unwrap();
    assert!(out.verdict());
    assert_eq!(out.weight, Some(4));
    assert_eq!(out.witness.unwrap().len(), 4);
    assert!(!solve_wmsc(&t, &label_set(["e1"]), 3, &opts()).unwrap().verdict());
}

#[test]
fn cographic_four_cycle_opposite_edges() {
    let t = ConflictTree::single(BasicNode::cographic(c4()));
    let out = solve_wmsc(&t, &label_set(["e1", "e3"]), 2, &opts()).unwrap();
    assert_eq!(out.witness, Some(label_set(["e1", "e3"])));
}

#[test]
fn r10_single_terminal_budget_two_is_no() {
    let node = BasicNode::new(NodeKind::R10Derived(R10Edit::plain())).unwrap();
    let t = ConflictTree::single(node.clone());
    let cons = Constraint::weighted(label_set(["r0"]), t.weights(), 2);
    assert!(!solve_ewmsc(&t, &cons, &opts()).unwrap().verdict());
    let cons = Constraint::weighted(label_set(["r0"]), t.weights(), 3);
    assert!(solve_ewmsc(&t, &cons, &opts()).unwrap().verdict());
}

#[test]
fn r10_rejects_groups() {
    let node = BasicNode::new(NodeKind::R10Derived(R10Edit::plain())).unwrap();
    let mut cons = Constraint::weighted(LabelSet::new(), BTreeMap::new(), 10);
    cons.groups.push(Group::singleton("r1"));
    assert!(!ewmsc_r10(&node, &cons).unwrap().verdict());
}

#[test]
fn spanning_examples_on_k4() {
    let t = ConflictTree::single(BasicNode::graphic(k4()));
    let out = solve_sc(&t, &label_set(["ab", "bc", "ac"]), &opts()).unwrap();
    assert_eq!(out.witness, Some(label_set(["ab", "ac", "bc"])));
    assert!(!solve_sc(&t, &label_set(["ab", "ac", "ad"]), &opts()).unwrap().verdict());
}

#[test]
fn bond_matroid_of_a_tree_has_no_circuit() {
    let path = MultiGraph::from_edge_list(&[("p", "a", "b", 1), ("q", "b", "c", 1)]);
    let t = ConflictTree::single(BasicNode::cographic(path));
    // A bridge is a loop of the bond matroid: a lone terminal is its own circuit.
    assert_eq!(
        solve_sc(&t, &label_set(["p"]), &opts()).unwrap().witness,
        Some(label_set(["p"]))
    );
    assert!(!solve_sc(&t, &label_set(["p", "q"]), &opts()).unwrap().verdict());
}

#[test]
fn two_triangles_compose_to_a_square() {
    let t = two_triangles();
    let out = solve_wmsc(&t, &label_set(["e1"]), 4, &opts()).unwrap();
    assert_eq!(out.weight, Some(4));
    assert_eq!(out.witness, Some(label_set(["e1", "e2", "e3", "e4"])));
}

#[test]
fn two_leaf_prices_the_shared_element() {
    // Root holds the terminal, the leaf is a triangle through the shared element.
    let mut t = two_triangles();
    t.root = 0;
    let cons = Constraint::weighted(label_set(["e1"]), t.weights(), 3);
    let inst = TreeInstance { tree: t, cons };
    let Step::Reduced { next, .. } = wmsc_rule_2leaf(&inst, 1, &opts()).unwrap() else {
        panic!("expected a reduction");
    };
    assert_eq!(next.cons.weights.get("f"), Some(&2));
    assert_eq!(next.cons.budget, 3);
    assert_eq!(next.tree.nodes.len(), 1);
}

#[test]
fn two_leaf_without_circuit_gets_sentinel_weight() {
    // In the leaf, f is a bridge, so no circuit of the leaf contains it.
    let root = MultiGraph::from_edge_list(&[("e1", "a", "b", 1), ("f", "b", "a", 1)]);
    let leaf = MultiGraph::from_edge_list(&[
        ("f", "p", "q", 1),
        ("g", "q", "r", 1),
        ("h", "r", "r2", 1),
        ("i", "r2", "r", 1),
    ]);
    let t = ConflictTree::from_nodes(vec![BasicNode::graphic(root), BasicNode::graphic(leaf)], &[(0, 1)], 0);
    let cons = Constraint::weighted(label_set(["e1"]), t.weights(), 5);
    let inst = TreeInstance { tree: t, cons };
    let Step::Reduced { next, .. } = wmsc_rule_2leaf(&inst, 1, &opts()).unwrap() else {
        panic!("expected a reduction");
    };
    assert_eq!(next.cons.weights.get("f"), Some(&6));
}

#[test]
fn one_leaf_with_terminal_is_no() {
    let a = MultiGraph::from_edge_list(&[("x", "a", "b", 1), ("y", "b", "a", 1)]);
    let b = MultiGraph::from_edge_list(&[("u", "p", "q", 1), ("v", "q", "p", 1)]);
    let t = ConflictTree::from_nodes(vec![BasicNode::graphic(a), BasicNode::graphic(b)], &[(0, 1)], 0);
    let cons = Constraint::weighted(label_set(["x", "u"]), t.weights(), 5);
    let inst = TreeInstance { tree: t.clone(), cons };
    assert!(matches!(wmsc_rule_1leaf(&inst, 1).unwrap(), Step::No));
    assert!(!solve_wmsc(&t, &label_set(["x", "u"]), 10, &opts()).unwrap().verdict());
}

#[test]
fn three_leaf_with_empty_menu_is_no() {
    // Leaf K4 sharing triangle {ab, bc, ac}; the terminal pair forces an empty menu
    // because the group {ab, ad} sits beside the shared triangle.
    let leaf = k4();
    let root = MultiGraph::from_edge_list(&[
        ("ab", "a", "b", 1),
        ("bc", "b", "c", 1),
        ("ac", "a", "c", 1),
        ("z", "a", "c", 1),
    ]);
    let t = ConflictTree::from_nodes(vec![BasicNode::graphic(root), BasicNode::graphic(leaf)], &[(0, 1)], 0);
    let mut cons = Constraint::weighted(label_set(["z"]), t.weights(), 0);
    cons.budget = 0;
    let inst = TreeInstance {
        tree: t.clone(),
        cons: cons.clone(),
    };
    // Terminals ad, bd, cd sit in the leaf: no circuit holds all three.
    let mut inst2 = inst.clone();
    inst2.cons.terminals = label_set(["z", "ad", "bd", "cd"]);
    inst2.cons.budget = 10;
    assert!(matches!(wmsc_rule_3leaf(&inst2, 1, &opts()).unwrap(), Step::No));
    let m = compose(&t).unwrap();
    assert!(oracle_constraint(&m, &inst2.cons).unwrap().is_none());
}

fn check_weighted_against_oracle(t: &ConflictTree, seed: u64) {
    let m = compose(t).unwrap();
    let w = t.weights();
    let labels: Vec<String> = t.composed_labels().into_iter().collect();
    if labels.is_empty() {
        return;
    }
    let pick = |i: u64| labels[(seed.wrapping_mul(31).wrapping_add(i * 7) as usize) % labels.len()].clone();
    let terms: LabelSet = (0..1 + seed % 2).map(pick).collect();
    for ell in [2, 4, 6, 9] {
        let got = solve_wmsc(t, &terms, ell, &opts()).unwrap();
        let want = oracle_wmsc(&m, &w, &terms, ell).unwrap();
        assert_eq!(
            got.weight,
            want.as_ref().map(|x| x.1),
            "seed {seed} ell {ell} T {terms:?}"
        );
        if let Some(c) = got.witness {
            assert!(m.is_circuit_labels(&c) && terms.is_subset(&c));
        }
    }
    let got = solve_sc(t, &terms, &opts()).unwrap();
    let want = oracle_sc(&m, &terms).unwrap();
    assert_eq!(got.verdict(), want.is_some(), "seed {seed} T {terms:?}");
}

#[test]
fn random_trees_match_the_oracle() {
    for seed in 0..40 {
        let t = gen_random_tree(seed, 3, 16);
        check_weighted_against_oracle(&t, seed);
    }
}

#[test]
fn empty_terminal_set_finds_the_lightest_circuit() {
    let t = two_triangles();
    let out = solve_wmsc(&t, &LabelSet::new(), 10, &opts()).unwrap();
    assert_eq!(out.weight, Some(4));
    let t = ConflictTree::single(BasicNode::graphic(k4()));
    let out = solve_wmsc(&t, &LabelSet::new(), 10, &opts()).unwrap();
    assert_eq!(out.weight, Some(3));
}

#[test]
fn budget_monotonicity() {
    let t = gen_random_tree(3, 3, 16);
    let terms: LabelSet = t.composed_labels().into_iter().take(1).collect();
    let mut seen_yes = false;
    for ell in 0..12 {
        let yes = solve_wmsc(&t, &terms, ell, &opts()).unwrap().verdict();
        assert!(yes || !seen_yes, "yes at a smaller budget but no at {ell}");
        seen_yes |= yes;
    }
}
