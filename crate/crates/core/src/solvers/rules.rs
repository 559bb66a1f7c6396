//! Leaf reduction rules for conflict trees, with the maps that carry a witness of the
//! reduced instance back to the original one.

use std::collections::BTreeMap;

use super::basic::{esc_node, minimize_node};
use super::constraint::{Constraint, Group, GroupOption, Pivot};
use super::{leaves_by_depth, remove_leaf, restrict_weights, Problem, SolveError, SolverOptions, TreeInstance};
use crate::matroid::{sym_diff, BinaryMatroid, LabelSet};

/// Outcome of one leaf reduction.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum Step {
    /// The instance has no solution.
    No,
    /// An equivalent instance on a smaller tree, and how to lift its witnesses.
    Reduced { next: Box<TreeInstance>, lift: Lift },
}

/// Turns a witness of the reduced instance into one of the instance before the step.
#[derive(Clone, Debug)]
pub enum Lift {
    Identity,
    /// Applies when the witness uses the shared element.
    Through {
        shared: String,
        circuit: Option<LabelSet>,
    },
    /// The witness always crosses the removed sum.
    Always {
        circuit: LabelSet,
    },
    /// Leaf circuits meeting the shared triangle in one element: `single` keeps ones
    /// whose difference with the triangle is again a circuit, `double` serves witnesses
    /// that meet the triangle in the two elements other than the key.
    Triangle {
        shared: LabelSet,
        single: BTreeMap<String, LabelSet>,
        double: BTreeMap<String, LabelSet>,
        leaf: BinaryMatroid,
    },
}

impl Lift {
    pub fn apply(&self, c: &LabelSet) -> Result<LabelSet, SolveError> {
        let missing = |what: &str| SolveError::Invariant(format!("no stored leaf circuit for {what}"));
        match self {
            Lift::Identity => Ok(c.clone()),
            Lift::Through { shared, circuit } => {
                if !c.contains(shared) {
                    return Ok(c.clone());
                }
                let d = circuit.as_ref().ok_or_else(|| missing(shared))?;
                Ok(sym_diff(c, d))
            }
            Lift::Always { circuit } => Ok(sym_diff(c, circuit)),
            Lift::Triangle {
                shared,
                single,
                double,
                leaf,
            } => {
                let inter: Vec<&String> = c.intersection(shared).collect();
                match inter.len() {
                    0 => Ok(c.clone()),
                    1 => {
                        let d = single.get(inter[0]).ok_or_else(|| missing(inter[0]))?;
                        Ok(sym_diff(c, d))
                    }
                    2 => {
                        let rest = shared
                            .iter()
                            .find(|e| !c.contains(*e))
                            .expect("one triangle element is unused");
                        let base = sym_diff(c, shared);
                        if let Some(d) = double.get(rest) {
                            return Ok(sym_diff(&base, d));
                        }
                        // Two single circuits combine into a leaf circuit through the
                        // third element that is no heavier than both together.
                        let a = single.get(inter[0]).ok_or_else(|| missing(inter[0]))?;
                        let b = single.get(inter[1]).ok_or_else(|| missing(inter[1]))?;
                        let x = sym_diff(&sym_diff(a, b), shared);
                        let d = leaf.circuit_within_labels(&x, rest).ok_or_else(|| missing(rest))?;
                        Ok(sym_diff(&base, &d))
                    }
                    _ => Err(SolveError::Invariant("witness contains a whole shared triangle".into())),
                }
            }
        }
    }
}

/// The parts of an instance seen from one leaf.
struct LeafView {
    leaf: usize,
    sub: usize,
    shared: LabelSet,
    labels: LabelSet,
    t_leaf: LabelSet,
    x_leaf: Vec<Group>,
    x_rest: Vec<Group>,
}

fn view(inst: &TreeInstance, leaf: usize, size: usize) -> Result<LeafView, SolveError> {
    let tree = &inst.tree;
    if leaf >= tree.nodes.len() || leaf == tree.root {
        return Err(SolveError::Invariant(format!("node {leaf} is not a non-root node")));
    }
    let nb = tree.neighbors(leaf);
    if nb.len() != 1 {
        return Err(SolveError::Invariant(format!("node {leaf} is not a leaf")));
    }
    let (sub, shared) = (nb[0].0, nb[0].1.clone());
    if shared.len() != size {
        return Err(SolveError::Invariant(format!(
            "leaf {leaf} shares {} elements, rule expects {size}",
            shared.len()
        )));
    }
    let labels = tree.nodes[leaf].labels();
    let (x_leaf, x_rest) = inst
        .cons
        .groups
        .iter()
        .cloned()
        .partition(|g| g.elements.is_subset(&labels));
    Ok(LeafView {
        leaf,
        sub,
        shared,
        t_leaf: inst.cons.terminals.intersection(&labels).cloned().collect(),
        labels,
        x_leaf,
        x_rest,
    })
}

impl LeafView {
    fn node<'a>(&self, inst: &'a TreeInstance) -> &'a crate::decomp::BasicNode {
        &inst.tree.nodes[self.leaf]
    }

    /// The constraint restricted to the leaf.
    fn leaf_cons(&self, inst: &TreeInstance) -> Constraint {
        Constraint {
            terminals: self.t_leaf.clone(),
            groups: self.x_leaf.clone(),
            pivot: None,
            weights: restrict_weights(&inst.cons.weights, &self.labels),
            budget: inst.cons.budget,
        }
    }

    /// The instance without the leaf, its terminals, groups and weights.
    fn rest(&self, inst: &TreeInstance) -> TreeInstance {
        let mut cons = inst.cons.clone();
        cons.terminals = cons.terminals.difference(&self.labels).cloned().collect();
        cons.groups = self.x_rest.clone();
        cons.weights.retain(|l, _| !self.labels.contains(l));
        TreeInstance {
            tree: remove_leaf(&inst.tree, self.leaf),
            cons,
        }
    }

    fn sub_after_removal(&self) -> usize {
        if self.sub > self.leaf {
            self.sub - 1
        } else {
            self.sub
        }
    }

    fn triangle(&self) -> Vec<String> {
        self.shared.iter().cloned().collect()
    }
}

fn reduced(next: TreeInstance, lift: Lift) -> Step {
    Step::Reduced {
        next: Box::new(next),
        lift,
    }
}

fn one(e: &str) -> LabelSet {
    [e.to_string()].into()
}

fn delete_from_sub(next: &mut TreeInstance, v: &LeafView, e: &str) -> Result<(), SolveError> {
    let s = v.sub_after_removal();
    next.tree.nodes[s] = next.tree.nodes[s].delete_element(e)?;
    Ok(())
}

/// Leaf joined by a 1-sum, weighted problem.
pub fn wmsc_rule_1leaf(inst: &TreeInstance, leaf: usize) -> Result<Step, SolveError> {
    let v = view(inst, leaf, 0)?;
    if !v.t_leaf.is_empty() || !v.x_leaf.is_empty() {
        return Ok(Step::No);
    }
    Ok(reduced(v.rest(inst), Lift::Identity))
}

/// Leaf joined by a 2-sum, weighted problem.
pub fn wmsc_rule_2leaf(inst: &TreeInstance, leaf: usize, opts: &SolverOptions) -> Result<Step, SolveError> {
    let v = view(inst, leaf, 1)?;
    let e = v.shared.iter().next().expect("one shared element").clone();
    let k = inst.cons.budget;
    let mut lc = v.leaf_cons(inst);
    let mut next = v.rest(inst);
    if v.t_leaf.is_empty() && v.x_leaf.is_empty() {
        // Price e as the cheapest way to close a circuit through it inside the leaf.
        lc.terminals = one(&e);
        let best = minimize_node(v.node(inst), &lc, opts)?;
        next.cons
            .weights
            .insert(e.clone(), best.as_ref().map_or(k + 1, |b| b.1));
        let lift = Lift::Through {
            shared: e,
            circuit: best.map(|b| b.0),
        };
        return Ok(reduced(next, lift));
    }
    lc.terminals.insert(e.clone());
    let Some((circuit, kl)) = minimize_node(v.node(inst), &lc, opts)? else {
        return Ok(Step::No);
    };
    next.cons.terminals.insert(e);
    next.cons.budget = k - kl;
    Ok(reduced(next, Lift::Always { circuit }))
}

/// Leaf joined by a 3-sum, weighted problem.
pub fn wmsc_rule_3leaf(inst: &TreeInstance, leaf: usize, opts: &SolverOptions) -> Result<Step, SolveError> {
    let v = view(inst, leaf, 3)?;
    let node = v.node(inst);
    let m = node.matroid();
    let k = inst.cons.budget;
    let s = v.triangle();
    let mut next = v.rest(inst);
    let mut single = BTreeMap::new();
    let mut double = BTreeMap::new();
    let lift = |single, double| Lift::Triangle {
        shared: v.shared.clone(),
        single,
        double,
        leaf: m.clone(),
    };

    if v.t_leaf.is_empty() && v.x_leaf.is_empty() {
        for ei in &s {
            let mut lc = v.leaf_cons(inst);
            lc.pivot = Some(Pivot {
                triangle: v.shared.clone(),
                t: ei.clone(),
            });
            lc.weights.insert(ei.clone(), 0);
            let best = minimize_node(node, &lc, opts)?;
            next.cons
                .weights
                .insert(ei.clone(), best.as_ref().map_or(k + 1, |b| b.1));
            if let Some((c, _)) = best {
                single.insert(ei.clone(), c);
            }
        }
        return Ok(reduced(next, lift(single, double)));
    }

    if v.x_leaf.is_empty() {
        let closing = s.iter().find(|ei| {
            let mut c = v.t_leaf.clone();
            c.insert((*ei).clone());
            m.is_circuit_labels(&c)
        });
        if let Some(ei) = closing {
            let mut cl = v.t_leaf.clone();
            cl.insert(ei.clone());
            if m.is_circuit_labels(&sym_diff(&cl, &v.shared)) {
                next.cons.terminals.insert(ei.clone());
                for eh in s.iter().filter(|x| *x != ei) {
                    let ej = s.iter().find(|x| *x != ei && *x != eh).expect("third element");
                    let mut lc = v.leaf_cons(inst);
                    lc.groups = vec![Group {
                        elements: v.shared.clone(),
                        options: vec![GroupOption {
                            chosen: one(eh),
                            weight: 1,
                        }],
                    }];
                    lc.budget = k + 1;
                    let best = minimize_node(node, &lc, opts)?;
                    next.cons
                        .weights
                        .insert(ej.clone(), best.as_ref().map_or(k + 1, |b| b.1 - 1));
                    if let Some((c, _)) = best {
                        double.insert(eh.clone(), c);
                    }
                }
                single.insert(ei.clone(), cl);
            } else {
                next.cons.weights.insert(ei.clone(), k + 1);
                for ej in s.iter().filter(|x| *x != ei) {
                    next.cons.terminals.insert(ej.clone());
                }
                double.insert(ei.clone(), cl);
            }
            return Ok(reduced(next, lift(single, double)));
        }
    }

    let mut menu = Vec::new();
    for ei in &s {
        let mut lc = v.leaf_cons(inst);
        lc.pivot = Some(Pivot {
            triangle: v.shared.clone(),
            t: ei.clone(),
        });
        for x in &s {
            lc.weights.insert(x.clone(), 1);
        }
        lc.budget = k + 1;
        if let Some((c, kl)) = minimize_node(node, &lc, opts)? {
            menu.push(GroupOption {
                chosen: one(ei),
                weight: kl - 1,
            });
            single.insert(ei.clone(), c);
        }
    }
    for ei in &s {
        let mut lc = v.leaf_cons(inst);
        lc.groups.push(Group {
            elements: v.shared.clone(),
            options: vec![GroupOption {
                chosen: one(ei),
                weight: 1,
            }],
        });
        lc.budget = k + 1;
        if let Some((c, kl)) = minimize_node(node, &lc, opts)? {
            menu.push(GroupOption {
                chosen: v.shared.iter().filter(|x| *x != ei).cloned().collect(),
                weight: kl - 1,
            });
            double.insert(ei.clone(), c);
        }
    }
    if menu.is_empty() {
        return Ok(Step::No);
    }
    next.cons.groups.push(Group {
        elements: v.shared.clone(),
        options: menu,
    });
    Ok(reduced(next, lift(single, double)))
}

/// Leaf joined by a 1-sum, spanning problem.
pub fn scir_rule_1leaf(inst: &TreeInstance, leaf: usize) -> Result<Step, SolveError> {
    let v = view(inst, leaf, 0)?;
    if !v.x_leaf.is_empty() || !v.t_leaf.is_empty() {
        return Ok(Step::No);
    }
    Ok(reduced(v.rest(inst), Lift::Identity))
}

/// Leaf joined by a 2-sum, spanning problem.
pub fn scir_rule_2leaf(inst: &TreeInstance, leaf: usize, opts: &SolverOptions) -> Result<Step, SolveError> {
    let v = view(inst, leaf, 1)?;
    let e = v.shared.iter().next().expect("one shared element").clone();
    let mut lc = v.leaf_cons(inst);
    let mut next = v.rest(inst);
    if v.x_leaf.is_empty() && v.t_leaf.is_empty() {
        lc.groups = vec![Group::singleton(&e)];
        let found = esc_node(v.node(inst), &lc, opts)?;
        if found.is_none() {
            delete_from_sub(&mut next, &v, &e)?;
        }
        return Ok(reduced(
            next,
            Lift::Through {
                shared: e,
                circuit: found,
            },
        ));
    }
    lc.groups.push(Group::singleton(&e));
    let Some(circuit) = esc_node(v.node(inst), &lc, opts)? else {
        return Ok(Step::No);
    };
    next.cons.groups.push(Group::singleton(&e));
    Ok(reduced(next, Lift::Always { circuit }))
}

/// Leaf joined by a 3-sum, spanning problem.
pub fn scir_rule_3leaf(inst: &TreeInstance, leaf: usize, opts: &SolverOptions) -> Result<Step, SolveError> {
    let v = view(inst, leaf, 3)?;
    let node = v.node(inst);
    let s = v.triangle();
    let mut next = v.rest(inst);
    let mut single = BTreeMap::new();
    let mut double = BTreeMap::new();
    let pivot = |ei: &String| Pivot {
        triangle: v.shared.clone(),
        t: ei.clone(),
    };
    if v.x_leaf.is_empty() && v.t_leaf.is_empty() {
        for ei in &s {
            let mut lc = v.leaf_cons(inst);
            lc.pivot = Some(pivot(ei));
            match esc_node(node, &lc, opts)? {
                Some(c) => {
                    single.insert(ei.clone(), c);
                }
                None => delete_from_sub(&mut next, &v, ei)?,
            }
        }
    } else {
        let mut menu = Vec::new();
        for ei in &s {
            let mut lc = v.leaf_cons(inst);
            lc.pivot = Some(pivot(ei));
            if let Some(c) = esc_node(node, &lc, opts)? {
                menu.push(GroupOption {
                    chosen: one(ei),
                    weight: 0,
                });
                single.insert(ei.clone(), c);
            }
        }
        for ei in &s {
            let mut lc = v.leaf_cons(inst);
            lc.groups.push(Group {
                elements: v.shared.clone(),
                options: vec![GroupOption {
                    chosen: one(ei),
                    weight: 0,
                }],
            });
            if let Some(c) = esc_node(node, &lc, opts)? {
                menu.push(GroupOption {
                    chosen: v.shared.iter().filter(|x| *x != ei).cloned().collect(),
                    weight: 0,
                });
                double.insert(ei.clone(), c);
            }
        }
        if menu.is_empty() {
            return Ok(Step::No);
        }
        next.cons.groups.push(Group {
            elements: v.shared.clone(),
            options: menu,
        });
    }
    Ok(reduced(
        next,
        Lift::Triangle {
            shared: v.shared.clone(),
            single,
            double,
            leaf: node.matroid().clone(),
        },
    ))
}

/// Applies the matching rule to the deepest leaf of a tree with at least two nodes.
pub fn leaf_step(inst: &TreeInstance, problem: Problem, opts: &SolverOptions) -> Result<Step, SolveError> {
    let leaf = *leaves_by_depth(&inst.tree)
        .first()
        .ok_or_else(|| SolveError::Invariant("tree has no non-root leaf".into()))?;
    let size = inst.tree.neighbors(leaf)[0].1.len();
    match (problem, size) {
        (Problem::Weighted, 0) => wmsc_rule_1leaf(inst, leaf),
        (Problem::Weighted, 1) => wmsc_rule_2leaf(inst, leaf, opts),
        (Problem::Weighted, 3) => wmsc_rule_3leaf(inst, leaf, opts),
        (Problem::Spanning, 0) => scir_rule_1leaf(inst, leaf),
        (Problem::Spanning, 1) => scir_rule_2leaf(inst, leaf, opts),
        (Problem::Spanning, 3) => scir_rule_3leaf(inst, leaf, opts),
        (_, n) => Err(SolveError::Invariant(format!("tree edge shares {n} elements"))),
    }
}
