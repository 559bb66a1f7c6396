use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SolveError;
use crate::matroid::{sym_diff, BinaryMatroid, LabelSet};

/// One allowed intersection of the circuit with a group, and its price.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupOption {
    pub chosen: LabelSet,
    pub weight: u64,
}

/// A set of elements together with the allowed ways a circuit may meet it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub elements: LabelSet,
    pub options: Vec<GroupOption>,
}

impl Group {
    /// `{e}` with the single option `{e}` at no cost.
    pub fn singleton(e: &str) -> Self {
        let s: LabelSet = [e.to_string()].into();
        Group {
            elements: s.clone(),
            options: vec![GroupOption { chosen: s, weight: 0 }],
        }
    }

    pub fn option_for(&self, inter: &LabelSet) -> Option<&GroupOption> {
        self.options.iter().find(|o| &o.chosen == inter)
    }
}

/// A triangle and one of its elements: the circuit must meet the triangle exactly in
/// `t`, and its symmetric difference with the triangle must again be a circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pivot {
    pub triangle: LabelSet,
    pub t: String,
}

/// Terminals, groups, pivot, element weights and budget. Weights absent from the map
/// count as zero; weights of terminals and group elements are ignored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub terminals: LabelSet,
    #[serde(default)]
    pub groups: Vec<Group>,
    #[serde(default)]
    pub pivot: Option<Pivot>,
    #[serde(default)]
    pub weights: BTreeMap<String, u64>,
    #[serde(default)]
    pub budget: u64,
}

impl Constraint {
    pub fn weighted(terminals: LabelSet, weights: BTreeMap<String, u64>, budget: u64) -> Self {
        Constraint {
            terminals,
            groups: Vec::new(),
            pivot: None,
            weights,
            budget,
        }
    }

    /// The spanning form: one singleton group per terminal.
    pub fn spanning(terminals: &LabelSet) -> Self {
        Constraint {
            terminals: LabelSet::new(),
            groups: terminals.iter().map(|t| Group::singleton(t)).collect(),
            pivot: None,
            weights: BTreeMap::new(),
            budget: 0,
        }
    }

    /// Drops all prices: terminals become singleton groups, weights and budget vanish.
    pub fn as_spanning(&self) -> Self {
        let mut groups = self.groups.clone();
        for g in &mut groups {
            for o in &mut g.options {
                o.weight = 0;
            }
        }
        groups.extend(self.terminals.iter().map(|t| Group::singleton(t)));
        Constraint {
            terminals: LabelSet::new(),
            groups,
            pivot: self.pivot.clone(),
            weights: BTreeMap::new(),
            budget: 0,
        }
    }

    pub fn weight(&self, e: &str) -> u64 {
        self.weights.get(e).copied().unwrap_or(0)
    }

    /// Union of the group elements.
    pub fn group_elements(&self) -> LabelSet {
        self.groups.iter().flat_map(|g| g.elements.iter().cloned()).collect()
    }

    /// Weight of `c` outside terminals and groups plus the prices of its group
    /// intersections; `None` when some intersection is not an allowed option.
    pub fn omega(&self, c: &LabelSet) -> Option<u64> {
        let l = self.group_elements();
        let mut total: u64 = c
            .iter()
            .filter(|e| !self.terminals.contains(*e) && !l.contains(*e))
            .map(|e| self.weight(e))
            .sum();
        for g in &self.groups {
            let inter: LabelSet = c.intersection(&g.elements).cloned().collect();
            total += g.option_for(&inter)?.weight;
        }
        Some(total)
    }

    /// Whether the pivot condition holds for `c` in `m`.
    pub fn pivot_ok(&self, m: &BinaryMatroid, c: &LabelSet) -> bool {
        match &self.pivot {
            None => true,
            Some(p) => {
                let inter: LabelSet = c.intersection(&p.triangle).cloned().collect();
                inter.len() == 1 && inter.contains(&p.t) && m.is_circuit_labels(&sym_diff(c, &p.triangle))
            }
        }
    }

    /// The weight of `c` if it is a feasible circuit of `m` within budget.
    pub fn check(&self, m: &BinaryMatroid, c: &LabelSet) -> Option<u64> {
        if !self.terminals.is_subset(c) || !m.is_circuit_labels(c) || !self.pivot_ok(m, c) {
            return None;
        }
        self.omega(c).filter(|&w| w <= self.budget)
    }

    /// Structural checks shared by both problems.
    pub fn validate(&self, m: &BinaryMatroid) -> Result<(), SolveError> {
        let bad = |s: String| Err(SolveError::Inconsistent(s));
        let ground = m.ground_labels();
        for t in &self.terminals {
            if !ground.contains(t) {
                return bad(format!("unknown terminal `{t}`"));
            }
        }
        let mut seen = self.terminals.clone();
        for g in &self.groups {
            if g.elements.is_empty() || g.elements.len() > 3 {
                return bad(format!("group {:?} must have 1 to 3 elements", g.elements));
            }
            if !g.elements.is_subset(&ground) {
                return bad(format!("group {:?} has unknown elements", g.elements));
            }
            if g.elements.iter().any(|e| seen.contains(e)) {
                return bad(format!("group {:?} overlaps terminals or another group", g.elements));
            }
            seen.extend(g.elements.iter().cloned());
            if g.options.is_empty() {
                return bad(format!("group {:?} has no options", g.elements));
            }
            for o in &g.options {
                if o.chosen.is_empty() || o.chosen.len() > 2 || !o.chosen.is_subset(&g.elements) {
                    return bad(format!(
                        "option {:?} of group {:?} is not a 1- or 2-subset",
                        o.chosen, g.elements
                    ));
                }
            }
        }
        if let Some(p) = &self.pivot {
            if p.triangle.len() != 3 || !m.is_circuit_labels(&p.triangle) {
                return bad(format!("pivot {:?} is not a 3-element circuit", p.triangle));
            }
            if !p.triangle.contains(&p.t) {
                return bad(format!("pivot element `{}` is not in its triangle", p.t));
            }
            if p.triangle.iter().any(|e| seen.contains(e)) {
                return bad("pivot triangle meets terminals or groups".into());
            }
        }
        Ok(())
    }

    /// As [`validate`](Self::validate), and additionally every group is a triangle of `m`.
    pub fn validate_weighted(&self, m: &BinaryMatroid) -> Result<(), SolveError> {
        self.validate(m)?;
        for g in &self.groups {
            if g.elements.len() != 3 || !m.is_circuit_labels(&g.elements) {
                return Err(SolveError::Inconsistent(format!(
                    "group {:?} is not a 3-element circuit",
                    g.elements
                )));
            }
        }
        Ok(())
    }
}
