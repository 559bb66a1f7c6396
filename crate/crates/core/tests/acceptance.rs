//! Acceptance criteria, one test each. Every test prints a single PASS/FAIL line
//! directly to stdout so the verdicts show up even when output is captured.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spancirc::ctse::{solve_ctse, CtseInstance, CtseMode};
use spancirc::decomp::{sum1_circuits, sum2_circuits, sum3_circuits};
use spancirc::emwc::{
    cut_distance, good_separation, interaction_weight, solve_emwc, EmwcInstance, EmwcOptions, ParamPair,
};
use spancirc::matroid::sym_diff;
use spancirc::solvers::{
    esc_r10, ewmsc_r10, leaf_step, r10_spanning_size, Group, GroupOption, Problem, Step, R10_SPANNING_CAP,
};
use spancirc::toolkit::{
    gen_clique_reduction, gen_random_graph, gen_random_tree, gen_regular_graph, oracle_circuits, oracle_constraint,
    oracle_ctse, oracle_emwc,
};
use spancirc::{
    compose, r10, solve_sc, solve_wmsc, BasicNode, BinaryMatroid, ConflictTree, Constraint, Gf2Matrix, LabelSet,
    MultiGraph, NodeKind, R10Edit, SolverOptions, TreeInstance, VertexCut,
};

fn report(name: &str, limit: Duration, run: impl FnOnce() -> Result<String, String>) {
    let start = Instant::now();
    let res = run();
    let took = start.elapsed();
    let (ok, detail) = match res {
        Ok(d) if took <= limit => (true, d),
        Ok(d) => (false, format!("{d}; took {took:.2?}, limit {limit:?}")),
        Err(e) => (false, e),
    };
    let line = format!("{} {name}: {detail} [{took:.2?}]\n", if ok { "PASS" } else { "FAIL" });
    std::io::stdout().lock().write_all(line.as_bytes()).unwrap();
    assert!(ok, "{line}");
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn random_matroid(rng: &mut ChaCha8Rng) -> BinaryMatroid {
    if rng.gen_bool(0.4) {
        let n = rng.gen_range(2..=7);
        let extra = rng.gen_range(0..=5);
        return gen_random_graph(rng.gen(), n, extra, 3).cycle_matroid();
    }
    let rows = rng.gen_range(1..=6);
    let cols = rng.gen_range(1..=12);
    let data: Vec<Vec<u8>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(0..2)).collect())
        .collect();
    BinaryMatroid::with_default_labels(Gf2Matrix::from_rows(&data), "m")
}

#[test]
fn criterion_1_circuit_axioms() {
    report("criterion 1 (circuit axioms)", Duration::from_secs(60), || {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for round in 0..120 {
            let m = random_matroid(&mut rng);
            let cs: Vec<LabelSet> = m
                .enumerate_circuit_labels()
                .map_err(|e| e.to_string())?
                .into_iter()
                .collect();
            let set: BTreeSet<&LabelSet> = cs.iter().collect();
            ensure!(cs.iter().all(|c| !c.is_empty()), "round {round}: empty circuit");
            for a in &cs {
                for b in &cs {
                    if a == b {
                        continue;
                    }
                    ensure!(!a.is_subset(b), "round {round}: {a:?} inside {b:?}");
                    ensure!(
                        m.is_cycle_labels(&sym_diff(a, b)),
                        "round {round}: difference is not a cycle"
                    );
                    for e in a.intersection(b) {
                        let mut u: LabelSet = a.union(b).cloned().collect();
                        u.remove(e);
                        let s = m.set_of(u.iter()).map_err(|e| e.to_string())?;
                        ensure!(
                            !m.is_independent(&s).unwrap(),
                            "round {round}: elimination fails on {e}"
                        );
                    }
                }
            }
            for pair in cs.iter().filter(|c| c.len() == 2) {
                let v: Vec<&String> = pair.iter().collect();
                for (e1, e2) in [(v[0], v[1]), (v[1], v[0])] {
                    for c in cs.iter().filter(|c| c.contains(e1) && !c.contains(e2)) {
                        let mut c2 = c.clone();
                        c2.remove(e1);
                        c2.insert(e2.clone());
                        ensure!(set.contains(&c2), "round {round}: parallel exchange fails");
                    }
                }
            }
        }
        Ok("120 matroids".into())
    });
}

#[test]
fn criterion_2_graphic_cographic_correspondence() {
    report("criterion 2 (graph correspondence)", Duration::from_secs(120), || {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for round in 0..120 {
            let n = rng.gen_range(1..=10);
            let extra = rng.gen_range(0..=6);
            let mut g = gen_random_graph(rng.gen(), n, extra, 3);
            if rng.gen_bool(0.2) {
                let v = rng.gen_range(0..g.vertex_count());
                g.add_edge("loop", v, v, 1).unwrap();
            }
            let cyc: BTreeSet<LabelSet> = g.simple_cycles().into_iter().collect();
            ensure!(
                cyc == g.cycle_matroid().enumerate_circuit_labels().unwrap(),
                "round {round}: cycle matroid"
            );
            let mut bonds: BTreeSet<LabelSet> = g.enumerate_minimal_cutsets().unwrap().into_iter().collect();
            // Bonds are the nonempty minimal cut-sets.
            let got = g.bond_matroid().enumerate_circuit_labels().unwrap();
            bonds.retain(|b| !b.is_empty());
            ensure!(bonds == got, "round {round}: bond matroid {bonds:?} vs {got:?}");
        }
        Ok("120 graphs".into())
    });
}

#[test]
fn criterion_3_sum_characterization() {
    report("criterion 3 (sum circuits)", Duration::from_secs(300), || {
        let (mut twos, mut threes, mut ones) = (0, 0, 0);
        let mut seed = 0;
        while twos < 50 || threes < 50 {
            seed += 1;
            ensure!(seed < 20_000, "generator produced too few sums");
            let t = gen_random_tree(seed, 2, 20);
            if t.nodes.len() != 2 {
                continue;
            }
            let (m1, m2) = (t.nodes[0].matroid(), t.nodes[1].matroid());
            let shared = &t.edges[0].shared;
            let whole = compose(&t)
                .map_err(|e| e.to_string())?
                .enumerate_circuit_labels()
                .unwrap();
            let parts = match shared.len() {
                0 => {
                    ones += 1;
                    sum1_circuits(m1, m2)
                }
                1 => {
                    if twos >= 50 {
                        continue;
                    }
                    twos += 1;
                    sum2_circuits(m1, m2, shared.iter().next().unwrap())
                }
                _ => {
                    if threes >= 50 {
                        continue;
                    }
                    threes += 1;
                    sum3_circuits(m1, m2, shared)
                }
            }
            .map_err(|e| e.to_string())?;
            ensure!(parts == whole, "seed {seed}: {} summands disagree", shared.len());
        }
        Ok(format!("{twos} 2-sums, {threes} 3-sums, {ones} 1-sums"))
    });
}

fn side_of(g: &MultiGraph, cut: &LabelSet) -> VertexCut {
    let (ids, _) = g.component_ids_with(|i| !cut.contains(&g.edge(i).label));
    let a: Vec<usize> = (0..g.vertex_count()).filter(|&v| ids[v] == ids[0]).collect();
    VertexCut::from_side_a(g.vertex_count(), a)
}

#[test]
fn criterion_4_emwc_oracle() {
    report("criterion 4 (EMWC oracle)", Duration::from_secs(600), || {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut yes = 0;
        let mut pairs = 0;
        for round in 0..220 {
            let n = rng.gen_range(2..=10);
            let extra = rng.gen_range(0..=n);
            let g = gen_random_graph(rng.gen(), n, extra, 3);
            let k = rng.gen_range(0..=3);
            let labels: Vec<String> = g.edge_labels().into_iter().collect();
            let t: LabelSet = (0..rng.gen_range(1..=2))
                .map(|_| labels[rng.gen_range(0..labels.len())].clone())
                .collect();
            let pick = |rng: &mut ChaCha8Rng| -> Vec<usize> {
                if rng.gen_bool(0.5) {
                    Vec::new()
                } else {
                    vec![rng.gen_range(0..n)]
                }
            };
            let (r1, r2) = (pick(&mut rng), pick(&mut rng));
            let inst = EmwcInstance::new(g.clone(), t.clone(), r1, r2, k);
            let got = solve_emwc(&inst, &EmwcOptions::default()).map_err(|e| e.to_string())?;
            let want = oracle_emwc(&inst).unwrap();
            ensure!(
                got.is_some() == want.is_some(),
                "round {round}: verdict {got:?} vs {want:?}"
            );
            if let Some(c) = &got {
                ensure!(inst.verify(c), "round {round}: witness fails the feasibility check");
                yes += 1;
            }
            // Pairwise bounds over all feasible cuts.
            let feasible: Vec<LabelSet> = g
                .enumerate_minimal_cutsets()
                .unwrap()
                .into_iter()
                .filter(|c| inst.verify(c))
                .collect();
            let params = ParamPair::for_budget(k);
            let unbreakable = good_separation(&g, params.q, params.p).is_none();
            for a in feasible.iter().take(6) {
                for b in feasible.iter().take(6) {
                    let (ca, cb) = (side_of(&g, a), side_of(&g, b));
                    ensure!(
                        interaction_weight(&g, &ca, &cb) <= 2 * k,
                        "round {round}: interaction above 2k"
                    );
                    if unbreakable {
                        ensure!(
                            cut_distance(&ca, &cb) as u64 <= params.pq(),
                            "round {round}: distance above pq"
                        );
                    }
                    pairs += 1;
                }
            }
        }
        Ok(format!("220 instances, {yes} yes, {pairs} cut pairs"))
    });
}

#[test]
fn criterion_5_ctse_oracle() {
    report("criterion 5 (CTSE oracle)", Duration::from_secs(600), || {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut yes = 0;
        for round in 0..200 {
            let n = rng.gen_range(2..=10);
            let extra = rng.gen_range(0..=n);
            let g = gen_random_graph(rng.gen(), n, extra, 3);
            let k = rng.gen_range(0..=4);
            let labels: Vec<String> = g.edge_labels().into_iter().collect();
            let t: LabelSet = (0..rng.gen_range(0..=3))
                .map(|_| labels[rng.gen_range(0..labels.len())].clone())
                .collect();
            let inst = CtseInstance::new(g, t, k);
            let got = solve_ctse(&inst, CtseMode::Exhaustive);
            let want = oracle_ctse(&inst).unwrap();
            ensure!(
                got.as_ref().map(|c| inst.extra_weight(c)) == want.as_ref().map(|w| w.1),
                "round {round}: optimum {got:?} vs {want:?}"
            );
            if let Some(c) = &got {
                ensure!(inst.verify(c), "round {round}: witness fails");
                yes += 1;
            }
            for seed in 0..100 {
                let r = solve_ctse(&inst, CtseMode::Random { seed, rounds: None });
                ensure!(r.is_some() == got.is_some(), "round {round}: seed {seed} disagrees");
            }
        }
        Ok(format!("200 instances, {yes} yes, 100 seeds each"))
    });
}

fn rule_check(inst: &TreeInstance, problem: Problem, opts: &SolverOptions) -> Result<(), String> {
    let m = compose(&inst.tree).map_err(|e| e.to_string())?;
    let before = oracle_constraint(&m, &inst.cons).unwrap();
    let step = leaf_step(inst, problem, opts).map_err(|e| e.to_string())?;
    match step {
        Step::No => ensure!(before.is_none(), "rule said no, oracle found {before:?}"),
        Step::Reduced { next, lift } => {
            ensure!(next.cons.budget <= inst.cons.budget, "budget increased");
            next.tree.validate().map_err(|e| e.to_string())?;
            let m2 = compose(&next.tree).map_err(|e| e.to_string())?;
            let after = oracle_constraint(&m2, &next.cons).unwrap();
            ensure!(
                before.is_some() == after.is_some(),
                "verdict changed: {before:?} vs {after:?}"
            );
            if let Some((c, _)) = after {
                let lifted = lift.apply(&c).map_err(|e| e.to_string())?;
                ensure!(
                    inst.cons.check(&m, &lifted).is_some(),
                    "lifted witness {lifted:?} infeasible"
                );
            }
        }
    }
    Ok(())
}

#[test]
fn criterion_6_end_to_end() {
    report("criterion 6 (end-to-end trees)", Duration::from_secs(900), || {
        let opts = SolverOptions::default();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (mut trees, mut yes_w, mut yes_s, mut rules, mut multi) = (0, 0, 0, 0, 0);
        let mut seed = 0;
        while trees < 120 {
            seed += 1;
            let t = gen_random_tree(seed, 3, 20);
            let labels: Vec<String> = t.composed_labels().into_iter().collect();
            if labels.is_empty() {
                continue;
            }
            trees += 1;
            multi += usize::from(t.nodes.len() > 1);
            let m = compose(&t).map_err(|e| e.to_string())?;
            let circuits = oracle_circuits(&m).unwrap();
            let w = t.weights();
            let terms: LabelSet = (0..rng.gen_range(1..=3))
                .map(|_| labels[rng.gen_range(0..labels.len())].clone())
                .collect();
            let ell = rng.gen_range(0..=10);
            let want = circuits
                .iter()
                .filter(|c| terms.is_subset(c))
                .map(|c| c.iter().map(|e| w[e]).sum::<u64>())
                .filter(|&x| x <= ell)
                .min();
            let got = solve_wmsc(&t, &terms, ell, &opts).map_err(|e| format!("seed {seed}: {e}"))?;
            ensure!(
                got.weight == want,
                "seed {seed}: weighted {:?} vs oracle {want:?}",
                got.weight
            );
            yes_w += usize::from(want.is_some());
            let want_sc = circuits.iter().any(|c| terms.is_subset(c));
            let got_sc = solve_sc(&t, &terms, &opts).map_err(|e| format!("seed {seed}: {e}"))?;
            ensure!(
                got_sc.verdict() == want_sc,
                "seed {seed}: spanning {} vs oracle {want_sc}",
                got_sc.verdict()
            );
            if let Some(c) = &got_sc.witness {
                ensure!(
                    m.is_circuit_labels(c) && terms.is_subset(c),
                    "seed {seed}: spanning witness"
                );
            }
            yes_s += usize::from(want_sc);

            if t.nodes.len() > 1 {
                let mut tree = t.clone();
                tree.root = tree.node_of(terms.iter().next().unwrap()).unwrap();
                let weighted = TreeInstance {
                    tree: tree.clone(),
                    cons: Constraint::weighted(terms.clone(), w.clone(), rng.gen_range(0..=8)),
                };
                rule_check(&weighted, Problem::Weighted, &opts)
                    .map_err(|e| format!("seed {seed} weighted rule: {e}"))?;
                let spanning = TreeInstance {
                    tree,
                    cons: Constraint::spanning(&terms),
                };
                rule_check(&spanning, Problem::Spanning, &opts)
                    .map_err(|e| format!("seed {seed} spanning rule: {e}"))?;
                rules += 2;
            }
        }
        Ok(format!(
            "{trees} trees ({multi} with several nodes), {yes_w}/{yes_s} yes, {rules} rule checks"
        ))
    });
}

#[test]
fn criterion_7_r10_facts() {
    report("criterion 7 (R10 facts)", Duration::from_secs(1), || {
        let m = r10();
        ensure!(m.rank() == 5, "rank {}", m.rank());
        let cs = m.enumerate_circuit_labels().unwrap();
        ensure!(cs.iter().all(|c| c.len() % 2 == 0), "odd circuit");
        let node = BasicNode::new(NodeKind::R10Derived(R10Edit::plain())).unwrap();
        let labels: Vec<String> = m.labels().to_vec();
        let mut cons = Constraint::weighted(LabelSet::new(), BTreeMap::new(), 100);
        cons.groups.push(Group {
            elements: labels[..3].iter().cloned().collect(),
            options: vec![GroupOption {
                chosen: labels[..1].iter().cloned().collect(),
                weight: 1,
            }],
        });
        ensure!(!ewmsc_r10(&node, &cons).unwrap().verdict(), "group instance accepted");
        // Heavy parallel classes collapse to at most 40 elements.
        let mut edit = R10Edit::plain();
        for (i, base) in edit.base_labels.clone().iter().enumerate() {
            for j in 0..5 {
                edit.parallels.push((format!("p{i}_{j}"), base.clone()));
            }
        }
        let big = BasicNode::new(NodeKind::R10Derived(edit)).unwrap();
        ensure!(big.matroid().len() == 60, "expected 60 elements");
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let all: Vec<String> = big.labels().into_iter().collect();
        for _ in 0..20 {
            let terms: LabelSet = (0..rng.gen_range(0..=10))
                .map(|_| all[rng.gen_range(0..all.len())].clone())
                .collect();
            let c = Constraint::spanning(&terms);
            let size = r10_spanning_size(&big, &c);
            ensure!(size <= R10_SPANNING_CAP, "post-dedup size {size}");
            esc_r10(&big, &c).map_err(|e| e.to_string())?;
        }
        Ok(format!("{} circuits, all even", cs.len()))
    });
}

#[test]
fn criterion_8_clique_reduction() {
    report("criterion 8 (clique reduction)", Duration::from_secs(1), || {
        let k4 = gen_regular_graph(4, &[1, 2]).unwrap();
        let part = vec![
            vec!["g0".to_string(), "g1".to_string()],
            vec!["g2".to_string(), "g3".to_string()],
        ];
        let r = gen_clique_reduction(&k4, 2, &part).map_err(|e| e.to_string())?;
        ensure!(
            r.ell == 16 && r.terminals.len() == 2 && r.graph.vertex_count() == 42,
            "K4 numbers"
        );
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut done = 0;
        while done < 10 {
            let n = rng.gen_range(6..=9);
            let offsets: Vec<usize> = (1..=n / 2).filter(|_| rng.gen_bool(0.6)).collect();
            let Ok(g) = gen_regular_graph(n, &offsets) else {
                continue;
            };
            let d = 2 * g.edge_count() / n;
            if d < 2 || d >= n - 1 {
                continue;
            }
            let k = rng.gen_range(1..d);
            let mut classes = vec![Vec::new(); k];
            for v in 0..n {
                let c = if v < k { v } else { rng.gen_range(0..k) };
                classes[c].push(format!("g{v}"));
            }
            let r = gen_clique_reduction(&g, k, &classes).map_err(|e| e.to_string())?;
            let h = &r.graph;
            let p = 2 * n * n;
            let edges = g.edge_count() + n + n * (n - 1) / 2 + n * n + p * (p - 1) / 2 + p * n + k;
            ensure!(h.vertex_count() == r.expected_vertices(), "vertex count");
            ensure!(h.edge_count() == edges, "edge count {} vs {edges}", h.edge_count());
            ensure!(h.is_connected(), "H disconnected");
            ensure!(r.ell == (n + (n + d - k + 1) * k) as u64, "budget");
            ensure!(r.terminals.len() == k, "terminal count");
            let y1 = h.vertex_index("y1").unwrap();
            for t in &r.terminals {
                let e = h.edge_by_label(t).unwrap();
                ensure!(e.u == y1 || e.v == y1, "terminal {t} misses y1");
            }
            done += 1;
        }
        Ok("K4: ell=16, |T|=2, |V(H)|=42; 10 random regular inputs".into())
    });
}

/// Cycle graph with `n` vertices, as a one-node tree.
fn cycle_tree(n: usize) -> ConflictTree {
    let mut g = MultiGraph::new();
    for i in 0..n {
        g.add_vertex(&format!("v{i}")).unwrap();
    }
    for i in 0..n {
        g.add_edge(&format!("c{i}"), i, (i + 1) % n, 1).unwrap();
        g.add_edge(&format!("d{i}"), i, (i + 2) % n, 2).unwrap();
    }
    ConflictTree::single(BasicNode::graphic(g))
}

fn time_wmsc(t: &ConflictTree, terms: &LabelSet, ell: u64) -> Duration {
    let opts = SolverOptions::default();
    let start = Instant::now();
    for _ in 0..3 {
        solve_wmsc(t, terms, ell, &opts).unwrap();
    }
    start.elapsed()
}

#[test]
fn runtime_smoke() {
    report("runtime smoke", Duration::from_secs(120), || {
        let terms: LabelSet = ["c0".to_string()].into();
        let small = time_wmsc(&cycle_tree(8), &terms, 6);
        let large = time_wmsc(&cycle_tree(32), &terms, 6);
        let low_k = time_wmsc(&cycle_tree(16), &terms, 3);
        let high_k = time_wmsc(&cycle_tree(16), &terms, 12);
        // Fourfold growth in n may cost a polynomial factor, not an exponential one.
        ensure!(
            large <= small * 4096 + Duration::from_millis(50),
            "n-growth {small:?} -> {large:?}"
        );
        ensure!(
            high_k * 2 >= low_k,
            "larger budget ran much faster: {low_k:?} vs {high_k:?}"
        );
        Ok(format!(
            "n 8->32: {small:.1?} -> {large:.1?}; k 3->12: {low_k:.1?} -> {high_k:.1?}"
        ))
    });
}
