//! Property tests over seeded random instances.

use std::collections::VecDeque;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use telephone_broadcast::gen::{planted_33_cnf, planted_n3dm, random_cnf, random_connected, random_tree};
use telephone_broadcast::graph::{Graph, Instance, VertexId};
use telephone_broadcast::io::{parse_instance, parse_protocol, render_instance, render_protocol};
use telephone_broadcast::protocol::{simulate, verify, Protocol};
use telephone_broadcast::reduction_matching::{
    brute_force_n3dm, build_matching_gadget, partition_from_protocol, protocol_from_partition,
    to_almost,
};
use telephone_broadcast::reduction_sat::{
    assignment_from_protocol, build_sat_gadget, protocol_from_assignment,
};
use telephone_broadcast::sat::{
    eliminate_pure_literals, normalize, to_33sat, validate_33, CnfFormula,
};
use telephone_broadcast::solvers::{
    exact_search, exact_search_within, lower_bound, tree_broadcast_time, DEFAULT_BUDGET,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn instance(seed: u64, n: usize, density: f64) -> Instance {
    let mut r = rng(seed);
    let g = random_connected(&mut r, n, density);
    let s = r.gen_range(1..=n);
    Instance::new(g, s, 0).unwrap()
}

/// Arbitrary BFS spanning tree with shuffled child orders.
fn random_protocol(inst: &Instance, seed: u64) -> Protocol {
    let mut r = rng(seed);
    let g = inst.graph();
    let mut seen = vec![false; g.order() + 1];
    let mut lists = Vec::new();
    let mut queue = VecDeque::from([inst.source()]);
    seen[inst.source()] = true;
    while let Some(u) = queue.pop_front() {
        let mut kids: Vec<VertexId> = g.neighbors(u).iter().copied().filter(|&w| !seen[w]).collect();
        kids.shuffle(&mut r);
        for &w in &kids {
            seen[w] = true;
            queue.push_back(w);
        }
        lists.push((u, kids));
    }
    Protocol::from_children(g.order(), inst.source(), lists).unwrap()
}

fn components(g: &Graph) -> usize {
    let mut seen = vec![false; g.order() + 1];
    let mut count = 0;
    for s in 1..=g.order() {
        if seen[s] {
            continue;
        }
        count += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for &w in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    count
}

fn satisfiable(f: &CnfFormula) -> bool {
    let n = f.variable_count();
    (0u64..1 << n).any(|mask| {
        f.clauses()
            .iter()
            .all(|c| c.iter().any(|l| (mask >> (l.var() - 1) & 1 == 1) == l.is_positive()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjacent_vertices_differ_in_distance_by_at_most_one(seed: u64, n in 1usize..30, p in 0.0f64..0.5) {
        let inst = instance(seed, n, p);
        let d = inst.graph().bfs_distances(inst.source()).unwrap();
        for &(u, v) in inst.graph().edges() {
            let (a, b) = (d[u].unwrap(), d[v].unwrap());
            prop_assert!(a.abs_diff(b) <= 1);
        }
    }

    #[test]
    fn forest_iff_edge_count_matches_components(seed: u64, n in 1usize..20, extra in 0usize..4) {
        let mut r = rng(seed);
        let mut g = Graph::new(n);
        // a random forest, then a few random extra edges
        for v in 2..=n {
            if r.gen_bool(0.7) {
                let u = r.gen_range(1..v);
                g.add_edge(u, v).unwrap();
            }
        }
        for _ in 0..extra {
            let (u, v) = (r.gen_range(1..=n), r.gen_range(1..=n));
            if u != v && !g.has_edge(u, v) {
                g.add_edge(u, v).unwrap();
            }
        }
        let forest = g.size() + components(&g) == n;
        prop_assert_eq!(g.classify_after_deletion(&[]).is_forest, forest);
    }

    #[test]
    fn instance_and_protocol_text_round_trip(seed: u64, n in 1usize..25, t in 0usize..10) {
        let inst = instance(seed, n, 0.3).with_deadline(t);
        let back = parse_instance(&render_instance(&inst)).unwrap();
        prop_assert_eq!(back.graph(), inst.graph());
        prop_assert_eq!(back.source(), inst.source());
        prop_assert_eq!(back.deadline(), t);
        let proto = random_protocol(&inst, seed ^ 1);
        let again = parse_protocol(&render_protocol(&proto), n, inst.source()).unwrap();
        prop_assert_eq!(again, proto);
    }

    #[test]
    fn siblings_receive_in_distinct_rounds(seed: u64, n in 1usize..25, p in 0.0f64..0.5) {
        let inst = instance(seed, n, p);
        let proto = random_protocol(&inst, seed);
        let tl = simulate(&inst, &proto).unwrap();
        for (parent, kids) in proto.child_lists() {
            for (k, &c) in kids.iter().enumerate() {
                prop_assert_eq!(tl.receive_round(c), tl.receive_round(parent) + k + 1);
            }
        }
        prop_assert!(tl.completion() >= lower_bound(&inst));
        prop_assert!(verify(&inst.with_deadline(tl.completion()), &proto).is_valid());
        if tl.completion() > 0 {
            prop_assert!(!verify(&inst.with_deadline(tl.completion() - 1), &proto).is_valid());
        }
    }

    #[test]
    fn exact_time_is_tight(seed: u64, n in 1usize..10, p in 0.0f64..0.6) {
        let inst = instance(seed, n, p);
        let r = exact_search(&inst, DEFAULT_BUDGET).unwrap();
        let b = r.broadcast_time;
        prop_assert!(lower_bound(&inst) <= b);
        prop_assert!(verify(&inst.with_deadline(b), &r.witness).is_valid());
        if b > 0 {
            prop_assert!(exact_search_within(&inst, DEFAULT_BUDGET, b - 1).unwrap().is_none());
        }
    }

    #[test]
    fn tree_solver_matches_exact(seed: u64, n in 1usize..=12) {
        let mut r = rng(seed);
        let g = random_tree(&mut r, n);
        let inst = Instance::new(g, r.gen_range(1..=n), 0).unwrap();
        let tree = tree_broadcast_time(&inst).unwrap();
        prop_assert_eq!(tree.broadcast_time, exact_search(&inst, DEFAULT_BUDGET).unwrap().broadcast_time);
    }

    #[test]
    fn pure_literal_elimination_preserves_satisfiability(seed: u64, n in 1usize..8, m in 0usize..12) {
        let f = random_cnf(&mut rng(seed), n, m);
        let (reduced, forced) = eliminate_pure_literals(&f);
        prop_assert_eq!(satisfiable(&f), satisfiable(&reduced));
        // forced variables no longer occur
        for c in reduced.clauses() {
            for l in c {
                prop_assert!(forced[l.var()].is_none());
            }
        }
    }

    #[test]
    fn conversion_is_equisatisfiable(seed: u64, n in 1usize..5, m in 0usize..7) {
        let f = random_cnf(&mut rng(seed), n, m);
        let (g, _) = to_33sat(&f).unwrap();
        prop_assert_eq!(satisfiable(&f), satisfiable(&g));
        let norm = normalize(&f).unwrap();
        prop_assert!(validate_33(&norm.formula).is_empty());
    }

    #[test]
    fn sat_gadget_round_trip_and_size(seed: u64, n in 1usize..14, m in 0usize..20) {
        let (f, model) = planted_33_cnf(&mut rng(seed), n, m);
        let g = build_sat_gadget(&f).unwrap();
        let t = g.deadline();
        // fewer than 4n positions, each with at most 3t + 1 vertices
        prop_assert!(g.instance.order() <= 1 + 4 * n * (3 * t + 1) + 2 * f.clauses().len());
        prop_assert!(t <= 2 * (usize::BITS - n.leading_zeros()) as usize + 8);
        let p = protocol_from_assignment(&g, &model).unwrap();
        prop_assert!(verify(&g.instance, &p).is_valid());
        prop_assert_eq!(assignment_from_protocol(&g, &p).unwrap(), model);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn matching_gadget_round_trip_and_size(seed: u64) {
        let mut r = rng(seed);
        let (inst, _) = planted_n3dm(&mut r, 3, 5);
        let almost = to_almost(&inst).unwrap();
        let part = brute_force_n3dm(&almost).unwrap().expect("planted");
        let g = build_matching_gadget(&almost).unwrap();
        let (m, t) = (3, almost.target());
        // one path per triple slot plus the hub paths
        prop_assert!(g.instance.order() <= 3 + m * (t + 1) + t * t);
        let p = protocol_from_partition(&g, &part).unwrap();
        prop_assert!(verify(&g.instance, &p).is_valid());
        prop_assert_eq!(partition_from_protocol(&g, &p).unwrap(), part);
    }
}
