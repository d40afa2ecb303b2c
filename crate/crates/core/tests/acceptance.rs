//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines show up in plain `cargo test` output.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use telephone_broadcast::gen::{planted_33_cnf, planted_n3dm, random_connected, random_n3dm, random_tree};
use telephone_broadcast::graph::{Graph, Instance, VertexId};
use telephone_broadcast::protocol::{check_propelling_bound, simulate, verify};
use telephone_broadcast::reduction_matching::{
    brute_force_n3dm, build_matching_gadget, partition_from_protocol, protocol_from_partition,
    to_almost, Partition, TripleSystem,
};
use telephone_broadcast::reduction_sat::{
    assignment_from_protocol, build_sat_gadget, protocol_from_assignment, validate_sat_gadget,
    Buckets,
};
use telephone_broadcast::sat::{normalize, to_33sat, validate_33, Assignment, CnfFormula, Literal};
use telephone_broadcast::solvers::{
    decide, exact_search, permutation_oracle, tree_broadcast_time, Answer, Method, DEFAULT_BUDGET,
};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// All labelled graphs on `n` vertices, by edge subset.
fn all_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(usize, usize)> = (1..=n)
        .flat_map(|u| (u + 1..=n).map(move |v| (u, v)))
        .collect();
    (0u32..1 << pairs.len()).map(move |mask| {
        let mut g = Graph::new(n);
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                g.add_edge(u, v).unwrap();
            }
        }
        g
    })
}

/// Graphs for criteria 1 and 4: exhaustive for n <= 5 with every source,
/// then 200 seeded random graphs with 6 <= n <= 8.
fn criterion_one_instances() -> Vec<Instance> {
    let mut out = Vec::new();
    for n in 1..=5 {
        for g in all_graphs(n).filter(Graph::is_connected) {
            for s in 1..=n {
                out.push(Instance::new(g.clone(), s, 0).unwrap());
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xB0AD);
    for _ in 0..200 {
        let n = rng.gen_range(6..=8);
        let p = rng.gen_range(0.1..0.6);
        let g = random_connected(&mut rng, n, p);
        let s = rng.gen_range(1..=n);
        out.push(Instance::new(g, s, 0).unwrap());
    }
    out
}

fn oracle_equivalence(instances: &[Instance]) -> Outcome {
    for inst in instances {
        let exact = exact_search(inst, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        let oracle = permutation_oracle(inst).map_err(|e| e.to_string())?;
        check(exact.broadcast_time == oracle, || {
            format!(
                "n={} s={} edges={:?}: exact {} vs oracle {}",
                inst.order(),
                inst.source(),
                inst.graph().edges(),
                exact.broadcast_time,
                oracle
            )
        })?;
    }
    Ok(format!("{} instances agree", instances.len()))
}

fn tree_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7EE);
    for k in 0..100 {
        let n = rng.gen_range(1..=12);
        let g = random_tree(&mut rng, n);
        let s = rng.gen_range(1..=n);
        let inst = Instance::new(g, s, 0).unwrap();
        let tree = tree_broadcast_time(&inst).map_err(|e| e.to_string())?;
        let exact = exact_search(&inst, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        check(tree.broadcast_time == exact.broadcast_time, || {
            format!("tree {k}: tree {} vs exact {}", tree.broadcast_time, exact.broadcast_time)
        })?;
        let at_b = inst.with_deadline(tree.broadcast_time);
        check(verify(&at_b, &tree.witness).is_valid(), || {
            format!("tree {k}: witness does not verify")
        })?;
    }
    Ok("100 trees agree, all witnesses verify".into())
}

fn kernel_screen() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x2E7);
    for k in 0..50 {
        let n: usize = rng.gen_range(2..=40);
        // largest t with 2^t < n
        let t_max = (usize::BITS - 1 - (n - 1).leading_zeros()) as usize;
        let t = rng.gen_range(0..=t_max);
        assert!(n > 1 << t);
        let g = random_connected(&mut rng, n, 0.2);
        let d = decide(&Instance::new(g, 1, t).unwrap(), DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        check(
            d.answer == Answer::No && d.method == Method::Kernel && d.stats.states_expanded == 0,
            || format!("instance {k} (n={n}, t={t}): {:?} via {}", d.answer, d.method),
        )?;
    }
    Ok("50 instances rejected with zero states expanded".into())
}

/// Tree-path downtime recomputed from parent pointers and receive rounds,
/// compared with `t - dist(s, x)` from a local BFS.
fn downtime_bound(instances: &[Instance]) -> Outcome {
    let mut checked = 0usize;
    for inst in instances {
        let r = exact_search(inst, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        let inst = inst.with_deadline(r.broadcast_time);
        let tl = simulate(&inst, &r.witness).map_err(|e| e.to_string())?;
        let dist = local_bfs(inst.graph(), inst.source());
        for (x, &dx) in dist.iter().enumerate().skip(1) {
            let mut hops = 0;
            let mut v = x;
            while let Some(p) = r.witness.parent(v) {
                hops += 1;
                v = p;
            }
            let downtime = tl.receive_round(x) - hops;
            let bound = inst.deadline() - dx;
            check(downtime <= bound, || {
                format!("vertex {x}: downtime {downtime} > {bound}")
            })?;
            let lib = check_propelling_bound(&inst, &r.witness, x).map_err(|e| e.to_string())?;
            check(lib, || format!("library bound check disagrees at vertex {x}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (witness, vertex) pairs, zero violations"))
}

fn local_bfs(g: &Graph, s: VertexId) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.order() + 1];
    dist[s] = 0;
    let mut queue = std::collections::VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

fn evaluates_true(clauses: &[Vec<Literal>], values: &[bool]) -> bool {
    clauses
        .iter()
        .all(|c| c.iter().any(|l| values[l.var() - 1] == l.is_positive()))
}

fn sat_forward_backward() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5A7);
    let mut pairs = 0;
    for k in 0..50 {
        let n = rng.gen_range(1..=8);
        let m = rng.gen_range(1..=2 * n);
        let (f, model) = planted_33_cnf(&mut rng, n, m);
        let g = build_sat_gadget(&f).map_err(|e| format!("formula {k}: {e}"))?;
        let levels = g.buckets.levels();
        check(g.deadline() == 2 * levels + 6, || format!("formula {k}: deadline"))?;
        let p = protocol_from_assignment(&g, &model).map_err(|e| format!("formula {k}: {e}"))?;
        let verdict = verify(&g.instance, &p);
        check(verdict.is_valid(), || format!("formula {k}: {verdict}"))?;
        let tl = simulate(&g.instance, &p).unwrap();
        for pos in 1..=g.buckets.positions() {
            let (level, _) = Buckets::slot(pos);
            let b = g.block(pos);
            let mut rounds = [tl.receive_round(b.sides[0].x), tl.receive_round(b.sides[1].x)];
            rounds.sort_unstable();
            check(rounds == [2 * level - 1, 2 * level], || {
                format!("formula {k}, position {pos}: rounds {rounds:?}")
            })?;
            pairs += 1;
        }
        let back = assignment_from_protocol(&g, &p).map_err(|e| format!("formula {k}: {e}"))?;
        check(back == model, || format!("formula {k}: round trip changed the assignment"))?;
        check(evaluates_true(f.clauses(), back.values()), || {
            format!("formula {k}: extracted assignment does not satisfy the formula")
        })?;
    }
    Ok(format!("50 formulas, {pairs} literal pairs on schedule"))
}

fn sat_structure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5A7);
    let mut count = 0;
    for k in 0..60 {
        let n = rng.gen_range(1..=12);
        let m = rng.gen_range(0..=2 * n);
        let (f, _) = planted_33_cnf(&mut rng, n, m);
        let g = build_sat_gadget(&f).map_err(|e| format!("formula {k}: {e}"))?;
        let t = g.deadline();
        let report = validate_sat_gadget(&g);
        check(report.is_ok(), || {
            format!("formula {k}: {}", report.violations[0])
        })?;
        // Independent distance audit of the delta vertices.
        let dist = local_bfs(g.instance.graph(), g.source());
        for b in &g.blocks {
            check(dist[b.delta] == t - (b.level - 1), || {
                format!("formula {k}: delta[{},{}] at {}", b.level, b.index, dist[b.delta])
            })?;
            check(b.sides[0].alpha_beta.len() - 1 == t - 2 * b.level - 5, || {
                format!("formula {k}: alpha-beta length")
            })?;
            check(b.gamma_delta.len() - 1 == t - 2 * b.level - 2, || {
                format!("formula {k}: gamma-delta length")
            })?;
        }
        count += 1;
    }
    Ok(format!("{count} gadgets audited, zero violations"))
}

fn sums_ok<S: TripleSystem>(inst: &S, p: &Partition, exact: Option<usize>, floor: usize) -> bool {
    let (w, x, y) = inst.sizes();
    p.triples().iter().all(|t| {
        let s = w[t.w] + x[t.x] + y[t.y];
        match exact {
            Some(target) => s == target,
            None => s >= floor,
        }
    })
}

fn conversion_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3D);
    let (mut yes, mut no) = (0, 0);
    for k in 0..100 {
        let m = rng.gen_range(3..=5);
        let inst = if k % 2 == 0 {
            planted_n3dm(&mut rng, m, 20).0
        } else {
            random_n3dm(&mut rng, m, 20)
        };
        let almost = to_almost(&inst).map_err(|e| format!("instance {k}: {e}"))?;
        let a = brute_force_n3dm(&inst).map_err(|e| e.to_string())?;
        let b = brute_force_n3dm(&almost).map_err(|e| e.to_string())?;
        check(a.is_some() == b.is_some(), || {
            format!("instance {k}: original {:?} vs converted {:?}", a.is_some(), b.is_some())
        })?;
        if let (Some(a), Some(b)) = (&a, &b) {
            check(sums_ok(&inst, a, Some(inst.target()), 0), || format!("instance {k}: bad exact partition"))?;
            check(sums_ok(&almost, b, None, almost.target() - almost.lambda()), || {
                format!("instance {k}: bad relaxed partition")
            })?;
            yes += 1;
        } else {
            no += 1;
        }
    }
    Ok(format!("100 instances agree ({yes} feasible, {no} infeasible)"))
}

/// Union-find forest test and degree test on `g - deleted`.
fn residual_shape(g: &Graph, deleted: &[VertexId]) -> (bool, bool) {
    let n = g.order();
    let gone = |v: VertexId| deleted.contains(&v);
    let mut parent: Vec<usize> = (0..=n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut acyclic = true;
    for &(u, v) in g.edges() {
        if gone(u) || gone(v) {
            continue;
        }
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a == b {
            acyclic = false;
        } else {
            parent[a] = b;
        }
    }
    let low_degree = (1..=n)
        .filter(|&v| !gone(v))
        .all(|v| g.neighbors(v).iter().filter(|&&w| !gone(w)).count() <= 2);
    (acyclic, acyclic && low_degree)
}

fn matching_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4D);
    let mut max_order = 0;
    for k in 0..50 {
        let m = rng.gen_range(3..=4);
        let (inst, _) = planted_n3dm(&mut rng, m, 6);
        let almost = to_almost(&inst).map_err(|e| format!("instance {k}: {e}"))?;
        let part = brute_force_n3dm(&almost)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("instance {k}: planted instance became infeasible"))?;
        let g = build_matching_gadget(&almost).map_err(|e| format!("instance {k}: {e}"))?;
        max_order = max_order.max(g.instance.order());
        check(g.deadline() == almost.target(), || format!("instance {k}: t != T"))?;
        let p = protocol_from_partition(&g, &part).map_err(|e| format!("instance {k}: {e}"))?;
        let verdict = verify(&g.instance, &p);
        check(verdict.is_valid(), || format!("instance {k}: {verdict}"))?;
        let back = partition_from_protocol(&g, &p).map_err(|e| format!("instance {k}: {e}"))?;
        check(back == part, || format!("instance {k}: round trip changed the partition"))?;

        let graph = g.instance.graph();
        let one = graph.classify_after_deletion(&[g.s_x]);
        let two = graph.classify_after_deletion(&[g.s_x, g.s_y]);
        let (forest, _) = residual_shape(graph, &[g.s_x]);
        let (_, paths) = residual_shape(graph, &[g.s_x, g.s_y]);
        check(one.is_forest && forest, || format!("instance {k}: G - s_x has a cycle"))?;
        check(two.is_disjoint_paths && paths, || {
            format!("instance {k}: G - {{s_x, s_y}} is not a union of paths")
        })?;
    }
    Ok(format!("50 gadgets (up to {max_order} vertices) verify and round-trip"))
}

/// Every clause over `n` variables with 1 to 3 distinct variables.
fn all_clauses(n: usize) -> Vec<Vec<Literal>> {
    let mut out = Vec::new();
    for mask in 1u32..1 << n {
        let vars: Vec<usize> = (0..n).filter(|v| mask >> v & 1 == 1).map(|v| v + 1).collect();
        if vars.len() > 3 {
            continue;
        }
        for signs in 0u32..1 << vars.len() {
            out.push(
                vars.iter()
                    .enumerate()
                    .map(|(i, &v)| Literal::new(v, signs >> i & 1 == 0))
                    .collect(),
            );
        }
    }
    out
}

fn satisfiable(f: &CnfFormula) -> bool {
    let n = f.variable_count();
    (0u64..1 << n).any(|mask| {
        let values: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
        evaluates_true(f.clauses(), &values)
    })
}

fn conversion_equisatisfiable() -> Outcome {
    let mut count = 0;
    for n in 1..=3 {
        let clauses = all_clauses(n);
        let k = clauses.len();
        for m in 0..=3u32 {
            for code in 0..k.pow(m) {
                let mut c = code;
                let chosen: Vec<Vec<Literal>> = (0..m)
                    .map(|_| {
                        let cl = clauses[c % k].clone();
                        c /= k;
                        cl
                    })
                    .collect();
                let f = CnfFormula::new(n, chosen).unwrap();
                let (converted, _) = to_33sat(&f).map_err(|e| e.to_string())?;
                let before = satisfiable(&f);
                check(before == satisfiable(&converted), || {
                    format!("{:?}: verdict changed by conversion", f.clauses())
                })?;
                let norm = normalize(&f).map_err(|e| e.to_string())?;
                check(validate_33(&norm.formula).is_empty(), || {
                    format!("{:?}: normalized formula does not fit the gadget", f.clauses())
                })?;
                check(before == satisfiable(&norm.formula), || {
                    format!("{:?}: verdict changed by normalization", f.clauses())
                })?;
                if before {
                    let model = first_model(&norm.formula);
                    let projected = norm.project(&model);
                    check(evaluates_true(f.clauses(), projected.values()), || {
                        format!("{:?}: projected model fails", f.clauses())
                    })?;
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} formulas, identical verdicts"))
}

fn first_model(f: &CnfFormula) -> Assignment {
    let n = f.variable_count();
    (0u64..1 << n)
        .map(|mask| (0..n).map(|v| mask >> v & 1 == 1).collect::<Vec<_>>())
        .find(|values| evaluates_true(f.clauses(), values))
        .map(Assignment::new)
        .expect("satisfiable")
}

fn main() {
    let started = Instant::now();
    let graphs = criterion_one_instances();
    let criteria: Vec<Criterion> = vec![
        ("exact search equals permutation oracle", Box::new(|| oracle_equivalence(&graphs))),
        ("tree algorithm equals exact search", Box::new(tree_correctness)),
        ("kernel screen rejects n > 2^t without search", Box::new(kernel_screen)),
        ("downtime bound on optimal witnesses", Box::new(|| downtime_bound(&graphs))),
        ("SAT gadget forward and backward conversion", Box::new(sat_forward_backward)),
        ("SAT gadget structural audit", Box::new(sat_structure)),
        ("matching relaxation preserves feasibility", Box::new(conversion_equivalence)),
        ("matching gadget protocols and structure", Box::new(matching_reduction)),
        ("(3,3) conversion is equisatisfiable", Box::new(conversion_equisatisfiable)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = run();
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} [PRIMARY] {name}: PASS ({detail}; {secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} [PRIMARY] {name}: FAIL ({detail}; {secs:.1}s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
