//! Seeded random generators for test corpora. All take an explicit RNG so
//! output depends only on the seed.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{Graph, VertexId};
use crate::reduction_matching::{N3dmInstance, Partition, Triple};
use crate::sat::{Assignment, CnfFormula, Literal};

/// Random recursive tree on `n >= 1` vertices, relabelled by a random
/// permutation.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> Graph {
    let mut label: Vec<VertexId> = (1..=n).collect();
    label.shuffle(rng);
    let mut g = Graph::new(n);
    for v in 1..n {
        let u = rng.gen_range(0..v);
        g.add_edge(label[u], label[v]).expect("tree edges are fresh");
    }
    g
}

/// Random spanning tree plus each remaining pair independently with
/// probability `p`.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut g = random_tree(rng, n);
    for u in 1..=n {
        for v in u + 1..=n {
            if !g.has_edge(u, v) && rng.gen_bool(p) {
                g.add_edge(u, v).expect("checked absent");
            }
        }
    }
    g
}

/// `m` clauses of width `1..=3` over `n` variables, distinct variables per
/// clause.
pub fn random_cnf<R: Rng>(rng: &mut R, n: usize, m: usize) -> CnfFormula {
    let vars: Vec<usize> = (1..=n).collect();
    let clauses = (0..m)
        .map(|_| {
            let width = rng.gen_range(1..=3.min(n));
            vars.choose_multiple(rng, width)
                .map(|&v| Literal::new(v, rng.gen_bool(0.5)))
                .collect()
        })
        .collect();
    CnfFormula::new(n, clauses).expect("literals in range")
}

/// A satisfiable formula that fits the gadget's literal slots (each
/// variable at most three times, each polarity at most twice), together
/// with the planted model. Clauses that cannot be completed are dropped, so
/// the result may have fewer than `m` clauses.
pub fn planted_33_cnf<R: Rng>(rng: &mut R, n: usize, m: usize) -> (CnfFormula, Assignment) {
    let model = Assignment::new((0..n).map(|_| rng.gen_bool(0.5)).collect());
    // uses[v] = [positive, negative]
    let mut uses = vec![[0usize; 2]; n + 1];
    let room = |uses: &[[usize; 2]], v: usize, positive: bool| {
        uses[v][0] + uses[v][1] < 3 && uses[v][!positive as usize] < 2
    };
    let mut clauses = Vec::with_capacity(m);
    for _ in 0..m {
        let width = rng.gen_range(1..=3.min(n));
        let mut vars: Vec<usize> = (1..=n).collect();
        vars.shuffle(rng);
        // first literal is true under the model
        let Some(&anchor) = vars.iter().find(|&&v| room(&uses, v, model.get(v))) else {
            break;
        };
        let mut clause = vec![Literal::new(anchor, model.get(anchor))];
        uses[anchor][!model.get(anchor) as usize] += 1;
        for &v in vars.iter().filter(|&&v| v != anchor) {
            if clause.len() == width {
                break;
            }
            let positive = rng.gen_bool(0.5);
            if room(&uses, v, positive) {
                clause.push(Literal::new(v, positive));
                uses[v][!positive as usize] += 1;
            }
        }
        clause.shuffle(rng);
        clauses.push(clause);
    }
    (CnfFormula::new(n, clauses).expect("literals in range"), model)
}

/// An exact instance with a planted solution. Sizes lie in `1..=max_size`.
pub fn planted_n3dm<R: Rng>(rng: &mut R, m: usize, max_size: usize) -> (N3dmInstance, Partition) {
    assert!(m >= 1 && max_size >= 1);
    let target = rng.gen_range(3..=3 * max_size);
    let mut w = Vec::with_capacity(m);
    let mut x = Vec::with_capacity(m);
    let mut y = Vec::with_capacity(m);
    while w.len() < m {
        let (a, b) = (rng.gen_range(1..=max_size), rng.gen_range(1..=max_size));
        if let Some(c) = target.checked_sub(a + b).filter(|c| (1..=max_size).contains(c)) {
            w.push(a);
            x.push(b);
            y.push(c);
        }
    }
    let mut px: Vec<usize> = (0..m).collect();
    let mut py: Vec<usize> = (0..m).collect();
    px.shuffle(rng);
    py.shuffle(rng);
    // element i of the shuffled X is x[px[i]]
    let xs: Vec<usize> = px.iter().map(|&i| x[i]).collect();
    let ys: Vec<usize> = py.iter().map(|&i| y[i]).collect();
    let mut inv_x = vec![0; m];
    let mut inv_y = vec![0; m];
    for i in 0..m {
        inv_x[px[i]] = i;
        inv_y[py[i]] = i;
    }
    let triples = (0..m)
        .map(|i| Triple {
            w: i,
            x: inv_x[i],
            y: inv_y[i],
        })
        .collect();
    (
        N3dmInstance::new(w, xs, ys, target).expect("planted sums match"),
        Partition::new(m, triples).expect("planted triples partition"),
    )
}

/// Sizes drawn uniformly from `1..=max_size`, with one `Y` size adjusted so
/// that the total is a multiple of `m`. Usually has no solution.
pub fn random_n3dm<R: Rng>(rng: &mut R, m: usize, max_size: usize) -> N3dmInstance {
    assert!(m >= 1 && max_size >= 1);
    loop {
        let mut draw = || (0..m).map(|_| rng.gen_range(1..=max_size)).collect::<Vec<_>>();
        let (w, x, mut y) = (draw(), draw(), draw());
        let rest: usize = w.iter().chain(&x).chain(&y[..m - 1]).sum();
        let target = rest / m + 1;
        let last = m * target - rest;
        if last <= max_size {
            y[m - 1] = last;
            return N3dmInstance::new(w, x, y, target).expect("total fixed");
        }
    }
}
