use crate::graph::{Instance, VertexId};
use crate::protocol::Protocol;

use super::{Method, SearchStats, SolveError, SolveResult};

/// Exact broadcast time on trees.
///
/// Bottom-up: with children sorted by their own subtree time `b(c)` in
/// descending order (ties: lower id first), `b(v) = max_i (i + b(c_i))`.
/// The witness informs children in that order.
pub fn tree_broadcast_time(instance: &Instance) -> Result<SolveResult, SolveError> {
    let g = instance.graph();
    if !g.is_tree() {
        return Err(SolveError::NotATree);
    }
    let n = g.order();
    let s = instance.source();

    // Iterative DFS order so deep paths do not overflow the stack.
    let mut parent = vec![0; n + 1];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![s];
    let mut seen = vec![false; n + 1];
    seen[s] = true;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &w in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = v;
                stack.push(w);
            }
        }
    }

    let mut time = vec![0usize; n + 1];
    let mut children: Vec<Vec<VertexId>> = vec![Vec::new(); n + 1];
    for &v in order.iter().rev() {
        let mut kids: Vec<VertexId> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| w != s && parent[w] == v)
            .collect();
        kids.sort_by(|&a, &b| time[b].cmp(&time[a]).then(a.cmp(&b)));
        time[v] = kids
            .iter()
            .enumerate()
            .map(|(i, &c)| i + 1 + time[c])
            .max()
            .unwrap_or(0);
        children[v] = kids;
    }

    let witness = Protocol::from_children(
        n,
        s,
        children.into_iter().enumerate().skip(1),
    )
    .expect("tree children form a valid protocol");
    Ok(SolveResult {
        broadcast_time: time[s],
        witness,
        method: Method::Tree,
        stats: SearchStats::default(),
    })
}
