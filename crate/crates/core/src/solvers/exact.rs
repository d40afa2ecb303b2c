//! Breadth-first search over informed sets.
//!
//! A state is the set of informed vertices. One round maps it to the union
//! with any set of uninformed vertices that can be matched to distinct
//! informed neighbours. Since extra informed vertices may stay silent, a
//! superset state is never worse, so the informed set alone is a sound state
//! and only maximal matchings need to be generated.

use std::collections::HashMap;

use crate::graph::{Instance, VertexId};
use crate::protocol::Protocol;

use super::{kernel_screen, KernelVerdict, Method, SearchStats, SolveError, SolveResult};

/// Default cap on the number of distinct informed-set states.
pub const DEFAULT_BUDGET: u64 = 1 << 22;

const MAX_VERTICES: usize = 64;

/// Computes `b(G, s)` and an optimal protocol.
pub fn exact_search(instance: &Instance, budget: u64) -> Result<SolveResult, SolveError> {
    Ok(search(instance, budget, None)?.expect("search without a round limit always completes"))
}

/// Like [`exact_search`], but stops once `max_rounds` rounds are exhausted
/// and returns `None` if the broadcast time exceeds them. Instances failing
/// the `2^t` kernel screen return `None` without expanding any state.
pub fn exact_search_within(
    instance: &Instance,
    budget: u64,
    max_rounds: usize,
) -> Result<Option<SolveResult>, SolveError> {
    if kernel_screen(&instance.with_deadline(max_rounds)) == KernelVerdict::DefinitelyNo {
        return Ok(None);
    }
    search(instance, budget, Some(max_rounds))
}

type Calls = Vec<(u8, u8)>;

struct Predecessor {
    prev: u64,
    calls: Calls,
}

fn search(
    instance: &Instance,
    budget: u64,
    max_rounds: Option<usize>,
) -> Result<Option<SolveResult>, SolveError> {
    let g = instance.graph();
    let n = g.order();
    if n > MAX_VERTICES {
        return Err(SolveError::TooLarge(n));
    }
    let nbr: Vec<u64> = (1..=n)
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | bit(w)))
        .collect();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let start = bit(instance.source());

    let mut stats = SearchStats::default();
    let mut pred: HashMap<u64, Predecessor> = HashMap::new();
    pred.insert(
        start,
        Predecessor {
            prev: start,
            calls: Vec::new(),
        },
    );
    if start == full {
        return Ok(Some(finish(instance, &pred, full, 0, stats)));
    }

    let mut layer = vec![start];
    let mut round = 0;
    loop {
        if max_rounds.is_some_and(|limit| round >= limit) {
            return Ok(None);
        }
        round += 1;
        let mut next = Vec::new();
        for &state in &layer {
            stats.states_expanded += 1;
            let mut found_full = false;
            let mut overflow = false;
            for_each_successor(state, &nbr, n, |succ, calls| {
                if overflow || found_full || pred.contains_key(&succ) {
                    return;
                }
                if pred.len() as u64 >= budget {
                    overflow = true;
                    return;
                }
                pred.insert(
                    succ,
                    Predecessor {
                        prev: state,
                        calls: calls.to_vec(),
                    },
                );
                next.push(succ);
                found_full = succ == full;
            });
            if overflow {
                return Err(SolveError::BudgetExceeded { budget });
            }
            if found_full {
                return Ok(Some(finish(instance, &pred, full, round, stats)));
            }
        }
        // Connected instances always make progress.
        assert!(!next.is_empty(), "no successor states from a connected instance");
        layer = next;
    }
}

fn bit(v: VertexId) -> u64 {
    1u64 << (v - 1)
}

/// Enumerates the informed sets reachable in one round from `informed`,
/// visiting informed vertices in id order; each either calls an unclaimed
/// uninformed neighbour or stays silent. Only maximal call sets are emitted.
fn for_each_successor(
    informed: u64,
    nbr: &[u64],
    n: usize,
    mut emit: impl FnMut(u64, &[(u8, u8)]),
) {
    let senders: Vec<usize> = (0..n)
        .filter(|&v| informed >> v & 1 == 1 && nbr[v] & !informed != 0)
        .collect();
    let mut calls: Calls = Vec::with_capacity(senders.len());
    let mut silent: Vec<usize> = Vec::with_capacity(senders.len());
    dfs(
        0, informed, 0, &senders, nbr, &mut calls, &mut silent, &mut emit,
    );
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    idx: usize,
    informed: u64,
    claimed: u64,
    senders: &[usize],
    nbr: &[u64],
    calls: &mut Calls,
    silent: &mut Vec<usize>,
    emit: &mut impl FnMut(u64, &[(u8, u8)]),
) {
    if idx == senders.len() {
        let free = !informed & !claimed;
        if claimed != 0 && silent.iter().all(|&v| nbr[v] & free == 0) {
            emit(informed | claimed, calls);
        }
        return;
    }
    let v = senders[idx];
    let mut options = nbr[v] & !informed & !claimed;
    while options != 0 {
        let w = options.trailing_zeros() as usize;
        options &= options - 1;
        calls.push((v as u8 + 1, w as u8 + 1));
        dfs(idx + 1, informed, claimed | 1 << w, senders, nbr, calls, silent, emit);
        calls.pop();
    }
    silent.push(v);
    dfs(idx + 1, informed, claimed, senders, nbr, calls, silent, emit);
    silent.pop();
}

fn finish(
    instance: &Instance,
    pred: &HashMap<u64, Predecessor>,
    full: u64,
    rounds: usize,
    stats: SearchStats,
) -> SolveResult {
    let mut per_round: Vec<&Calls> = Vec::with_capacity(rounds);
    let mut state = full;
    while let Some(p) = pred.get(&state) {
        if p.prev == state {
            break;
        }
        per_round.push(&p.calls);
        state = p.prev;
    }
    per_round.reverse();
    let n = instance.order();
    let mut children: Vec<Vec<VertexId>> = vec![Vec::new(); n + 1];
    for calls in per_round {
        for &(from, to) in calls {
            children[from as usize].push(to as usize);
        }
    }
    let witness = Protocol::from_children(n, instance.source(), children.into_iter().enumerate().skip(1))
        .expect("search calls form a spanning tree");
    SolveResult {
        broadcast_time: rounds,
        witness,
        method: Method::Subset,
        stats,
    }
}
