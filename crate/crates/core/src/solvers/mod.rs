//! Deciding `b(G, s) <= t`.
//!
//! `decide` runs the pipeline: kernel screen, lower-bound prune, the
//! polynomial tree algorithm when the graph is a tree, and otherwise the
//! exact informed-set search. The permutation oracle is an independent
//! brute force used to cross-check the exact search.

mod exact;
mod oracle;
mod tree;

use std::fmt;

use thiserror::Error;

use crate::graph::Instance;
use crate::protocol::Protocol;

pub use exact::{exact_search, exact_search_within, DEFAULT_BUDGET};
pub use oracle::{permutation_oracle, permutation_oracle_with_cap, DEFAULT_ORACLE_CAP};
pub use tree::tree_broadcast_time;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("budget exceeded: more than {budget} states")]
    BudgetExceeded { budget: u64 },
    #[error("instance beyond desk-scale budget: {0} vertices")]
    TooLarge(usize),
    #[error("not a tree")]
    NotATree,
    #[error("instance too large for oracle: {n} vertices > cap {cap}")]
    TooLargeForOracle { n: usize, cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Kernel,
    LowerBound,
    Tree,
    Subset,
    Permutation,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Kernel => "kernel",
            Method::LowerBound => "lower-bound",
            Method::Tree => "tree",
            Method::Subset => "subset",
            Method::Permutation => "perm",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Informed-set states taken off the search frontier.
    pub states_expanded: u64,
}

/// Minimum broadcast time together with an optimal protocol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub broadcast_time: usize,
    pub witness: Protocol,
    pub method: Method,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelVerdict {
    DefinitelyNo,
    Undecided,
}

/// At most `2^t` vertices can hold the message after `t` rounds.
pub fn kernel_screen(instance: &Instance) -> KernelVerdict {
    let n = instance.order() as u128;
    let t = instance.deadline();
    let too_many = t < 127 && n > (1u128 << t);
    if too_many {
        KernelVerdict::DefinitelyNo
    } else {
        KernelVerdict::Undecided
    }
}

pub(crate) fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// `max(ceil(log2 n), ecc(s))`; never exceeds `b(G, s)`.
pub fn lower_bound(instance: &Instance) -> usize {
    let ecc = instance
        .graph()
        .eccentricity(instance.source())
        .expect("instances are connected");
    ceil_log2(instance.order()).max(ecc)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    Yes(Protocol),
    No,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub answer: Answer,
    pub method: Method,
    /// Exact broadcast time when the deciding method computed it.
    pub broadcast_time: Option<usize>,
    /// Lower bound that refuted the deadline, for `Method::LowerBound`.
    pub bound: Option<usize>,
    pub stats: SearchStats,
}

impl Decision {
    pub fn is_yes(&self) -> bool {
        matches!(self.answer, Answer::Yes(_))
    }
}

/// Decides whether every vertex can be informed within the instance
/// deadline, returning a verifying protocol on YES.
pub fn decide(instance: &Instance, budget: u64) -> Result<Decision, SolveError> {
    let t = instance.deadline();
    let no = |method, broadcast_time, bound, stats| Decision {
        answer: Answer::No,
        method,
        broadcast_time,
        bound,
        stats,
    };
    if kernel_screen(instance) == KernelVerdict::DefinitelyNo {
        return Ok(no(Method::Kernel, None, None, SearchStats::default()));
    }
    let lb = lower_bound(instance);
    if lb > t {
        return Ok(no(Method::LowerBound, None, Some(lb), SearchStats::default()));
    }
    let solved = if instance.graph().is_tree() {
        Some(tree_broadcast_time(instance)?)
    } else {
        exact_search_within(instance, budget, t)?
    };
    Ok(match solved {
        Some(r) if r.broadcast_time <= t => Decision {
            answer: Answer::Yes(r.witness),
            method: r.method,
            broadcast_time: Some(r.broadcast_time),
            bound: None,
            stats: r.stats,
        },
        Some(r) => no(r.method, Some(r.broadcast_time), None, r.stats),
        None => no(Method::Subset, None, None, SearchStats::default()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;
    use crate::graph::Graph;
    use crate::protocol::verify;

    fn inst(g: Graph, s: usize, t: usize) -> Instance {
        Instance::new(g, s, t).unwrap()
    }

    #[test]
    fn kernel_screen_boundary() {
        assert_eq!(kernel_screen(&inst(path(9), 1, 3)), KernelVerdict::DefinitelyNo);
        assert_eq!(kernel_screen(&inst(path(8), 1, 3)), KernelVerdict::Undecided);
        assert_eq!(kernel_screen(&inst(Graph::new(1), 1, 0)), KernelVerdict::Undecided);
        assert_eq!(kernel_screen(&inst(path(2), 1, 0)), KernelVerdict::DefinitelyNo);
        assert_eq!(kernel_screen(&inst(path(2), 1, 200)), KernelVerdict::Undecided);
    }

    #[test]
    fn lower_bounds() {
        for s in 1..=4 {
            assert_eq!(lower_bound(&inst(complete(4), s, 0)), 2);
        }
        assert_eq!(lower_bound(&inst(path(5), 1, 0)), 4);
        assert_eq!(lower_bound(&inst(star(3), 1, 0)), 2);
    }

    #[test]
    fn ceil_log2_values() {
        let got: Vec<_> = [1, 2, 3, 4, 5, 8, 9].iter().map(|&n| ceil_log2(n)).collect();
        assert_eq!(got, vec![0, 1, 2, 2, 3, 3, 4]);
    }

    #[test]
    fn decide_examples() {
        let i = inst(path(2), 1, 1);
        let d = decide(&i, DEFAULT_BUDGET).unwrap();
        match d.answer {
            Answer::Yes(p) => assert!(verify(&i, &p).is_valid()),
            Answer::No => panic!("P2 with t=1 is a yes-instance"),
        }

        let d = decide(&inst(star(3), 1, 2), DEFAULT_BUDGET).unwrap();
        assert_eq!(d.answer, Answer::No);
        assert_eq!(d.broadcast_time, Some(3));

        let d = decide(&inst(path(9), 1, 3), DEFAULT_BUDGET).unwrap();
        assert_eq!(d.answer, Answer::No);
        assert_eq!(d.method, Method::Kernel);
        assert_eq!(d.stats.states_expanded, 0);
    }

    #[test]
    fn decide_uses_search_on_cyclic_graphs() {
        let i = inst(cycle(5), 1, 3);
        let d = decide(&i, DEFAULT_BUDGET).unwrap();
        assert_eq!(d.method, Method::Subset);
        assert!(d.is_yes());
        // 5 > 2^2
        let d = decide(&i.with_deadline(2), DEFAULT_BUDGET).unwrap();
        assert_eq!(d.method, Method::Kernel);
        assert!(!d.is_yes());
        // 8 <= 2^3 but the eccentricity is 4
        let d = decide(&inst(cycle(8), 1, 3), DEFAULT_BUDGET).unwrap();
        assert_eq!((d.method, d.bound), (Method::LowerBound, Some(4)));
    }
}
