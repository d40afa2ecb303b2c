use crate::graph::Instance;

use super::SolveError;

pub const DEFAULT_ORACLE_CAP: usize = 9;

/// Brute force over vertex permutations.
///
/// For a permutation, every round each informed vertex, taken in permutation
/// order, calls the first uninformed neighbour on its right that no earlier
/// vertex has called in the same round. The minimum number of rounds over
/// all permutations is `b(G, s)`. Permutations not starting with the source
/// are never better, so the source is pinned first.
pub fn permutation_oracle(instance: &Instance) -> Result<usize, SolveError> {
    permutation_oracle_with_cap(instance, DEFAULT_ORACLE_CAP)
}

pub fn permutation_oracle_with_cap(instance: &Instance, cap: usize) -> Result<usize, SolveError> {
    let g = instance.graph();
    let n = g.order();
    if n > cap || n > 32 {
        return Err(SolveError::TooLargeForOracle { n, cap });
    }
    let adj: Vec<u32> = (1..=n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << (w - 1)))
        .collect();
    let s = instance.source() - 1;
    let mut perm: Vec<usize> = std::iter::once(s).chain((0..n).filter(|&v| v != s)).collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };

    let mut best = usize::MAX;
    // Heap's algorithm over perm[1..].
    let k = n.saturating_sub(1);
    let mut c = vec![0usize; k];
    best = best.min(greedy_rounds(&perm, &adj, full, best));
    let mut i = 0;
    while i < k {
        if c[i] < i {
            let (a, b) = if i % 2 == 0 { (0, i) } else { (c[i], i) };
            perm.swap(a + 1, b + 1);
            best = best.min(greedy_rounds(&perm, &adj, full, best));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(best)
}

/// Rounds needed by the greedy rule under `perm`, or `usize::MAX` if it
/// stalls or cannot beat `cutoff`.
fn greedy_rounds(perm: &[usize], adj: &[u32], full: u32, cutoff: usize) -> usize {
    let mut informed: u32 = 1 << perm[0];
    let mut rounds = 0;
    while informed != full {
        rounds += 1;
        if rounds >= cutoff {
            return usize::MAX;
        }
        let mut claimed = 0u32;
        for (i, &v) in perm.iter().enumerate() {
            if informed >> v & 1 == 0 {
                continue;
            }
            let right = perm[i + 1..]
                .iter()
                .find(|&&u| adj[v] >> u & 1 == 1 && (informed | claimed) >> u & 1 == 0);
            if let Some(&u) = right {
                claimed |= 1 << u;
            }
        }
        if claimed == 0 {
            return usize::MAX;
        }
        informed |= claimed;
    }
    rounds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;

    fn oracle(g: crate::graph::Graph, s: usize) -> usize {
        permutation_oracle(&Instance::new(g, s, 0).unwrap()).unwrap()
    }

    #[test]
    fn hand_enumerated_values() {
        assert_eq!(oracle(path(3), 1), 2);
        for s in 1..=3 {
            assert_eq!(oracle(complete(3), s), 2);
        }
        for s in 1..=4 {
            assert_eq!(oracle(cycle(4), s), 2);
        }
        assert_eq!(oracle(star(3), 1), 3);
        assert_eq!(oracle(path(1), 1), 0);
    }

    #[test]
    fn cap_is_enforced() {
        let i = Instance::new(path(10), 1, 0).unwrap();
        assert_eq!(
            permutation_oracle(&i),
            Err(SolveError::TooLargeForOracle { n: 10, cap: 9 })
        );
        assert_eq!(permutation_oracle_with_cap(&i, 10), Ok(9));
    }
}
