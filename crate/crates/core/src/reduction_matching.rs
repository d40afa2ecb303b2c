//! Numerical 3-D matching, its "almost" relaxation, and the reduction from
//! the relaxation to Telephone Broadcast on graphs with a feedback vertex
//! set of size one.
//!
//! Gadget shape, for deadline `t = T`:
//!
//! ```text
//!   s --- mid --- s_x --(t-1-j')--> gamma[j']      j' not in {t - size(x)}
//!   |             |
//!   |             +--- alpha[i] ==(T-lambda-size(w_i)-2)== beta[i]
//!   |                                                   |
//!   +----------- s_y -----------------------------------+
//!                 +--(t-1-k')--> delta[k']              k' not in {t - size(y)}
//! ```
//!
//! `s_x` and `s_y` are informed in round 2 and then feed one pendant job per
//! round. The rounds left free by the `gamma`/`delta` paths are exactly the
//! ones at which a triple's `alpha` or `beta` can be fed.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::gadget::{parse_indices, split_interior, split_label, CheckKind, GadgetReport};
use crate::graph::{Graph, GraphError, Instance, VertexId};
use crate::protocol::{simulate, verify, Protocol, Verdict};

/// Largest `m` accepted by [`brute_force_n3dm`].
pub const BRUTE_FORCE_MAX_M: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("W, X and Y must all have m >= 1 elements (got {w}, {x}, {y})")]
    Lengths { w: usize, x: usize, y: usize },
    #[error("sizes must be positive")]
    ZeroSize,
    #[error("total size {total} differs from m*T = {expected}")]
    Total { total: usize, expected: usize },
    #[error("size {size} exceeds the strong-sense bound {bound}")]
    TooBig { size: usize, bound: usize },
    #[error("{set} sizes must be pairwise distinct")]
    NotDistinct { set: char },
    #[error("slack {lambda} exceeds target {target}")]
    Slack { lambda: usize, target: usize },
    #[error("m = {0} is too small for the conversion (needs m >= 3)")]
    TooSmall(usize),
    #[error("m = {m} exceeds the brute-force cap {cap}")]
    TooLarge { m: usize, cap: usize },
    #[error("gadget precondition failed: {}", .0.join("; "))]
    Preconditions(Vec<String>),
    #[error("partition is malformed: {0}")]
    BadPartition(String),
    #[error("triple {index} sums to {sum}, the schedule needs at least {needed}")]
    Slow { index: usize, sum: usize, needed: usize },
    #[error("protocol does not broadcast within the deadline: {0}")]
    InvalidProtocol(Verdict),
    #[error("protocol is not in normal form: {0}")]
    NotNormalized(String),
    #[error("role map does not describe a matching gadget: {0}")]
    Roles(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn check_lengths(w: &[usize], x: &[usize], y: &[usize]) -> Result<(), MatchingError> {
    if w.is_empty() || w.len() != x.len() || w.len() != y.len() {
        return Err(MatchingError::Lengths {
            w: w.len(),
            x: x.len(),
            y: y.len(),
        });
    }
    if w.iter().chain(x).chain(y).any(|&s| s == 0) {
        return Err(MatchingError::ZeroSize);
    }
    Ok(())
}

fn distinct(sizes: &[usize], set: char) -> Result<(), MatchingError> {
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|p| p[0] == p[1]) {
        return Err(MatchingError::NotDistinct { set });
    }
    Ok(())
}

/// An exact instance: every triple must sum to `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct N3dmInstance {
    w: Vec<usize>,
    x: Vec<usize>,
    y: Vec<usize>,
    target: usize,
}

impl N3dmInstance {
    pub fn new(
        w: Vec<usize>,
        x: Vec<usize>,
        y: Vec<usize>,
        target: usize,
    ) -> Result<Self, MatchingError> {
        check_lengths(&w, &x, &y)?;
        let m = w.len();
        let bound = (1usize << 16).saturating_mul((3 * m).pow(4));
        if let Some(&size) = w.iter().chain(&x).chain(&y).find(|&&s| s > bound) {
            return Err(MatchingError::TooBig { size, bound });
        }
        let total: usize = w.iter().chain(&x).chain(&y).sum();
        if total != m * target {
            return Err(MatchingError::Total {
                total,
                expected: m * target,
            });
        }
        Ok(N3dmInstance { w, x, y, target })
    }

    pub fn m(&self) -> usize {
        self.w.len()
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn w(&self) -> &[usize] {
        &self.w
    }

    pub fn x(&self) -> &[usize] {
        &self.x
    }

    pub fn y(&self) -> &[usize] {
        &self.y
    }
}

/// The relaxed instance: every triple must reach `target - lambda`; `X` and
/// `Y` sizes are pairwise distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlmostInstance {
    w: Vec<usize>,
    x: Vec<usize>,
    y: Vec<usize>,
    target: usize,
    lambda: usize,
}

impl AlmostInstance {
    pub fn new(
        w: Vec<usize>,
        x: Vec<usize>,
        y: Vec<usize>,
        target: usize,
        lambda: usize,
    ) -> Result<Self, MatchingError> {
        check_lengths(&w, &x, &y)?;
        distinct(&x, 'X')?;
        distinct(&y, 'Y')?;
        if lambda > target {
            return Err(MatchingError::Slack { lambda, target });
        }
        Ok(AlmostInstance {
            w,
            x,
            y,
            target,
            lambda,
        })
    }

    pub fn m(&self) -> usize {
        self.w.len()
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn w(&self) -> &[usize] {
        &self.w
    }

    pub fn x(&self) -> &[usize] {
        &self.x
    }

    pub fn y(&self) -> &[usize] {
        &self.y
    }

    /// `target - lambda`.
    pub fn threshold(&self) -> usize {
        self.target - self.lambda
    }
}

/// One triple, as 0-based indices into `W`, `X` and `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub w: usize,
    pub x: usize,
    pub y: usize,
}

/// A set of `m` triples. Canonical form lists triple `i` as the one holding
/// `w_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    triples: Vec<Triple>,
}

impl Partition {
    /// Checks that each of `W`, `X`, `Y` is covered exactly once by `m`
    /// triples, and puts the triples in canonical order.
    pub fn new(m: usize, mut triples: Vec<Triple>) -> Result<Self, MatchingError> {
        if triples.len() != m {
            return Err(MatchingError::BadPartition(format!(
                "{} triples for m = {m}",
                triples.len()
            )));
        }
        for (set, pick) in [
            ('W', (|t: &Triple| t.w) as fn(&Triple) -> usize),
            ('X', |t| t.x),
            ('Y', |t| t.y),
        ] {
            let mut seen = vec![false; m];
            for t in &triples {
                let i = pick(t);
                if i >= m || std::mem::replace(&mut seen[i], true) {
                    return Err(MatchingError::BadPartition(format!(
                        "{set} index {} out of range or repeated",
                        i + 1
                    )));
                }
            }
        }
        triples.sort_by_key(|t| t.w);
        Ok(Partition { triples })
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn m(&self) -> usize {
        self.triples.len()
    }
}

/// Element sizes plus the per-triple acceptance rule.
pub trait TripleSystem {
    fn sizes(&self) -> (&[usize], &[usize], &[usize]);
    fn accepts(&self, sum: usize) -> bool;

    fn sum(&self, t: Triple) -> usize {
        let (w, x, y) = self.sizes();
        w[t.w] + x[t.x] + y[t.y]
    }

    fn is_solution(&self, p: &Partition) -> bool {
        p.triples().iter().all(|&t| self.accepts(self.sum(t)))
    }
}

impl TripleSystem for N3dmInstance {
    fn sizes(&self) -> (&[usize], &[usize], &[usize]) {
        (&self.w, &self.x, &self.y)
    }

    fn accepts(&self, sum: usize) -> bool {
        sum == self.target
    }
}

impl TripleSystem for AlmostInstance {
    fn sizes(&self) -> (&[usize], &[usize], &[usize]) {
        (&self.w, &self.x, &self.y)
    }

    fn accepts(&self, sum: usize) -> bool {
        sum >= self.threshold()
    }
}

/// Exhaustive search over all pairings; returns the lexicographically first
/// acceptable partition (triples in `W` order, `X` then `Y` index chosen
/// smallest first).
pub fn brute_force_n3dm<S: TripleSystem>(inst: &S) -> Result<Option<Partition>, MatchingError> {
    let m = inst.sizes().0.len();
    if m > BRUTE_FORCE_MAX_M {
        return Err(MatchingError::TooLarge {
            m,
            cap: BRUTE_FORCE_MAX_M,
        });
    }
    fn go<S: TripleSystem>(
        inst: &S,
        i: usize,
        used_x: u32,
        used_y: u32,
        acc: &mut Vec<Triple>,
    ) -> bool {
        let m = inst.sizes().0.len();
        if i == m {
            return true;
        }
        for x in (0..m).filter(|x| used_x >> x & 1 == 0) {
            for y in (0..m).filter(|y| used_y >> y & 1 == 0) {
                let t = Triple { w: i, x, y };
                if inst.accepts(inst.sum(t)) {
                    acc.push(t);
                    if go(inst, i + 1, used_x | 1 << x, used_y | 1 << y, acc) {
                        return true;
                    }
                    acc.pop();
                }
            }
        }
        false
    }
    let mut acc = Vec::with_capacity(m);
    Ok(go(inst, 0, 0, 0, &mut acc).then_some(Partition { triples: acc }))
}

/// Scales every size and the target by `m^2`, sets `lambda = 2(m + 1)`, and
/// breaks ties in `X` and in `Y`: within each maximal run of `k` equal
/// sizes (in sorted order, stable by index) the `j`-th element loses
/// `k - j`.
pub fn to_almost(inst: &N3dmInstance) -> Result<AlmostInstance, MatchingError> {
    let m = inst.m();
    if m < 3 {
        return Err(MatchingError::TooSmall(m));
    }
    let scale = m * m;
    let scaled = |v: &[usize]| v.iter().map(|s| s * scale).collect::<Vec<_>>();
    let spread = |v: &[usize]| {
        let mut out = scaled(v);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&i| v[i]);
        let mut start = 0;
        while start < m {
            let mut end = start + 1;
            while end < m && v[order[end]] == v[order[start]] {
                end += 1;
            }
            let k = end - start;
            for (j, &i) in order[start..end].iter().enumerate() {
                out[i] -= k - (j + 1);
            }
            start = end;
        }
        out
    };
    AlmostInstance::new(
        scaled(&inst.w),
        spread(&inst.x),
        spread(&inst.y),
        inst.target * scale,
        2 * (m + 1),
    )
}

/// Kinds of auxiliary paths in the gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatchPath {
    /// `s` to `s_x`.
    SourceSx,
    AlphaBeta(usize),
    Gamma(usize),
    Delta(usize),
}

/// Role of a vertex in the matching gadget. Triple indices are 1-based
/// positions in the non-decreasing order of `W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatchRole {
    Source,
    Sx,
    Sy,
    Alpha(usize),
    Beta(usize),
    Gamma(usize),
    Delta(usize),
    /// `k`-th interior vertex, counted from `s`, `alpha`, or the hub.
    Interior { path: MatchPath, k: usize },
}

impl fmt::Display for MatchRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MatchRole::Source => f.write_str("s"),
            MatchRole::Sx => f.write_str("s_x"),
            MatchRole::Sy => f.write_str("s_y"),
            MatchRole::Alpha(i) => write!(f, "alpha[{i}]"),
            MatchRole::Beta(i) => write!(f, "beta[{i}]"),
            MatchRole::Gamma(j) => write!(f, "gamma[{j}]"),
            MatchRole::Delta(k) => write!(f, "delta[{k}]"),
            MatchRole::Interior { path, k } => match path {
                MatchPath::SourceSx => write!(f, "p[sx,{k}]"),
                MatchPath::AlphaBeta(i) => write!(f, "p[ab[{i}],{k}]"),
                MatchPath::Gamma(j) => write!(f, "p[g[{j}],{k}]"),
                MatchPath::Delta(d) => write!(f, "p[d[{d}],{k}]"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown role label")]
pub struct MatchRoleParseError;

impl FromStr for MatchRole {
    type Err = MatchRoleParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, args) = split_label(s).ok_or(MatchRoleParseError)?;
        let one = |a: &str| match parse_indices(a).as_deref() {
            Some(&[i]) => Ok(i),
            _ => Err(MatchRoleParseError),
        };
        match name {
            "s" | "s_x" | "s_y" if !args.is_empty() => Err(MatchRoleParseError),
            "s" => Ok(MatchRole::Source),
            "s_x" => Ok(MatchRole::Sx),
            "s_y" => Ok(MatchRole::Sy),
            "alpha" => one(args).map(MatchRole::Alpha),
            "beta" => one(args).map(MatchRole::Beta),
            "gamma" => one(args).map(MatchRole::Gamma),
            "delta" => one(args).map(MatchRole::Delta),
            "p" => {
                let (owner, k) = split_interior(args).ok_or(MatchRoleParseError)?;
                let (tag, inner) = split_label(owner).ok_or(MatchRoleParseError)?;
                let path = match tag {
                    "sx" if inner.is_empty() => MatchPath::SourceSx,
                    "ab" => MatchPath::AlphaBeta(one(inner)?),
                    "g" => MatchPath::Gamma(one(inner)?),
                    "d" => MatchPath::Delta(one(inner)?),
                    _ => return Err(MatchRoleParseError),
                };
                Ok(MatchRole::Interior { path, k })
            }
            _ => Err(MatchRoleParseError),
        }
    }
}

/// The constructed instance with every vertex labelled.
#[derive(Debug, Clone)]
pub struct MatchingGadget {
    pub instance: Instance,
    /// Role of vertex `v` at index `v - 1`.
    pub roles: Vec<MatchRole>,
    pub almost: AlmostInstance,
    /// `W` indices in non-decreasing size order (stable); triple slot `i`
    /// (1-based) holds `w_order[i - 1]`.
    pub w_order: Vec<usize>,
    pub s_x: VertexId,
    pub s_y: VertexId,
    pub mid: VertexId,
    /// `alpha ..= beta` for each triple slot.
    pub alpha_beta: Vec<Vec<VertexId>>,
    /// Round-index `j'` and `s_x ..= gamma[j']`.
    pub gammas: Vec<(usize, Vec<VertexId>)>,
    /// Round-index `k'` and `s_y ..= delta[k']`.
    pub deltas: Vec<(usize, Vec<VertexId>)>,
}

impl MatchingGadget {
    pub fn deadline(&self) -> usize {
        self.instance.deadline()
    }

    pub fn alpha(&self, slot: usize) -> VertexId {
        self.alpha_beta[slot][0]
    }

    pub fn beta(&self, slot: usize) -> VertexId {
        *self.alpha_beta[slot].last().expect("non-empty")
    }

    pub fn role(&self, v: VertexId) -> MatchRole {
        self.roles[v - 1]
    }
}

/// Index-set and path-length requirements, reported all at once.
fn preconditions(inst: &AlmostInstance) -> Vec<String> {
    let t = inst.target();
    let mut errs = Vec::new();
    for (set, sizes) in [('x', inst.x()), ('y', inst.y())] {
        for (j, &s) in sizes.iter().enumerate() {
            if s < 2 || s + 1 > t {
                errs.push(format!(
                    "size({set}_{}) = {s} must lie in 2..={}",
                    j + 1,
                    t.saturating_sub(1)
                ));
            }
        }
    }
    for (i, &w) in inst.w().iter().enumerate() {
        if inst.threshold() < w + 3 {
            errs.push(format!(
                "alpha-beta path for w_{} has length T - lambda - {w} - 2 < 1",
                i + 1
            ));
        }
    }
    errs
}

struct Builder {
    graph: Graph,
    roles: Vec<MatchRole>,
}

impl Builder {
    fn vertex(&mut self, role: MatchRole) -> VertexId {
        self.roles.push(role);
        self.graph.add_vertex()
    }

    fn edge(&mut self, u: VertexId, v: VertexId) {
        self.graph.add_edge(u, v).expect("gadget edges are fresh");
    }

    fn path(&mut self, start: VertexId, len: usize, path: MatchPath, end: VertexId) -> Vec<VertexId> {
        let mut verts = vec![start];
        for k in 1..len {
            let v = self.vertex(MatchRole::Interior { path, k });
            self.edge(verts[k - 1], v);
            verts.push(v);
        }
        self.edge(*verts.last().expect("non-empty"), end);
        verts.push(end);
        verts
    }
}

/// Builds the broadcast instance `(G, s, t = T)`.
pub fn build_matching_gadget(inst: &AlmostInstance) -> Result<MatchingGadget, MatchingError> {
    let errs = preconditions(inst);
    if !errs.is_empty() {
        return Err(MatchingError::Preconditions(errs));
    }
    let t = inst.target();
    let m = inst.m();
    let mut w_order: Vec<usize> = (0..m).collect();
    w_order.sort_by_key(|&i| inst.w()[i]);

    let mut b = Builder {
        graph: Graph::new(0),
        roles: Vec::new(),
    };
    let s = b.vertex(MatchRole::Source);
    let s_x = b.vertex(MatchRole::Sx);
    let s_y = b.vertex(MatchRole::Sy);
    let sx_path = b.path(s, 2, MatchPath::SourceSx, s_x);
    let mid = sx_path[1];
    b.edge(s, s_y);

    let mut alpha_beta = Vec::with_capacity(m);
    for (slot, &wi) in w_order.iter().enumerate() {
        let alpha = b.vertex(MatchRole::Alpha(slot + 1));
        let beta = b.vertex(MatchRole::Beta(slot + 1));
        b.edge(s_x, alpha);
        b.edge(s_y, beta);
        let len = inst.threshold() - inst.w()[wi] - 2;
        alpha_beta.push(b.path(alpha, len, MatchPath::AlphaBeta(slot + 1), beta));
    }

    let reserved = |sizes: &[usize]| -> Vec<usize> { sizes.iter().map(|&s| t - s).collect() };
    let (rx, ry) = (reserved(inst.x()), reserved(inst.y()));
    let mut gammas = Vec::new();
    let mut deltas = Vec::new();
    for j in 1..=t.saturating_sub(2) {
        if !rx.contains(&j) {
            let g = b.vertex(MatchRole::Gamma(j));
            gammas.push((j, b.path(s_x, t - 1 - j, MatchPath::Gamma(j), g)));
        }
    }
    for k in 1..=t.saturating_sub(2) {
        if !ry.contains(&k) {
            let d = b.vertex(MatchRole::Delta(k));
            deltas.push((k, b.path(s_y, t - 1 - k, MatchPath::Delta(k), d)));
        }
    }

    let instance = Instance::new(b.graph, s, t)?;
    Ok(MatchingGadget {
        instance,
        roles: b.roles,
        almost: inst.clone(),
        w_order,
        s_x,
        s_y,
        mid,
        alpha_beta,
        gammas,
        deltas,
    })
}

/// Forward direction. `s` informs the `s_x` path then `s_y`; from round 3
/// the hub `s_x` feeds, at round `j' + 2`, either `gamma[j']` or (when
/// `j' = t - size(x_j)`) the `alpha` of the triple holding `x_j`; `s_y`
/// mirrors this with `delta` and `beta`. Each `alpha`-`beta` path is then
/// filled from both ends.
///
/// `alpha` is informed in round `t - size(x) + 2` and `beta` in round
/// `t - size(y) + 2`, so the path interior is covered within the deadline
/// exactly when `size(w) + size(x) + size(y) >= T - lambda + 1`; triples
/// below that are rejected.
pub fn protocol_from_partition(
    gadget: &MatchingGadget,
    part: &Partition,
) -> Result<Protocol, MatchingError> {
    let inst = &gadget.almost;
    let m = inst.m();
    if part.m() != m {
        return Err(MatchingError::BadPartition(format!(
            "{} triples for m = {m}",
            part.m()
        )));
    }
    let needed = inst.threshold() + 1;
    for &tr in part.triples() {
        let sum = inst.sum(tr);
        if sum < needed {
            return Err(MatchingError::Slow {
                index: tr.w + 1,
                sum,
                needed,
            });
        }
    }
    Ok(schedule(gadget, part))
}

/// The partition schedule, without the slack check.
fn schedule(gadget: &MatchingGadget, part: &Partition) -> Protocol {
    let inst = &gadget.almost;
    let t = gadget.deadline();
    let mut slot_of = vec![0; inst.m()];
    for (slot, &wi) in gadget.w_order.iter().enumerate() {
        slot_of[wi] = slot;
    }
    let mut alpha_at = HashMap::new();
    let mut beta_at = HashMap::new();
    for &tr in part.triples() {
        alpha_at.insert(t - inst.x()[tr.x], slot_of[tr.w]);
        beta_at.insert(t - inst.y()[tr.y], slot_of[tr.w]);
    }

    let order = gadget.instance.order();
    let mut lists: Vec<Vec<VertexId>> = vec![Vec::new(); order + 1];
    let s = gadget.instance.source();
    lists[s] = vec![gadget.mid, gadget.s_y];
    lists[gadget.mid] = vec![gadget.s_x];

    let gamma_at: HashMap<usize, &Vec<VertexId>> =
        gadget.gammas.iter().map(|(j, p)| (*j, p)).collect();
    let delta_at: HashMap<usize, &Vec<VertexId>> =
        gadget.deltas.iter().map(|(k, p)| (*k, p)).collect();
    for round in 1..=t.saturating_sub(2) {
        if let Some(path) = gamma_at.get(&round) {
            lists[gadget.s_x].push(path[1]);
            chain(&mut lists, &path[1..]);
        } else if let Some(&slot) = alpha_at.get(&round) {
            lists[gadget.s_x].push(gadget.alpha(slot));
        }
        if let Some(path) = delta_at.get(&round) {
            lists[gadget.s_y].push(path[1]);
            chain(&mut lists, &path[1..]);
        } else if let Some(&slot) = beta_at.get(&round) {
            lists[gadget.s_y].push(gadget.beta(slot));
        }
    }

    // Split each alpha-beta path so that each end covers what it can reach
    // by round t.
    for &tr in part.triples() {
        let path = &gadget.alpha_beta[slot_of[tr.w]];
        let from_alpha = inst.x()[tr.x] - 2;
        let interior = path.len() - 2;
        let split = from_alpha.min(interior);
        chain(&mut lists, &path[..=split]);
        let back: Vec<VertexId> = path[split + 1..].iter().rev().copied().collect();
        chain(&mut lists, &back);
    }

    Protocol::from_children(order, s, lists.into_iter().enumerate().skip(1))
        .expect("partition schedule is a spanning tree")
}

fn chain(lists: &mut [Vec<VertexId>], path: &[VertexId]) {
    for w in path.windows(2) {
        lists[w[0]].push(w[1]);
    }
}

/// Backward direction for protocols in normal form: every `alpha` and every
/// `beta` must be a child of its hub. The round at which `s_x` informs
/// `alpha` of slot `i` identifies the `x` element of that triple, and
/// likewise for `s_y` and `beta`.
pub fn partition_from_protocol(
    gadget: &MatchingGadget,
    protocol: &Protocol,
) -> Result<Partition, MatchingError> {
    let verdict = verify(&gadget.instance, protocol);
    if !verdict.is_valid() {
        return Err(MatchingError::InvalidProtocol(verdict));
    }
    let timeline = simulate(&gadget.instance, protocol).expect("verified protocol simulates");
    let t = gadget.deadline();
    let inst = &gadget.almost;
    let by_size = |sizes: &[usize]| -> HashMap<usize, usize> {
        sizes.iter().enumerate().map(|(i, &s)| (s, i)).collect()
    };
    let (xs, ys) = (by_size(inst.x()), by_size(inst.y()));
    let hub_round = |v: VertexId, hub: VertexId, name: &str| -> Result<usize, MatchingError> {
        if protocol.parent(v) != Some(hub) {
            return Err(MatchingError::NotNormalized(format!(
                "{} is not informed by its hub",
                name
            )));
        }
        Ok(timeline.receive_round(v))
    };
    let mut triples = Vec::with_capacity(inst.m());
    for (slot, &wi) in gadget.w_order.iter().enumerate() {
        let ra = hub_round(gadget.alpha(slot), gadget.s_x, &format!("alpha[{}]", slot + 1))?;
        let rb = hub_round(gadget.beta(slot), gadget.s_y, &format!("beta[{}]", slot + 1))?;
        let lookup = |r: usize, table: &HashMap<usize, usize>, set: &str| {
            (t + 2)
                .checked_sub(r)
                .and_then(|size| table.get(&size).copied())
                .ok_or_else(|| {
                    MatchingError::NotNormalized(format!(
                        "{set} hub round {r} for slot {} matches no element",
                        slot + 1
                    ))
                })
        };
        triples.push(Triple {
            w: wi,
            x: lookup(ra, &xs, "x")?,
            y: lookup(rb, &ys, "y")?,
        });
    }
    Partition::new(inst.m(), triples)
}

/// Audits path lengths, index-set bookkeeping and the deletion structure.
pub fn validate_matching_gadget(gadget: &MatchingGadget) -> GadgetReport {
    let mut r = GadgetReport::default();
    let g = gadget.instance.graph();
    let inst = &gadget.almost;
    let t = gadget.deadline();
    let m = inst.m();
    r.expect(CheckKind::Deadline, || "t = T".into(), inst.target(), Some(t));
    let s = gadget.instance.source();
    r.expect(
        CheckKind::PathLength,
        || "s-s_x".into(),
        2,
        g.distance_within(s, gadget.s_x, 3),
    );
    r.expect(
        CheckKind::PathLength,
        || "s-s_y".into(),
        1,
        g.distance_within(s, gadget.s_y, 2),
    );
    for (slot, &wi) in gadget.w_order.iter().enumerate() {
        let want = inst.threshold().saturating_sub(inst.w()[wi] + 2);
        // The graph distance may shortcut through the hubs, so the recorded
        // path is checked edge by edge.
        r.expect(
            CheckKind::PathLength,
            || format!("alpha[{0}]-beta[{0}]", slot + 1),
            want,
            walk_length(g, &gadget.alpha_beta[slot]),
        );
        r.expect(
            CheckKind::PathLength,
            || format!("s_x-alpha[{}]", slot + 1),
            1,
            g.distance_within(gadget.s_x, gadget.alpha(slot), 1),
        );
        r.expect(
            CheckKind::PathLength,
            || format!("s_y-beta[{}]", slot + 1),
            1,
            g.distance_within(gadget.s_y, gadget.beta(slot), 1),
        );
    }
    let expected_set = |sizes: &[usize]| -> Vec<usize> {
        (1..=t.saturating_sub(2))
            .filter(|j| !sizes.iter().any(|&s| t.checked_sub(s) == Some(*j)))
            .collect()
    };
    for (name, hub, paths, sizes) in [
        ("gamma", gadget.s_x, &gadget.gammas, inst.x()),
        ("delta", gadget.s_y, &gadget.deltas, inst.y()),
    ] {
        let got: Vec<usize> = paths.iter().map(|(j, _)| *j).collect();
        let want = expected_set(sizes);
        r.expect(
            CheckKind::IndexSets,
            || format!("|{name} indices| + m"),
            t.saturating_sub(2),
            Some(got.len() + m),
        );
        r.expect(
            CheckKind::IndexSets,
            || format!("{name} index set matches reserved rounds"),
            1,
            Some((got == want) as usize),
        );
        let dist = g.bfs_distances(hub).expect("hub in range");
        for (j, path) in paths {
            let end = *path.last().expect("non-empty");
            let found = walk_length(g, path).and(dist[end]);
            r.expect(
                CheckKind::PathLength,
                || format!("hub-{name}[{j}]"),
                t - 1 - j,
                found,
            );
        }
    }
    r.expect(
        CheckKind::FeedbackForest,
        || "G - s_x is a forest".into(),
        1,
        Some(g.classify_after_deletion(&[gadget.s_x]).is_forest as usize),
    );
    r.expect(
        CheckKind::DisjointPaths,
        || "G - {s_x, s_y} is a disjoint union of paths".into(),
        1,
        Some(
            g.classify_after_deletion(&[gadget.s_x, gadget.s_y])
                .is_disjoint_paths as usize,
        ),
    );
    r
}

/// Number of edges of `path` if consecutive vertices are adjacent.
fn walk_length(g: &Graph, path: &[VertexId]) -> Option<usize> {
    path.windows(2)
        .all(|w| g.has_edge(w[0], w[1]))
        .then(|| path.len() - 1)
}

impl MatchingGadget {
    /// Rebuilds the gadget structure from an instance, its role map and the
    /// almost instance it encodes.
    pub fn from_parts(
        instance: Instance,
        roles: Vec<MatchRole>,
        almost: AlmostInstance,
    ) -> Result<Self, MatchingError> {
        let bad = |m: String| MatchingError::Roles(m);
        if roles.len() != instance.order() {
            return Err(bad(format!("{} roles for {} vertices", roles.len(), instance.order())));
        }
        let index: HashMap<MatchRole, VertexId> =
            roles.iter().enumerate().map(|(i, &r)| (r, i + 1)).collect();
        let get = |r: MatchRole| index.get(&r).copied().ok_or_else(|| bad(format!("missing {r}")));
        let s = get(MatchRole::Source)?;
        if s != instance.source() {
            return Err(bad("source role does not match instance source".into()));
        }
        let path = |start: VertexId, p: MatchPath, end: VertexId| {
            let mut v = vec![start];
            let mut k = 1;
            while let Some(&x) = index.get(&MatchRole::Interior { path: p, k }) {
                v.push(x);
                k += 1;
            }
            v.push(end);
            v
        };
        let (s_x, s_y) = (get(MatchRole::Sx)?, get(MatchRole::Sy)?);
        let mid = get(MatchRole::Interior {
            path: MatchPath::SourceSx,
            k: 1,
        })?;
        let m = almost.m();
        let mut w_order: Vec<usize> = (0..m).collect();
        w_order.sort_by_key(|&i| almost.w()[i]);
        let mut alpha_beta = Vec::with_capacity(m);
        for slot in 1..=m {
            let a = get(MatchRole::Alpha(slot))?;
            let b = get(MatchRole::Beta(slot))?;
            alpha_beta.push(path(a, MatchPath::AlphaBeta(slot), b));
        }
        let mut gammas = Vec::new();
        let mut deltas = Vec::new();
        for j in 1..=instance.deadline().saturating_sub(2) {
            if let Some(&g) = index.get(&MatchRole::Gamma(j)) {
                gammas.push((j, path(s_x, MatchPath::Gamma(j), g)));
            }
            if let Some(&d) = index.get(&MatchRole::Delta(j)) {
                deltas.push((j, path(s_y, MatchPath::Delta(j), d)));
            }
        }
        Ok(MatchingGadget {
            instance,
            roles,
            almost,
            w_order,
            s_x,
            s_y,
            mid,
            alpha_beta,
            gammas,
            deltas,
        })
    }
}
