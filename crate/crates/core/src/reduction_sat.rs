//! Reduction from (3,3)-SAT to Telephone Broadcast.
//!
//! Variables are grouped into buckets of sizes 1, 2, 4, ... and placed on a
//! complete binary tree rooted at the source: each variable gets a sibling
//! pair `x`, `not_x` whose send order encodes its truth value. Long
//! `gamma`-`delta` paths force the tree to be traversed level by level, and
//! `alpha`-`beta` paths time the literal vertices `y`, `z` so that a clause
//! vertex is reached by the deadline `t = 2l + 6` only through a true
//! literal.
//!
//! Variable positions are heap-ordered: the variable at position `p` sits on
//! level `floor(log2 p) + 1`; the children of `x` at `p` belong to position
//! `2p` and those of `not_x` to `2p + 1`. An input formula's variable `v`
//! occupies position `v`; the remaining positions are dummies.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::gadget::{parse_indices, split_interior, split_label, CheckKind, GadgetReport};
use crate::graph::{Graph, GraphError, Instance, VertexId};
use crate::protocol::{simulate, verify, Protocol, Verdict};
use crate::sat::{validate_33, Assignment, CnfFormula, Literal, Violation33};

fn bit_length(n: usize) -> usize {
    (usize::BITS - n.leading_zeros()) as usize
}

/// Bucket layout for a given number of input variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Buckets {
    levels: usize,
    variables: usize,
}

impl Buckets {
    /// Fills levels `1, 2, ...` with `2^(l-1)` variables each, pads the last
    /// partially filled level with dummies and appends one all-dummy level.
    pub fn new(variables: usize) -> Self {
        Buckets {
            levels: bit_length(variables.max(1)) + 1,
            variables,
        }
    }

    /// Number of levels `l`, including the dummy level.
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn variables(&self) -> usize {
        self.variables
    }

    /// `2l + 6`.
    pub fn deadline(&self) -> usize {
        2 * self.levels + 6
    }

    /// Total number of positions, `2^l - 1`.
    pub fn positions(&self) -> usize {
        (1 << self.levels) - 1
    }

    pub fn bucket_sizes(&self) -> Vec<usize> {
        (1..=self.levels).map(|l| 1 << (l - 1)).collect()
    }

    pub fn dummy_count(&self) -> usize {
        self.positions() - self.variables
    }

    pub fn is_dummy(&self, position: usize) -> bool {
        position > self.variables
    }

    /// `(level, index)` of a position, both 1-based.
    pub fn slot(position: usize) -> (usize, usize) {
        let level = bit_length(position);
        (level, position - (1 << (level - 1)) + 1)
    }

    pub fn position(level: usize, index: usize) -> usize {
        (1 << (level - 1)) + index - 1
    }
}

/// The four kinds of auxiliary paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SatPath {
    AlphaBeta,
    AlphaGamma,
    BetaY,
    GammaDelta,
}

impl SatPath {
    fn tag(self) -> &'static str {
        match self {
            SatPath::AlphaBeta => "ab",
            SatPath::AlphaGamma => "ag",
            SatPath::BetaY => "by",
            SatPath::GammaDelta => "gd",
        }
    }
}

/// Role of a vertex in the SAT gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SatRole {
    Source,
    X { level: usize, index: usize, negated: bool },
    Alpha { level: usize, index: usize, negated: bool },
    Beta { level: usize, index: usize, negated: bool },
    Y { level: usize, index: usize, negated: bool },
    Z { level: usize, index: usize, negated: bool },
    Gamma { level: usize, index: usize },
    Delta { level: usize, index: usize },
    Clause(usize),
    ClausePrime(usize),
    /// `k`-th interior vertex of an auxiliary path, counted from the end
    /// nearer the source.
    Interior {
        path: SatPath,
        level: usize,
        index: usize,
        negated: bool,
        k: usize,
    },
}

impl fmt::Display for SatRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let neg = |n: bool| if n { "not_" } else { "" };
        match *self {
            SatRole::Source => f.write_str("s"),
            SatRole::X { level, index, negated } => write!(f, "{}x[{level},{index}]", neg(negated)),
            SatRole::Alpha { level, index, negated } => {
                write!(f, "{}alpha[{level},{index}]", neg(negated))
            }
            SatRole::Beta { level, index, negated } => {
                write!(f, "{}beta[{level},{index}]", neg(negated))
            }
            SatRole::Y { level, index, negated } => write!(f, "{}y[{level},{index}]", neg(negated)),
            SatRole::Z { level, index, negated } => write!(f, "{}z[{level},{index}]", neg(negated)),
            SatRole::Gamma { level, index } => write!(f, "gamma[{level},{index}]"),
            SatRole::Delta { level, index } => write!(f, "delta[{level},{index}]"),
            SatRole::Clause(j) => write!(f, "c[{j}]"),
            SatRole::ClausePrime(j) => write!(f, "cp[{j}]"),
            SatRole::Interior {
                path,
                level,
                index,
                negated,
                k,
            } => write!(f, "p[{}{}[{level},{index}],{k}]", neg(negated), path.tag()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown role label")]
pub struct RoleParseError;

impl FromStr for SatRole {
    type Err = RoleParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, args) = split_label(s).ok_or(RoleParseError)?;
        if name == "s" && args.is_empty() {
            return Ok(SatRole::Source);
        }
        if name == "p" {
            let (owner, k) = split_interior(args).ok_or(RoleParseError)?;
            let (owner_name, owner_args) = split_label(owner).ok_or(RoleParseError)?;
            let (negated, tag) = match owner_name.strip_prefix("not_") {
                Some(rest) => (true, rest),
                None => (false, owner_name),
            };
            let path = match tag {
                "ab" => SatPath::AlphaBeta,
                "ag" => SatPath::AlphaGamma,
                "by" => SatPath::BetaY,
                "gd" if !negated => SatPath::GammaDelta,
                _ => return Err(RoleParseError),
            };
            let [level, index] = parse_indices(owner_args)
                .and_then(|v| <[usize; 2]>::try_from(v).ok())
                .ok_or(RoleParseError)?;
            return Ok(SatRole::Interior {
                path,
                level,
                index,
                negated,
                k,
            });
        }
        let idx = parse_indices(args).ok_or(RoleParseError)?;
        let (negated, base) = match name.strip_prefix("not_") {
            Some(rest) => (true, rest),
            None => (false, name),
        };
        match (base, negated, idx.as_slice()) {
            ("c", false, &[j]) => Ok(SatRole::Clause(j)),
            ("cp", false, &[j]) => Ok(SatRole::ClausePrime(j)),
            ("gamma", false, &[level, index]) => Ok(SatRole::Gamma { level, index }),
            ("delta", false, &[level, index]) => Ok(SatRole::Delta { level, index }),
            ("x", _, &[level, index]) => Ok(SatRole::X { level, index, negated }),
            ("alpha", _, &[level, index]) => Ok(SatRole::Alpha { level, index, negated }),
            ("beta", _, &[level, index]) => Ok(SatRole::Beta { level, index, negated }),
            ("y", _, &[level, index]) => Ok(SatRole::Y { level, index, negated }),
            ("z", _, &[level, index]) => Ok(SatRole::Z { level, index, negated }),
            _ => Err(RoleParseError),
        }
    }
}

/// Which literal slot of a variable a clause is wired to: `Y` for the first
/// appearance of that polarity, `Z` for the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Y,
    Z,
}

/// Vertices on one literal side (`x` or `not_x`) of a variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiteralSide {
    pub x: VertexId,
    pub alpha: VertexId,
    pub beta: VertexId,
    pub y: VertexId,
    pub y_mid: VertexId,
    pub z: VertexId,
    pub gamma_mid: VertexId,
    /// `alpha ..= beta`.
    pub alpha_beta: Vec<VertexId>,
}

impl LiteralSide {
    pub fn slot(&self, slot: Slot) -> VertexId {
        match slot {
            Slot::Y => self.y,
            Slot::Z => self.z,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableBlock {
    pub level: usize,
    pub index: usize,
    /// `[positive, negated]`.
    pub sides: [LiteralSide; 2],
    pub gamma: VertexId,
    pub delta: VertexId,
    /// `gamma ..= delta`.
    pub gamma_delta: Vec<VertexId>,
}

impl VariableBlock {
    pub fn side(&self, negated: bool) -> &LiteralSide {
        &self.sides[negated as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseBlock {
    pub c: VertexId,
    pub c_prime: VertexId,
    /// Literals of the clause and the slot each is wired through.
    pub wiring: Vec<(Literal, Slot)>,
}

/// The constructed instance with every vertex labelled.
#[derive(Debug, Clone)]
pub struct SatGadget {
    pub instance: Instance,
    /// Role of vertex `v` at index `v - 1`.
    pub roles: Vec<SatRole>,
    pub buckets: Buckets,
    /// Block for position `p` at index `p - 1`.
    pub blocks: Vec<VariableBlock>,
    pub clauses: Vec<ClauseBlock>,
}

impl SatGadget {
    pub fn deadline(&self) -> usize {
        self.instance.deadline()
    }

    pub fn source(&self) -> VertexId {
        self.instance.source()
    }

    pub fn block(&self, position: usize) -> &VariableBlock {
        &self.blocks[position - 1]
    }

    pub fn role(&self, v: VertexId) -> SatRole {
        self.roles[v - 1]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatReductionError {
    #[error("formula violates the (3,3) slot capacity: {}", join(.0))]
    Shape(Vec<Violation33>),
    #[error("clause {0} has no literals")]
    EmptyClause(usize),
    #[error("assignment covers {got} variables, formula has {expected}")]
    AssignmentLength { expected: usize, got: usize },
    #[error("assignment does not satisfy clause {0}")]
    Unsatisfied(usize),
    #[error("protocol does not broadcast within the deadline: {0}")]
    InvalidProtocol(Verdict),
    #[error("role map does not describe a SAT gadget: {0}")]
    Roles(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Length of the `alpha`-`beta` path on `level`: `t - 2 level - 5`.
pub fn alpha_beta_length(t: usize, level: usize) -> usize {
    t - 2 * level - 5
}

/// Length of the `gamma`-`delta` path on `level`: `t - 2 level - 2`.
pub fn gamma_delta_length(t: usize, level: usize) -> usize {
    t - 2 * level - 2
}

struct Builder {
    graph: Graph,
    roles: Vec<SatRole>,
}

impl Builder {
    fn vertex(&mut self, role: SatRole) -> VertexId {
        self.roles.push(role);
        self.graph.add_vertex()
    }

    fn edge(&mut self, u: VertexId, v: VertexId) {
        self.graph.add_edge(u, v).expect("gadget edges are fresh");
    }

    /// Path of `len` edges from `start` to a new vertex with role `end`.
    fn path(
        &mut self,
        start: VertexId,
        len: usize,
        end: SatRole,
        interior: impl Fn(usize) -> SatRole,
    ) -> Vec<VertexId> {
        let mut verts = vec![start];
        for k in 1..len {
            let v = self.vertex(interior(k));
            self.edge(verts[k - 1], v);
            verts.push(v);
        }
        let last = self.vertex(end);
        self.edge(*verts.last().expect("non-empty"), last);
        verts.push(last);
        verts
    }
}

/// Builds the broadcast instance for a gadget-ready formula (see
/// [`crate::sat::normalize`]).
pub fn build_sat_gadget(cnf: &CnfFormula) -> Result<SatGadget, SatReductionError> {
    if let Some(j) = cnf.clauses().iter().position(Vec::is_empty) {
        return Err(SatReductionError::EmptyClause(j + 1));
    }
    let violations = validate_33(cnf);
    if !violations.is_empty() {
        return Err(SatReductionError::Shape(violations));
    }
    let buckets = Buckets::new(cnf.variable_count());
    let t = buckets.deadline();
    let mut b = Builder {
        graph: Graph::new(0),
        roles: Vec::new(),
    };
    let s = b.vertex(SatRole::Source);

    let mut blocks: Vec<VariableBlock> = Vec::with_capacity(buckets.positions());
    for pos in 1..=buckets.positions() {
        let (level, index) = Buckets::slot(pos);
        let parent = if pos == 1 {
            s
        } else {
            blocks[pos / 2 - 1].sides[pos % 2].x
        };
        let xs = [false, true].map(|negated| {
            let x = b.vertex(SatRole::X { level, index, negated });
            b.edge(parent, x);
            x
        });
        let gamma = b.vertex(SatRole::Gamma { level, index });
        let sides = [false, true].map(|negated| {
            let x = xs[negated as usize];
            let alpha = b.vertex(SatRole::Alpha { level, index, negated });
            b.edge(x, alpha);
            let alpha_beta = b.path(
                alpha,
                alpha_beta_length(t, level),
                SatRole::Beta { level, index, negated },
                |k| SatRole::Interior { path: SatPath::AlphaBeta, level, index, negated, k },
            );
            let beta = *alpha_beta.last().expect("non-empty");
            let by = b.path(
                beta,
                2,
                SatRole::Y { level, index, negated },
                |k| SatRole::Interior { path: SatPath::BetaY, level, index, negated, k },
            );
            let z = b.vertex(SatRole::Z { level, index, negated });
            b.edge(beta, z);
            let gamma_mid = b.vertex(SatRole::Interior {
                path: SatPath::AlphaGamma,
                level,
                index,
                negated,
                k: 1,
            });
            b.edge(alpha, gamma_mid);
            b.edge(gamma_mid, gamma);
            LiteralSide {
                x,
                alpha,
                beta,
                y: by[2],
                y_mid: by[1],
                z,
                gamma_mid,
                alpha_beta,
            }
        });
        let gamma_delta = b.path(
            gamma,
            gamma_delta_length(t, level),
            SatRole::Delta { level, index },
            |k| SatRole::Interior {
                path: SatPath::GammaDelta,
                level,
                index,
                negated: false,
                k,
            },
        );
        blocks.push(VariableBlock {
            level,
            index,
            sides,
            gamma,
            delta: *gamma_delta.last().expect("non-empty"),
            gamma_delta,
        });
    }

    let mut seen = vec![[0usize; 2]; cnf.variable_count() + 1];
    let mut clauses = Vec::with_capacity(cnf.clauses().len());
    for (j, clause) in cnf.clauses().iter().enumerate() {
        let c = b.vertex(SatRole::Clause(j + 1));
        let c_prime = b.vertex(SatRole::ClausePrime(j + 1));
        b.edge(c, c_prime);
        let mut wiring = Vec::with_capacity(clause.len());
        for &lit in clause {
            let polarity = !lit.is_positive() as usize;
            let slot = if seen[lit.var()][polarity] == 0 {
                Slot::Y
            } else {
                Slot::Z
            };
            seen[lit.var()][polarity] += 1;
            let v = blocks[lit.var() - 1].side(!lit.is_positive()).slot(slot);
            b.edge(v, c);
            wiring.push((lit, slot));
        }
        clauses.push(ClauseBlock { c, c_prime, wiring });
    }

    let instance = Instance::new(b.graph, s, t)?;
    Ok(SatGadget {
        instance,
        roles: b.roles,
        buckets,
        blocks,
        clauses,
    })
}

/// Forward direction: a satisfying assignment yields a protocol meeting the
/// deadline. Dummy variables are set to true.
///
/// At every tree node the true literal is informed first. The early vertex
/// of a pair calls its `alpha` immediately and then its tree children; the
/// late one calls its tree children first. The early `alpha` feeds `gamma`
/// (which runs toward `delta` and then reaches the other side's midpoint)
/// before starting down its `beta` path; each `beta` calls `y` then `z`; and
/// each clause is reached through its first true literal.
pub fn protocol_from_assignment(
    gadget: &SatGadget,
    pi: &Assignment,
) -> Result<Protocol, SatReductionError> {
    let real = gadget.buckets.variables();
    if pi.len() < real {
        return Err(SatReductionError::AssignmentLength {
            expected: real,
            got: pi.len(),
        });
    }
    let value = |pos: usize| pos > real || pi.get(pos);
    let order = gadget.instance.order();
    let mut lists: Vec<Vec<VertexId>> = vec![Vec::new(); order + 1];

    // Sides of position p as (early, late).
    let sides = |pos: usize| {
        let block = gadget.block(pos);
        let truth = value(pos);
        (block.side(!truth), block.side(truth))
    };
    let pair = |pos: usize| {
        let (early, late) = sides(pos);
        [early.x, late.x]
    };
    let positions = gadget.buckets.positions();
    let tree_children = |pos: usize, negated: bool| -> Vec<VertexId> {
        let child = 2 * pos + negated as usize;
        if child <= positions {
            pair(child).to_vec()
        } else {
            Vec::new()
        }
    };

    lists[gadget.source()] = pair(1).to_vec();
    for pos in 1..=positions {
        let block = gadget.block(pos);
        let truth = value(pos);
        let (early, late) = sides(pos);

        lists[early.x].push(early.alpha);
        lists[early.x].extend(tree_children(pos, !truth));
        lists[late.x].extend(tree_children(pos, truth));
        lists[late.x].push(late.alpha);

        lists[early.alpha] = vec![early.gamma_mid, early.alpha_beta[1]];
        lists[early.gamma_mid] = vec![block.gamma];
        lists[block.gamma] = vec![block.gamma_delta[1], late.gamma_mid];
        lists[late.alpha] = vec![late.alpha_beta[1]];
        for side in &block.sides {
            for w in side.alpha_beta[1..].windows(2) {
                lists[w[0]] = vec![w[1]];
            }
            lists[side.beta] = vec![side.y_mid, side.z];
            lists[side.y_mid] = vec![side.y];
        }
        for w in block.gamma_delta[1..].windows(2) {
            lists[w[0]] = vec![w[1]];
        }
    }

    for (j, clause) in gadget.clauses.iter().enumerate() {
        let (lit, slot) = clause
            .wiring
            .iter()
            .copied()
            .find(|&(lit, _)| value(lit.var()) == lit.is_positive())
            .ok_or(SatReductionError::Unsatisfied(j + 1))?;
        let via = gadget.block(lit.var()).side(!lit.is_positive()).slot(slot);
        lists[via].push(clause.c);
        lists[clause.c] = vec![clause.c_prime];
    }

    let protocol = Protocol::from_children(order, gadget.source(), lists.into_iter().enumerate().skip(1))
        .expect("gadget protocol is a tree");
    Ok(protocol)
}

/// Backward direction: reads a truth value off each pair of tree vertices.
/// A variable on level `l` is true iff its `x` vertex is informed in round
/// `2l - 1`. Only the input variables are returned.
pub fn assignment_from_protocol(
    gadget: &SatGadget,
    protocol: &Protocol,
) -> Result<Assignment, SatReductionError> {
    let verdict = verify(&gadget.instance, protocol);
    if !verdict.is_valid() {
        return Err(SatReductionError::InvalidProtocol(verdict));
    }
    let timeline = simulate(&gadget.instance, protocol).expect("verified protocol simulates");
    let values = (1..=gadget.buckets.variables())
        .map(|pos| {
            let block = gadget.block(pos);
            timeline.receive_round(block.sides[0].x) == 2 * block.level - 1
        })
        .collect();
    Ok(Assignment::new(values))
}

/// Audits distances and path lengths of a gadget.
pub fn validate_sat_gadget(gadget: &SatGadget) -> GadgetReport {
    let mut report = GadgetReport::default();
    let g = gadget.instance.graph();
    let t = gadget.deadline();
    let levels = gadget.buckets.levels();
    report.expect(CheckKind::Deadline, || "t = 2l + 6".into(), 2 * levels + 6, Some(t));

    let s = gadget.source();
    let (dist, paths) = shortest_path_counts(g, s);
    let d = |v: VertexId| dist[v];
    for (p, block) in gadget.blocks.iter().enumerate() {
        let (level, index) = (block.level, block.index);
        let name = |what: &str| format!("{what}[{level},{index}] (position {})", p + 1);
        for side in &block.sides {
            report.expect(CheckKind::TreeLevel, || name("x"), level, d(side.x));
        }
        let target = t + 1 - level;
        let found = d(block.delta);
        report.expect(CheckKind::DeltaDistance, || name("delta"), target, found);
        if let Some(found) = found {
            let through = |x: VertexId| {
                d(x).and_then(|dx| g.distance_within(x, block.delta, found).map(|r| dx + r))
                    == Some(found)
            };
            let via = block.sides.iter().filter(|side| through(side.x)).count();
            report.expect(
                CheckKind::DeltaPathCount,
                || name("shortest s-delta paths"),
                2,
                Some(paths[block.delta] as usize),
            );
            report.expect(
                CheckKind::DeltaPathCount,
                || name("sides on shortest s-delta paths"),
                2,
                Some(via),
            );
        }
        let ab = alpha_beta_length(t, level);
        for (negated, side) in block.sides.iter().enumerate() {
            let tag = if negated == 1 { "not_" } else { "" };
            report.expect(
                CheckKind::AlphaBeta,
                || name(&format!("{tag}alpha-{tag}beta")),
                ab,
                g.distance_within(side.alpha, side.beta, ab + 1),
            );
            report.expect(
                CheckKind::AlphaGamma,
                || name(&format!("{tag}alpha-gamma")),
                2,
                g.distance_within(side.alpha, block.gamma, 3),
            );
            report.expect(
                CheckKind::BetaSlot,
                || name(&format!("{tag}beta-{tag}y")),
                2,
                g.distance_within(side.beta, side.y, 3),
            );
            report.expect(
                CheckKind::BetaSlot,
                || name(&format!("{tag}beta-{tag}z")),
                1,
                g.distance_within(side.beta, side.z, 2),
            );
        }
        let gd = gamma_delta_length(t, level);
        report.expect(
            CheckKind::GammaDelta,
            || name("gamma-delta"),
            gd,
            g.distance_within(block.gamma, block.delta, gd + 1),
        );
    }

    // Route timing to c'_j: the early literal vertex is informed in round
    // 2l - 1, one round is spent calling alpha and one more on the gamma
    // branch, then the alpha-beta path and the slot, clause and clause-prime
    // hops follow.
    for (j, clause) in gadget.clauses.iter().enumerate() {
        for &(lit, slot) in &clause.wiring {
            let block = gadget.block(lit.var());
            let side = block.side(!lit.is_positive());
            let v = side.slot(slot);
            let hops = [
                g.distance_within(side.x, side.alpha, 1),
                g.distance_within(side.alpha, side.beta, t),
                g.distance_within(side.beta, v, 2),
                g.distance_within(v, clause.c, 1),
                g.distance_within(clause.c, clause.c_prime, 1),
            ];
            let found = hops
                .iter()
                .try_fold(2 * block.level - 1 + 1, |acc, h| h.map(|h| acc + h));
            let expected = match slot {
                Slot::Y => t,
                Slot::Z => t - 1,
            };
            report.expect(
                CheckKind::ClauseRoute,
                || format!("clause {} via literal {lit} ({slot:?})", j + 1),
                expected,
                found,
            );
        }
    }
    report
}

/// BFS distances and saturating shortest-path counts from `s`.
fn shortest_path_counts(g: &Graph, s: VertexId) -> (Vec<Option<usize>>, Vec<u64>) {
    let dist = g.bfs_distances(s).expect("source in range");
    let mut order: Vec<VertexId> = g.vertices().filter(|&v| dist[v].is_some()).collect();
    order.sort_by_key(|&v| dist[v]);
    let mut count = vec![0u64; g.order() + 1];
    count[s] = 1;
    for &v in &order {
        for &w in g.neighbors(v) {
            if dist[w] == dist[v].map(|d| d + 1) {
                count[w] = count[w].saturating_add(count[v]);
            }
        }
    }
    (dist, count)
}

impl SatGadget {
    /// Rebuilds the gadget structure from an instance and its role map, for
    /// auditing gadgets read from files.
    pub fn from_parts(instance: Instance, roles: Vec<SatRole>) -> Result<Self, SatReductionError> {
        let bad = |m: String| SatReductionError::Roles(m);
        if roles.len() != instance.order() {
            return Err(bad(format!(
                "{} roles for {} vertices",
                roles.len(),
                instance.order()
            )));
        }
        let index: HashMap<SatRole, VertexId> =
            roles.iter().enumerate().map(|(i, &r)| (r, i + 1)).collect();
        let get = |r: SatRole| index.get(&r).copied().ok_or_else(|| bad(format!("missing {r}")));
        if get(SatRole::Source)? != instance.source() {
            return Err(bad("source role does not match instance source".into()));
        }
        let levels = roles
            .iter()
            .filter_map(|r| match r {
                SatRole::X { level, .. } => Some(*level),
                _ => None,
            })
            .max()
            .ok_or_else(|| bad("no tree vertices".into()))?;
        let buckets = Buckets::new((1 << (levels - 1)) - 1);

        let interior_path = |path: SatPath, level, slot: usize, negated, start, end| {
            let mut verts = vec![start];
            let mut k = 1;
            while let Some(&v) = index.get(&SatRole::Interior {
                path,
                level,
                index: slot,
                negated,
                k,
            }) {
                verts.push(v);
                k += 1;
            }
            verts.push(end);
            verts
        };
        let mut blocks = Vec::with_capacity(buckets.positions());
        for pos in 1..=buckets.positions() {
            let (level, idx) = Buckets::slot(pos);
            let gamma = get(SatRole::Gamma { level, index: idx })?;
            let delta = get(SatRole::Delta { level, index: idx })?;
            let mut sides = Vec::with_capacity(2);
            for negated in [false, true] {
                let alpha = get(SatRole::Alpha { level, index: idx, negated })?;
                let beta = get(SatRole::Beta { level, index: idx, negated })?;
                let y_mid = get(SatRole::Interior {
                    path: SatPath::BetaY,
                    level,
                    index: idx,
                    negated,
                    k: 1,
                })?;
                let gamma_mid = get(SatRole::Interior {
                    path: SatPath::AlphaGamma,
                    level,
                    index: idx,
                    negated,
                    k: 1,
                })?;
                sides.push(LiteralSide {
                    x: get(SatRole::X { level, index: idx, negated })?,
                    alpha,
                    beta,
                    y: get(SatRole::Y { level, index: idx, negated })?,
                    y_mid,
                    z: get(SatRole::Z { level, index: idx, negated })?,
                    gamma_mid,
                    alpha_beta: interior_path(SatPath::AlphaBeta, level, idx, negated, alpha, beta),
                });
            }
            let sides: [LiteralSide; 2] = sides.try_into().expect("two sides");
            blocks.push(VariableBlock {
                level,
                index: idx,
                sides,
                gamma,
                delta,
                gamma_delta: interior_path(SatPath::GammaDelta, level, idx, false, gamma, delta),
            });
        }

        let g = instance.graph();
        let mut clauses = Vec::new();
        for j in 1.. {
            let Some(&c) = index.get(&SatRole::Clause(j)) else {
                break;
            };
            let c_prime = get(SatRole::ClausePrime(j))?;
            let mut wiring: Vec<(Literal, Slot)> = g
                .neighbors(c)
                .iter()
                .filter_map(|&v| match roles[v - 1] {
                    SatRole::Y { level, index, negated } => {
                        Some((Literal::new(Buckets::position(level, index), !negated), Slot::Y))
                    }
                    SatRole::Z { level, index, negated } => {
                        Some((Literal::new(Buckets::position(level, index), !negated), Slot::Z))
                    }
                    _ => None,
                })
                .collect();
            wiring.sort_by_key(|&(l, s)| (l, s == Slot::Z));
            clauses.push(ClauseBlock { c, c_prime, wiring });
        }

        Ok(SatGadget {
            instance,
            roles,
            buckets,
            blocks,
            clauses,
        })
    }
}
