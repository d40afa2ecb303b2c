//! Broadcast protocols in ordered-children normal form.
//!
//! A protocol is a spanning tree rooted at the source in which every vertex
//! keeps an ordered list of its tree children. A vertex informed in round `r`
//! informs its `k`-th child in round `r + k`; the source holds the message at
//! round 0.

use std::fmt;

use thiserror::Error;

use crate::graph::{Instance, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("vertex id {0} out of range")]
    VertexOutOfRange(VertexId),
    #[error("vertex {0} listed as a child more than once")]
    DuplicateChild(VertexId),
    #[error("source {0} listed as a child")]
    SourceIsChild(VertexId),
    #[error("not a spanning tree: vertex {0} is not reached from the source")]
    NotSpanning(VertexId),
    #[error("tree edge {0}-{1} missing from graph")]
    MissingEdge(VertexId, VertexId),
    #[error("protocol has {protocol} vertices but the graph has {graph}")]
    OrderMismatch { protocol: usize, graph: usize },
    #[error("source mismatch: protocol rooted at {protocol}, instance source is {instance}")]
    SourceMismatch {
        protocol: VertexId,
        instance: VertexId,
    },
}

/// Spanning tree rooted at the source plus per-vertex ordered child lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Protocol {
    source: VertexId,
    parent: Vec<Option<VertexId>>,
    children: Vec<Vec<VertexId>>,
}

impl Protocol {
    /// Builds a protocol from ordered child lists. Vertices not mentioned in
    /// `lists` have no children. Structural consistency (single parent per
    /// vertex, ids in range, source never a child) is checked here; spanning
    /// coverage and edge membership are checked against a graph by
    /// [`simulate`].
    pub fn from_children(
        order: usize,
        source: VertexId,
        lists: impl IntoIterator<Item = (VertexId, Vec<VertexId>)>,
    ) -> Result<Self, ProtocolError> {
        let in_range = |v: VertexId| (1..=order).contains(&v);
        if !in_range(source) {
            return Err(ProtocolError::VertexOutOfRange(source));
        }
        let mut parent = vec![None; order + 1];
        let mut children = vec![Vec::new(); order + 1];
        for (v, list) in lists {
            if !in_range(v) {
                return Err(ProtocolError::VertexOutOfRange(v));
            }
            for &c in &list {
                if !in_range(c) {
                    return Err(ProtocolError::VertexOutOfRange(c));
                }
                if c == source {
                    return Err(ProtocolError::SourceIsChild(c));
                }
                if parent[c].is_some() {
                    return Err(ProtocolError::DuplicateChild(c));
                }
                parent[c] = Some(v);
            }
            children[v].extend(list);
        }
        Ok(Protocol {
            source,
            parent,
            children,
        })
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn order(&self) -> usize {
        self.children.len() - 1
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent.get(v).copied().flatten()
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        self.children.get(v).map_or(&[], Vec::as_slice)
    }

    /// Vertices with at least one child, in id order, with their lists.
    pub fn child_lists(&self) -> impl Iterator<Item = (VertexId, &[VertexId])> {
        self.children
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, c)| !c.is_empty())
            .map(|(v, c)| (v, c.as_slice()))
    }

    /// Tree path from the source to `target`, inclusive.
    pub fn tree_path(&self, target: VertexId) -> Result<Vec<VertexId>, ProtocolError> {
        if !(1..=self.order()).contains(&target) {
            return Err(ProtocolError::VertexOutOfRange(target));
        }
        let mut path = vec![target];
        let mut v = target;
        while v != self.source {
            match self.parent(v) {
                Some(p) if path.len() <= self.order() => {
                    path.push(p);
                    v = p;
                }
                _ => return Err(ProtocolError::NotSpanning(target)),
            }
        }
        path.reverse();
        Ok(path)
    }
}

/// Receive rounds produced by simulating a protocol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Timeline {
    receive: Vec<usize>,
    completion: usize,
}

impl Timeline {
    /// Round in which `v` first holds the message (0 for the source).
    pub fn receive_round(&self, v: VertexId) -> usize {
        self.receive[v]
    }

    pub fn completion(&self) -> usize {
        self.completion
    }

    /// Receive rounds indexed by vertex id; slot 0 is unused.
    pub fn rounds(&self) -> &[usize] {
        &self.receive
    }
}

/// Runs `protocol` on `instance`, checking that it is a spanning tree of the
/// instance graph rooted at the instance source.
pub fn simulate(instance: &Instance, protocol: &Protocol) -> Result<Timeline, ProtocolError> {
    let graph = instance.graph();
    if protocol.order() != graph.order() {
        return Err(ProtocolError::OrderMismatch {
            protocol: protocol.order(),
            graph: graph.order(),
        });
    }
    if protocol.source() != instance.source() {
        return Err(ProtocolError::SourceMismatch {
            protocol: protocol.source(),
            instance: instance.source(),
        });
    }
    for (v, list) in protocol.child_lists() {
        if let Some(&c) = list.iter().find(|&&c| !graph.has_edge(v, c)) {
            return Err(ProtocolError::MissingEdge(v, c));
        }
    }
    let n = graph.order();
    let mut receive = vec![usize::MAX; n + 1];
    receive[protocol.source()] = 0;
    let mut stack = vec![protocol.source()];
    let mut completion = 0;
    while let Some(v) = stack.pop() {
        let r = receive[v];
        for (k, &c) in protocol.children(v).iter().enumerate() {
            receive[c] = r + k + 1;
            completion = completion.max(receive[c]);
            stack.push(c);
        }
    }
    if let Some(v) = (1..=n).find(|&v| receive[v] == usize::MAX) {
        return Err(ProtocolError::NotSpanning(v));
    }
    receive[0] = 0;
    Ok(Timeline {
        receive,
        completion,
    })
}

/// Outcome of checking a protocol against an instance deadline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid { completion: usize },
    Exceeds { completion: usize },
    Malformed(ProtocolError),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Valid { completion } => write!(f, "valid, completion={completion}"),
            Verdict::Exceeds { completion } => {
                write!(f, "exceeds deadline, completion={completion}")
            }
            Verdict::Malformed(e) => write!(f, "malformed: {e}"),
        }
    }
}

pub fn verify(instance: &Instance, protocol: &Protocol) -> Verdict {
    match simulate(instance, protocol) {
        Ok(tl) if tl.completion() <= instance.deadline() => Verdict::Valid {
            completion: tl.completion(),
        },
        Ok(tl) => Verdict::Exceeds {
            completion: tl.completion(),
        },
        Err(e) => Verdict::Malformed(e),
    }
}

/// Downtime of the tree path from the source to some vertex: the number of
/// rounds in which the path did not move the message one hop closer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathDowntime {
    pub path: Vec<VertexId>,
    pub downtime: usize,
}

pub fn tree_path_downtime(
    timeline: &Timeline,
    protocol: &Protocol,
    target: VertexId,
) -> Result<PathDowntime, ProtocolError> {
    let path = protocol.tree_path(target)?;
    let hops = path.len() - 1;
    let received = *timeline
        .receive
        .get(target)
        .ok_or(ProtocolError::VertexOutOfRange(target))?;
    Ok(PathDowntime {
        path,
        // simulated rounds always satisfy received >= hops
        downtime: received - hops,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PropellingError {
    #[error("protocol does not inform every vertex by the deadline: {0}")]
    NotValid(Verdict),
    #[error("vertex {target} is at distance {distance} > deadline {deadline}")]
    TooFar {
        target: VertexId,
        distance: usize,
        deadline: usize,
    },
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

/// Checks that the tree path to `target` has downtime at most
/// `t - dist_G(s, target)`. Any protocol meeting the deadline satisfies this
/// for every target.
pub fn check_propelling_bound(
    instance: &Instance,
    protocol: &Protocol,
    target: VertexId,
) -> Result<bool, PropellingError> {
    let verdict = verify(instance, protocol);
    if !verdict.is_valid() {
        return Err(PropellingError::NotValid(verdict));
    }
    let timeline = simulate(instance, protocol)?;
    let dist = instance
        .graph()
        .bfs_distances(instance.source())
        .map_err(|_| ProtocolError::VertexOutOfRange(instance.source()))?;
    let distance = dist
        .get(target)
        .copied()
        .flatten()
        .ok_or(ProtocolError::VertexOutOfRange(target))?;
    let deadline = instance.deadline();
    if distance > deadline {
        return Err(PropellingError::TooFar {
            target,
            distance,
            deadline,
        });
    }
    let pd = tree_path_downtime(&timeline, protocol, target)?;
    Ok(pd.downtime <= deadline - distance)
}
