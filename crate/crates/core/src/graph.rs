//! Undirected simple graphs with 1-based vertex ids, broadcast instances and
//! the structural checks used by the gadget validators.

use std::collections::{HashSet, VecDeque};

use thiserror::Error;

/// Vertex identifier. Ids are dense and 1-based: a graph of order `n` has
/// vertices `1..=n`.
pub type VertexId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex id {0} out of range")]
    VertexOutOfRange(VertexId),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("disconnected graph")]
    Disconnected,
}

/// A simple undirected graph. Equality compares vertex and edge sets, not
/// insertion order.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    // adj[0] is unused so that adj[v] is the neighbour list of vertex v.
    adj: Vec<Vec<VertexId>>,
    edges: Vec<(VertexId, VertexId)>,
    edge_set: HashSet<(VertexId, VertexId)>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edge_set == other.edge_set
    }
}

impl Eq for Graph {}

fn key(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            adj: vec![Vec::new(); n + 1],
            edges: Vec::new(),
            edge_set: HashSet::new(),
        }
    }

    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self, GraphError> {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Appends a fresh isolated vertex and returns its id.
    pub fn add_vertex(&mut self) -> VertexId {
        self.n += 1;
        self.adj.push(Vec::new());
        self.n
    }

    /// Adds the edge `{u, v}`. Multi-edges and loops are rejected.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        let k = key(u, v);
        if !self.edge_set.insert(k) {
            return Err(GraphError::DuplicateEdge(k.0, k.1));
        }
        self.adj[u].push(v);
        self.adj[v].push(u);
        self.edges.push(k);
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        1..=self.n
    }

    /// Edges as `(u, v)` with `u < v`, in insertion order.
    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        (1..=self.n).contains(&v)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.edge_set.contains(&key(u, v))
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange(v))
        }
    }

    /// Hop distances from `source`, indexed by vertex id (slot 0 is always
    /// `None`). Unreachable vertices are `None`.
    pub fn bfs_distances(&self, source: VertexId) -> Result<Vec<Option<usize>>, GraphError> {
        self.check_vertex(source)?;
        let mut dist = vec![None; self.n + 1];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        Ok(dist)
    }

    /// Distance between two vertices, giving up beyond `limit` hops.
    pub fn distance_within(&self, a: VertexId, b: VertexId, limit: usize) -> Option<usize> {
        if !self.contains(a) || !self.contains(b) {
            return None;
        }
        if a == b {
            return Some(0);
        }
        let mut seen = HashSet::from([a]);
        let mut frontier = vec![a];
        for d in 1..=limit {
            let mut next = Vec::new();
            for &u in &frontier {
                for &w in &self.adj[u] {
                    if w == b {
                        return Some(d);
                    }
                    if seen.insert(w) {
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        None
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        match self.bfs_distances(1) {
            Ok(d) => d[1..].iter().all(Option::is_some),
            Err(_) => false,
        }
    }

    /// Largest hop distance from `source`, or `None` if some vertex is
    /// unreachable.
    pub fn eccentricity(&self, source: VertexId) -> Option<usize> {
        let d = self.bfs_distances(source).ok()?;
        d[1..].iter().try_fold(0, |acc, x| x.map(|x| acc.max(x)))
    }

    pub fn is_tree(&self) -> bool {
        self.n >= 1 && self.size() + 1 == self.n && self.is_connected()
    }

    /// Structure of the graph left after removing `delete`. Ids outside the
    /// graph are ignored.
    pub fn classify_after_deletion(&self, delete: &[VertexId]) -> StructureReport {
        let mut gone = vec![false; self.n + 1];
        for &v in delete {
            if self.contains(v) {
                gone[v] = true;
            }
        }
        let mut seen = gone.clone();
        let mut component_count = 0;
        let mut is_forest = true;
        let mut is_disjoint_paths = true;
        for root in 1..=self.n {
            if seen[root] {
                continue;
            }
            component_count += 1;
            seen[root] = true;
            let mut stack = vec![root];
            let (mut verts, mut degree_sum) = (0usize, 0usize);
            while let Some(u) = stack.pop() {
                verts += 1;
                let mut deg = 0;
                for &w in &self.adj[u] {
                    if gone[w] {
                        continue;
                    }
                    deg += 1;
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
                degree_sum += deg;
                if deg > 2 {
                    is_disjoint_paths = false;
                }
            }
            if degree_sum / 2 != verts - 1 {
                is_forest = false;
            }
        }
        StructureReport {
            is_forest,
            is_disjoint_paths: is_disjoint_paths && is_forest,
            component_count,
        }
    }
}

/// Shape of a graph after vertex deletion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructureReport {
    pub is_forest: bool,
    /// Every component is a simple path (acyclic with max degree two).
    pub is_disjoint_paths: bool,
    pub component_count: usize,
}

/// A Telephone Broadcast instance: connected graph, source and deadline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    graph: Graph,
    source: VertexId,
    deadline: usize,
}

impl Instance {
    pub fn new(graph: Graph, source: VertexId, deadline: usize) -> Result<Self, GraphError> {
        if !graph.contains(source) {
            return Err(GraphError::VertexOutOfRange(source));
        }
        if !graph.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(Instance {
            graph,
            source,
            deadline,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn deadline(&self) -> usize {
        self.deadline
    }

    pub fn order(&self) -> usize {
        self.graph.order()
    }

    /// Same graph and source with another deadline.
    pub fn with_deadline(&self, deadline: usize) -> Instance {
        Instance {
            graph: self.graph.clone(),
            source: self.source,
            deadline,
        }
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }
}

/// Common small graphs, used by tests and the generators.
pub mod families {
    use super::{Graph, VertexId};

    pub fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|v| (v, v + 1))).expect("path is simple")
    }

    pub fn cycle(n: usize) -> Graph {
        let mut g = path(n);
        if n >= 3 {
            g.add_edge(n, 1).expect("cycle is simple");
        }
        g
    }

    pub fn complete(n: usize) -> Graph {
        let edges = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v)));
        Graph::from_edges(n, edges).expect("complete graph is simple")
    }

    /// Star with centre 1 and `leaves` leaves `2..=leaves + 1`.
    pub fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (2..=leaves + 1).map(|v| (1, v))).expect("star is simple")
    }

    /// Complete binary tree of the given height in heap order (root 1).
    pub fn complete_binary_tree(height: u32) -> Graph {
        let n = (1usize << (height + 1)) - 1;
        Graph::from_edges(n, (2..=n).map(|v: VertexId| (v / 2, v))).expect("tree is simple")
    }
}

#[cfg(test)]
mod tests {
    use super::families::*;
    use super::*;

    #[test]
    fn bfs_on_small_graphs() {
        let d = path(3).bfs_distances(1).unwrap();
        assert_eq!(d, vec![None, Some(0), Some(1), Some(2)]);

        let d = complete(3).bfs_distances(1).unwrap();
        assert_eq!(d, vec![None, Some(0), Some(1), Some(1)]);

        // star centre 1, leaves 2..4, source a leaf
        let d = star(3).bfs_distances(2).unwrap();
        assert_eq!(d, vec![None, Some(1), Some(0), Some(2), Some(2)]);
    }

    #[test]
    fn bfs_rejects_bad_source() {
        assert_eq!(
            path(3).bfs_distances(4),
            Err(GraphError::VertexOutOfRange(4))
        );
        assert_eq!(
            path(3).bfs_distances(0),
            Err(GraphError::VertexOutOfRange(0))
        );
    }

    #[test]
    fn unreachable_is_none() {
        let g = Graph::from_edges(4, [(1, 2), (3, 4)]).unwrap();
        let d = g.bfs_distances(1).unwrap();
        assert_eq!(d[3], None);
        assert!(!g.is_connected());
        assert_eq!(g.eccentricity(1), None);
    }

    #[test]
    fn rejects_malformed_edges() {
        assert_eq!(
            Graph::from_edges(2, [(1, 1)]),
            Err(GraphError::SelfLoop(1))
        );
        assert_eq!(
            Graph::from_edges(2, [(1, 2), (2, 1)]),
            Err(GraphError::DuplicateEdge(1, 2))
        );
        assert_eq!(
            Graph::from_edges(2, [(1, 3)]),
            Err(GraphError::VertexOutOfRange(3))
        );
    }

    #[test]
    fn instance_requires_connectivity() {
        let g = Graph::from_edges(4, [(1, 2), (3, 4)]).unwrap();
        assert_eq!(Instance::new(g, 1, 2), Err(GraphError::Disconnected));
        assert_eq!(
            Instance::new(path(2), 3, 1),
            Err(GraphError::VertexOutOfRange(3))
        );
    }

    #[test]
    fn deletion_classification() {
        let r = complete(3).classify_after_deletion(&[1]);
        assert!(r.is_forest && r.is_disjoint_paths);
        assert_eq!(r.component_count, 1);

        let r = complete(4).classify_after_deletion(&[4]);
        assert!(!r.is_forest && !r.is_disjoint_paths);

        let r = complete(2).classify_after_deletion(&[1, 2]);
        assert!(r.is_forest && r.is_disjoint_paths);
        assert_eq!(r.component_count, 0);

        // a star is a forest but not a path collection
        let r = star(3).classify_after_deletion(&[]);
        assert!(r.is_forest && !r.is_disjoint_paths);
        let r = star(3).classify_after_deletion(&[1]);
        assert!(r.is_disjoint_paths);
        assert_eq!(r.component_count, 3);
    }

    #[test]
    fn distance_within_limit() {
        let g = path(6);
        assert_eq!(g.distance_within(1, 6, 10), Some(5));
        assert_eq!(g.distance_within(1, 6, 4), None);
        assert_eq!(g.distance_within(3, 3, 0), Some(0));
    }

    #[test]
    fn tree_detection() {
        assert!(path(5).is_tree());
        assert!(complete_binary_tree(2).is_tree());
        assert!(!cycle(4).is_tree());
        assert!(Graph::new(1).is_tree());
    }
}
