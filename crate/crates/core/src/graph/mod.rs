//! Undirected node-labeled graphs and the utilities every other module
//! builds on: deterministic BFS ordering, permutation, generation and the
//! JSON graph format.

mod bfs;
mod generate;
mod io;

pub use bfs::{bfs_order, node_keys, NodeKey};
pub use generate::{generate_connected_graph, generate_graph};
pub use io::{parse_dataset, parse_graph, serialize_dataset, serialize_graph, GraphJson};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("malformed graph text: {0}")]
    Malformed(String),
    #[error("duplicate node id {0}")]
    DuplicateId(usize),
    #[error("node ids are not dense: id {0} missing")]
    MissingId(usize),
    #[error("edge ({0}, {1}) references a node that does not exist")]
    DanglingEdge(usize, usize),
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) listed more than once")]
    DuplicateEdge(usize, usize),
    #[error("graph has no nodes")]
    Empty,
    #[error("label {label} outside alphabet of size {alphabet}")]
    LabelOutOfRange { label: u32, alphabet: u32 },
    #[error("ordering is not a bijection on 0..{0}")]
    NotBijective(usize),
}

/// Undirected graph with integer node labels in `0..num_labels`.
///
/// Node ids are dense (`0..n`). Each edge is stored once as `(u, v)` with
/// `u < v`; adjacency lists are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabeledGraph {
    labels: Vec<u32>,
    num_labels: u32,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl LabeledGraph {
    /// Builds and validates a graph. Edge endpoints may be given in either
    /// order.
    pub fn new(
        labels: Vec<u32>,
        num_labels: u32,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let n = labels.len();
        if n == 0 {
            return Err(GraphError::Empty);
        }
        if let Some(&label) = labels.iter().find(|&&l| l >= num_labels) {
            return Err(GraphError::LabelOutOfRange {
                label,
                alphabet: num_labels,
            });
        }
        let mut adjacency = vec![Vec::new(); n];
        let mut canonical = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(GraphError::DanglingEdge(a, b));
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            canonical.push((u, v));
        }
        canonical.sort_unstable();
        for w in canonical.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
            }
        }
        for &(u, v) in &canonical {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            labels,
            num_labels,
            edges: canonical,
            adjacency,
        })
    }

    /// Graph whose alphabet is inferred as `max label + 1`.
    pub fn from_labels(
        labels: Vec<u32>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let alphabet = labels.iter().copied().max().map_or(1, |m| m + 1);
        Self::new(labels, alphabet, edges)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn num_labels(&self) -> u32 {
        self.num_labels
    }

    pub fn label(&self, node: usize) -> u32 {
        self.labels[node]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Canonical edge list, `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Copy of this graph declared over a (larger) alphabet.
    pub fn with_alphabet(&self, num_labels: u32) -> Result<Self, GraphError> {
        Self::new(self.labels.clone(), num_labels, self.edges.iter().copied())
    }
}

/// Node sequence: `order[rank]` is the original id placed at `rank`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeOrdering(Vec<usize>);

impl NodeOrdering {
    pub fn new(order: Vec<usize>) -> Result<Self, GraphError> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &id in &order {
            if id >= n || seen[id] {
                return Err(GraphError::NotBijective(n));
            }
            seen[id] = true;
        }
        Ok(Self(order))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Node id at `rank`.
    pub fn node_at(&self, rank: usize) -> usize {
        self.0[rank]
    }

    /// `rank_of()[id]` is the position of `id` in the ordering.
    pub fn rank_of(&self) -> Vec<usize> {
        let mut rank = vec![0; self.0.len()];
        for (r, &id) in self.0.iter().enumerate() {
            rank[id] = r;
        }
        rank
    }

    pub fn inverse(&self) -> Self {
        Self(self.rank_of())
    }
}

/// Relabels node ids so that new node `r` is old node `p.node_at(r)`.
pub fn permute_graph(g: &LabeledGraph, p: &NodeOrdering) -> Result<LabeledGraph, GraphError> {
    if p.len() != g.node_count() {
        return Err(GraphError::NotBijective(g.node_count()));
    }
    let rank = p.rank_of();
    let labels = p.as_slice().iter().map(|&old| g.label(old)).collect();
    let edges = g.edges().iter().map(|&(u, v)| (rank[u], rank[v]));
    LabeledGraph::new(labels, g.num_labels(), edges)
}

/// Ground truth attached to a pair of graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroundTruthKind {
    Exact,
    #[serde(rename = "ub")]
    UpperBoundMin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphPair {
    pub g1: LabeledGraph,
    pub g2: LabeledGraph,
    pub ground_truth_ged: Option<u32>,
    pub ground_truth_kind: GroundTruthKind,
}

impl GraphPair {
    pub fn unlabeled(g1: LabeledGraph, g2: LabeledGraph) -> Self {
        Self {
            g1,
            g2,
            ground_truth_ged: None,
            ground_truth_kind: GroundTruthKind::Exact,
        }
    }

    pub fn with_ged(g1: LabeledGraph, g2: LabeledGraph, ged: u32, kind: GroundTruthKind) -> Self {
        Self {
            g1,
            g2,
            ground_truth_ged: Some(ged),
            ground_truth_kind: kind,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> LabeledGraph {
        LabeledGraph::from_labels(vec![0, 1, 2], [(0, 1), (2, 1)]).unwrap()
    }

    #[test]
    fn edges_are_canonical_and_symmetric() {
        let g = path3();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert!(g.has_edge(2, 1) && g.has_edge(1, 2));
        assert!(!g.has_edge(0, 2));
        assert_eq!(g.degree(1), 2);
    }

    #[test]
    fn rejects_invalid_graphs() {
        assert_eq!(
            LabeledGraph::from_labels(vec![], []).unwrap_err(),
            GraphError::Empty
        );
        assert_eq!(
            LabeledGraph::from_labels(vec![0, 0], [(0, 0)]).unwrap_err(),
            GraphError::SelfLoop(0)
        );
        assert_eq!(
            LabeledGraph::from_labels(vec![0, 0], [(0, 2)]).unwrap_err(),
            GraphError::DanglingEdge(0, 2)
        );
        assert_eq!(
            LabeledGraph::from_labels(vec![0, 0], [(0, 1), (1, 0)]).unwrap_err(),
            GraphError::DuplicateEdge(0, 1)
        );
        assert!(matches!(
            LabeledGraph::new(vec![3], 2, []),
            Err(GraphError::LabelOutOfRange { .. })
        ));
    }

    #[test]
    fn identity_and_inverse_permutations() {
        let g = path3();
        assert_eq!(permute_graph(&g, &NodeOrdering::identity(3)).unwrap(), g);
        let p = NodeOrdering::new(vec![2, 0, 1]).unwrap();
        let h = permute_graph(&g, &p).unwrap();
        assert_eq!(h.labels(), &[2, 0, 1]);
        assert_eq!(permute_graph(&h, &p.inverse()).unwrap(), g);
    }

    #[test]
    fn non_bijective_orderings_are_rejected() {
        assert!(NodeOrdering::new(vec![0, 0]).is_err());
        assert!(NodeOrdering::new(vec![0, 2]).is_err());
        let g = path3();
        assert!(permute_graph(&g, &NodeOrdering::identity(2)).is_err());
    }
}
