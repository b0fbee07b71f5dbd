use serde::{Deserialize, Serialize};

use crate::graph::{GraphError, LabeledGraph};

/// Which side of the true distance a reported value lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    Exact,
    Upper,
    Lower,
}

/// One unit-cost edit. Deletions and relabels name nodes of the source
/// graph; insertions name nodes of the target graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum EditOp {
    Relabel { node: usize, label: u32 },
    DeleteNode { node: usize },
    InsertNode { node: usize, label: u32 },
    DeleteEdge { u: usize, v: usize },
    InsertEdge { u: usize, v: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GedResult {
    pub distance: u32,
    pub bound: Bound,
    pub edit_path: Option<Vec<EditOp>>,
    /// Search states expanded (0 for non-search methods).
    pub expanded: u64,
}

impl GedResult {
    pub fn without_path(distance: u32, bound: Bound) -> Self {
        Self {
            distance,
            bound,
            edit_path: None,
            expanded: 0,
        }
    }
}

/// `map[u] = Some(v)` substitutes source node `u` by target node `v`;
/// `None` deletes it. Target nodes without a preimage are inserted.
pub type NodeMap = Vec<Option<usize>>;

fn preimage(map: &[Option<usize>], n2: usize) -> Vec<Option<usize>> {
    let mut inv = vec![None; n2];
    for (u, v) in map.iter().enumerate() {
        if let Some(v) = *v {
            debug_assert!(inv[v].is_none(), "node map must be injective");
            inv[v] = Some(u);
        }
    }
    inv
}

/// The edit operations induced by a node map.
pub fn edit_path(g1: &LabeledGraph, g2: &LabeledGraph, map: &[Option<usize>]) -> Vec<EditOp> {
    assert_eq!(map.len(), g1.node_count(), "map must cover every source node");
    let inv = preimage(map, g2.node_count());
    let mut ops = Vec::new();
    for (u, target) in map.iter().enumerate() {
        match *target {
            Some(v) if g1.label(u) != g2.label(v) => ops.push(EditOp::Relabel {
                node: u,
                label: g2.label(v),
            }),
            Some(_) => {}
            None => ops.push(EditOp::DeleteNode { node: u }),
        }
    }
    for (v, source) in inv.iter().enumerate() {
        if source.is_none() {
            ops.push(EditOp::InsertNode {
                node: v,
                label: g2.label(v),
            });
        }
    }
    for &(u, w) in g1.edges() {
        let kept = matches!((map[u], map[w]), (Some(a), Some(b)) if g2.has_edge(a, b));
        if !kept {
            ops.push(EditOp::DeleteEdge { u, v: w });
        }
    }
    for &(a, b) in g2.edges() {
        let covered = matches!((inv[a], inv[b]), (Some(u), Some(w)) if g1.has_edge(u, w));
        if !covered {
            ops.push(EditOp::InsertEdge { u: a, v: b });
        }
    }
    ops
}

/// Unit cost of the edit path induced by `map`.
pub fn mapping_cost(g1: &LabeledGraph, g2: &LabeledGraph, map: &[Option<usize>]) -> u32 {
    edit_path(g1, g2, map).len() as u32
}

/// Replays an edit path on `g1`, returning a graph that uses `g2`'s ids.
///
/// Substituted nodes take the id of their image; a path produced by
/// [`edit_path`] therefore reproduces `g2` exactly.
pub fn apply_edit_path(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    map: &[Option<usize>],
    ops: &[EditOp],
) -> Result<LabeledGraph, GraphError> {
    let n2 = g2.node_count();
    let mut labels: Vec<Option<u32>> = vec![None; n2];
    let mut new_id = vec![None; g1.node_count()];
    for (u, target) in map.iter().enumerate() {
        if let Some(v) = *target {
            labels[v] = Some(g1.label(u));
            new_id[u] = Some(v);
        }
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut deleted = std::collections::BTreeSet::new();
    for op in ops {
        match *op {
            EditOp::Relabel { node, label } => {
                let v = new_id[node].ok_or(GraphError::DanglingEdge(node, node))?;
                labels[v] = Some(label);
            }
            EditOp::InsertNode { node, label } => labels[node] = Some(label),
            EditOp::DeleteEdge { u, v } => {
                deleted.insert((u.min(v), u.max(v)));
            }
            EditOp::InsertEdge { u, v } => edges.push((u, v)),
            EditOp::DeleteNode { .. } => {}
        }
    }
    for &(u, w) in g1.edges() {
        if deleted.contains(&(u, w)) {
            continue;
        }
        match (new_id[u], new_id[w]) {
            (Some(a), Some(b)) => edges.push((a, b)),
            _ => return Err(GraphError::DanglingEdge(u, w)),
        }
    }
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(v, l)| l.ok_or(GraphError::MissingId(v)))
        .collect::<Result<Vec<_>, _>>()?;
    LabeledGraph::new(labels, g2.num_labels().max(g1.num_labels()), edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_map_costs_nothing() {
        let g = LabeledGraph::from_labels(vec![0, 1, 1], [(0, 1), (1, 2)]).unwrap();
        let map: NodeMap = (0..3).map(Some).collect();
        assert!(edit_path(&g, &g, &map).is_empty());
    }

    #[test]
    fn delete_everything_then_insert_everything() {
        let g1 = LabeledGraph::from_labels(vec![0, 0], [(0, 1)]).unwrap();
        let g2 = LabeledGraph::from_labels(vec![1, 1, 1], [(0, 1), (1, 2)]).unwrap();
        // 2 node deletions + 1 edge deletion + 3 insertions + 2 edge insertions
        assert_eq!(mapping_cost(&g1, &g2, &[None, None]), 8);
    }

    #[test]
    fn replaying_a_path_reaches_the_target() {
        let g1 = LabeledGraph::from_labels(vec![0, 1, 2, 0], [(0, 1), (1, 2), (2, 3)]).unwrap();
        let g2 = LabeledGraph::from_labels(vec![1, 0, 2], [(0, 1), (0, 2), (1, 2)]).unwrap();
        let map = vec![Some(1), None, Some(2), Some(0)];
        let ops = edit_path(&g1, &g2, &map);
        let replayed = apply_edit_path(&g1, &g2, &map, &ops).unwrap();
        assert_eq!(replayed.labels(), g2.labels());
        assert_eq!(replayed.edges(), g2.edges());
    }
}
