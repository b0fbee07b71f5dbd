use serde::{Deserialize, Serialize};

use super::{GraphError, LabeledGraph};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeJson {
    id: i64,
    label: i64,
}

/// Wire form of a graph: `{"nodes":[{"id":..,"label":..}],"edges":[[u,v]]}`.
///
/// `num_labels` is optional and only written when the alphabet is larger
/// than the labels actually used.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    nodes: Vec<NodeJson>,
    edges: Vec<[i64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    num_labels: Option<u32>,
}

fn index(value: i64, what: &str) -> Result<usize, GraphError> {
    usize::try_from(value).map_err(|_| GraphError::Malformed(format!("negative {what}: {value}")))
}

impl GraphJson {
    pub fn into_graph(self) -> Result<LabeledGraph, GraphError> {
        let n = self.nodes.len();
        let mut labels: Vec<Option<u32>> = vec![None; n];
        for node in &self.nodes {
            let id = index(node.id, "node id")?;
            let label = u32::try_from(node.label)
                .map_err(|_| GraphError::Malformed(format!("bad label {}", node.label)))?;
            if id >= n {
                // ids must be exactly 0..n; an id beyond n means one is missing
                let missing = labels.iter().position(Option::is_none).unwrap_or(id);
                if self.nodes.iter().filter(|m| m.id == node.id).count() > 1 {
                    return Err(GraphError::DuplicateId(id));
                }
                return Err(GraphError::MissingId(missing));
            }
            if labels[id].replace(label).is_some() {
                return Err(GraphError::DuplicateId(id));
            }
        }
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let labels: Vec<u32> = labels.into_iter().map(|l| l.expect("all ids seen")).collect();
        let mut edges = Vec::with_capacity(self.edges.len());
        for [a, b] in &self.edges {
            let (a, b) = (index(*a, "edge endpoint")?, index(*b, "edge endpoint")?);
            edges.push((a, b));
        }
        let alphabet = self
            .num_labels
            .unwrap_or_else(|| labels.iter().copied().max().map_or(1, |m| m + 1));
        LabeledGraph::new(labels, alphabet, edges)
    }

    pub fn from_graph(g: &LabeledGraph) -> Self {
        let inferred = g.labels().iter().copied().max().map_or(1, |m| m + 1);
        Self {
            nodes: (0..g.node_count())
                .map(|v| NodeJson {
                    id: v as i64,
                    label: i64::from(g.label(v)),
                })
                .collect(),
            edges: g.edges().iter().map(|&(u, v)| [u as i64, v as i64]).collect(),
            num_labels: (g.num_labels() != inferred).then_some(g.num_labels()),
        }
    }
}

pub fn parse_graph(text: &str) -> Result<LabeledGraph, GraphError> {
    let raw: GraphJson =
        serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))?;
    raw.into_graph()
}

pub fn serialize_graph(g: &LabeledGraph) -> String {
    serde_json::to_string(&GraphJson::from_graph(g)).expect("graph serializes")
}

/// A dataset file is a JSON array of graphs.
pub fn parse_dataset(text: &str) -> Result<Vec<LabeledGraph>, GraphError> {
    let raw: Vec<GraphJson> =
        serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))?;
    raw.into_iter().map(GraphJson::into_graph).collect()
}

pub fn serialize_dataset(graphs: &[LabeledGraph]) -> String {
    let raw: Vec<GraphJson> = graphs.iter().map(GraphJson::from_graph).collect();
    serde_json::to_string(&raw).expect("dataset serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_graph;

    #[test]
    fn minimal_graph() {
        let g = parse_graph(r#"{"nodes":[{"id":0,"label":0}],"edges":[]}"#).unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.num_labels(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn distinct_parse_errors() {
        let cases = [
            (r#"{"nodes":[{"id":0,"label":0}],"edges":"#, "malformed"),
            (r#"{"nodes":[{"id":0,"label":0},{"id":0,"label":1}],"edges":[]}"#, "dup"),
            (r#"{"nodes":[{"id":0,"label":0}],"edges":[[0,1]]}"#, "dangling"),
            (r#"{"nodes":[{"id":0,"label":0},{"id":1,"label":0}],"edges":[[1,1]]}"#, "loop"),
        ];
        for (text, kind) in cases {
            let err = parse_graph(text).unwrap_err();
            let ok = match kind {
                "malformed" => matches!(err, GraphError::Malformed(_)),
                "dup" => matches!(err, GraphError::DuplicateId(0)),
                "dangling" => matches!(err, GraphError::DanglingEdge(0, 1)),
                "loop" => matches!(err, GraphError::SelfLoop(1)),
                _ => unreachable!(),
            };
            assert!(ok, "{kind}: got {err:?}");
        }
    }

    #[test]
    fn non_dense_ids_are_rejected() {
        let err = parse_graph(r#"{"nodes":[{"id":0,"label":0},{"id":2,"label":0}],"edges":[]}"#)
            .unwrap_err();
        assert_eq!(err, GraphError::MissingId(1));
    }

    #[test]
    fn alphabet_of_29_labels() {
        let labels: Vec<u32> = vec![0, 3, 28, 7, 7, 12, 1, 5, 20, 9];
        let g = LabeledGraph::new(labels, 29, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let parsed = parse_graph(&serialize_graph(&g)).unwrap();
        assert_eq!(parsed.num_labels(), 29);
        assert_eq!(parsed.node_count(), 10);

        // labels that never reach 28 keep the declared alphabet too
        let sparse = LabeledGraph::new(vec![0; 10], 29, []).unwrap();
        assert_eq!(parse_graph(&serialize_graph(&sparse)).unwrap().num_labels(), 29);
    }

    #[test]
    fn generator_output_round_trips_textually() {
        for seed in 0..100 {
            let g = generate_graph(1 + (seed as usize % 12), 0.35, 4, seed);
            let text = serialize_graph(&g);
            let back = parse_graph(&text).unwrap();
            assert_eq!(back, g);
            assert_eq!(serialize_graph(&back), text);
        }
    }

    #[test]
    fn dataset_round_trip() {
        let graphs: Vec<_> = (0..5).map(|s| generate_graph(4, 0.5, 2, s)).collect();
        let back = parse_dataset(&serialize_dataset(&graphs)).unwrap();
        assert_eq!(back, graphs);
    }
}
