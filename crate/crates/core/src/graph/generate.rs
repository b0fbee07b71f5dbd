use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::LabeledGraph;

/// Erdős–Rényi style graph: every unordered pair is an edge with
/// probability `edge_prob`, labels uniform over `0..labels`.
pub fn generate_graph(n: usize, edge_prob: f64, labels: u32, seed: u64) -> LabeledGraph {
    build(n, edge_prob, labels, seed, false)
}

/// Same as [`generate_graph`] but a random spanning tree is laid down first,
/// so the result is always connected.
pub fn generate_connected_graph(n: usize, edge_prob: f64, labels: u32, seed: u64) -> LabeledGraph {
    build(n, edge_prob, labels, seed, true)
}

fn build(n: usize, edge_prob: f64, labels: u32, seed: u64, connected: bool) -> LabeledGraph {
    assert!(n >= 1, "graph needs at least one node");
    assert!(labels >= 1, "alphabet needs at least one label");
    let p = edge_prob.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let node_labels: Vec<u32> = (0..n).map(|_| rng.gen_range(0..labels)).collect();

    let mut adj = vec![vec![false; n]; n];
    if connected {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        for i in 1..n {
            let parent = perm[rng.gen_range(0..i)];
            let child = perm[i];
            adj[parent][child] = true;
            adj[child][parent] = true;
        }
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            // draw for every pair so the stream does not depend on the tree
            let coin = rng.gen::<f64>() < p;
            if adj[u][v] || coin {
                edges.push((u, v));
            }
        }
    }
    LabeledGraph::new(node_labels, labels, edges).expect("generator emits valid graphs")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_has_no_edges() {
        let g = generate_graph(1, 0.5, 1, 3);
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn probability_one_gives_complete_graph() {
        let g = generate_graph(5, 1.0, 1, 11);
        assert_eq!(g.edge_count(), 10);
    }

    #[test]
    fn deterministic_for_a_seed() {
        assert_eq!(generate_graph(9, 0.3, 4, 42), generate_graph(9, 0.3, 4, 42));
        assert_ne!(generate_graph(9, 0.3, 4, 42), generate_graph(9, 0.3, 4, 43));
    }

    #[test]
    fn connected_variant_is_connected() {
        for seed in 0..50 {
            let g = generate_connected_graph(8, 0.0, 2, seed);
            assert_eq!(g.edge_count(), 7);
            let order = super::super::bfs_order(&g);
            // BFS from the first root reaches every node: the first
            // component is the whole graph, so every node after the root has
            // a neighbor earlier in the sequence.
            let rank = order.rank_of();
            for &v in &order.as_slice()[1..] {
                assert!(g.neighbors(v).iter().any(|&u| rank[u] < rank[v]));
            }
        }
    }
}
