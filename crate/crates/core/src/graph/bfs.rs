use std::collections::VecDeque;

use super::{LabeledGraph, NodeOrdering};

/// Id-independent ranking key used to pick BFS roots and order children.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeKey {
    pub degree: usize,
    pub label: u32,
    pub neighborhood_hash: u64,
}

const HASH_ROUNDS: usize = 2;

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Keys for every node: degree, label, and a Weisfeiler-Lehman style hash
/// over two rounds of sorted neighbor labels.
pub fn node_keys(g: &LabeledGraph) -> Vec<NodeKey> {
    let n = g.node_count();
    let mut hash: Vec<u64> = (0..n).map(|v| mix(u64::from(g.label(v)))).collect();
    let mut scratch = Vec::new();
    for _ in 0..HASH_ROUNDS {
        let next = (0..n)
            .map(|v| {
                scratch.clear();
                scratch.extend(g.neighbors(v).iter().map(|&u| hash[u]));
                scratch.sort_unstable();
                scratch
                    .iter()
                    .fold(mix(hash[v] ^ 0x5151), |acc, &h| mix(acc ^ h))
            })
            .collect();
        hash = next;
    }
    (0..n)
        .map(|v| NodeKey {
            degree: g.degree(v),
            label: g.label(v),
            neighborhood_hash: hash[v],
        })
        .collect()
}

/// Breadth-first node ordering with deterministic tie-breaking.
///
/// The root of each component is the unvisited node with the largest key;
/// children are enqueued by key, descending. Equal keys fall back to the
/// smaller id, which is the only place ids influence the result.
pub fn bfs_order(g: &LabeledGraph) -> NodeOrdering {
    let n = g.node_count();
    let keys = node_keys(g);
    let by_key_desc = |a: &usize, b: &usize| keys[*b].cmp(&keys[*a]).then(a.cmp(b));

    let mut roots: Vec<usize> = (0..n).collect();
    roots.sort_by(by_key_desc);

    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    let mut children = Vec::new();
    for &root in &roots {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            children.clear();
            children.extend(g.neighbors(v).iter().copied().filter(|&u| !visited[u]));
            children.sort_by(by_key_desc);
            for &u in &children {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    NodeOrdering(order)
}
