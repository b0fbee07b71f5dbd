use super::edit::{edit_path, Bound, GedResult};
use super::GedError;
use crate::graph::LabeledGraph;

/// Largest `n1 + n2` the exhaustive oracle accepts.
pub const BRUTEFORCE_MAX_TOTAL_NODES: usize = 12;

/// Exact GED by enumerating every injective partial map from `g1` into
/// `g2`. Exponential; only meant as a reference for the search solvers.
pub fn ged_bruteforce(g1: &LabeledGraph, g2: &LabeledGraph) -> Result<GedResult, GedError> {
    let (n1, n2) = (g1.node_count(), g2.node_count());
    if n1 + n2 > BRUTEFORCE_MAX_TOTAL_NODES {
        return Err(GedError::SizeGuard {
            n1,
            n2,
            limit: BRUTEFORCE_MAX_TOTAL_NODES,
        });
    }
    let mut map = vec![None; n1];
    let mut used = vec![false; n2];
    let mut best: Option<(u32, Vec<Option<usize>>)> = None;
    let mut visited = 0u64;
    enumerate(g1, g2, 0, &mut map, &mut used, &mut best, &mut visited);
    let (_, map) = best.expect("at least the all-delete map exists");
    let path = edit_path(g1, g2, &map);
    Ok(GedResult {
        distance: path.len() as u32,
        bound: Bound::Exact,
        edit_path: Some(path),
        expanded: visited,
    })
}

fn enumerate(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    u: usize,
    map: &mut Vec<Option<usize>>,
    used: &mut [bool],
    best: &mut Option<(u32, Vec<Option<usize>>)>,
    visited: &mut u64,
) {
    if u == map.len() {
        *visited += 1;
        let cost = edit_path(g1, g2, map).len() as u32;
        if best.as_ref().map_or(true, |(b, _)| cost < *b) {
            *best = Some((cost, map.clone()));
        }
        return;
    }
    for v in 0..used.len() {
        if used[v] {
            continue;
        }
        used[v] = true;
        map[u] = Some(v);
        enumerate(g1, g2, u + 1, map, used, best, visited);
        used[v] = false;
    }
    map[u] = None;
    enumerate(g1, g2, u + 1, map, used, best, visited);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_graphs() {
        let g = LabeledGraph::from_labels(vec![0, 1, 0], [(0, 1), (1, 2)]).unwrap();
        assert_eq!(ged_bruteforce(&g, &g).unwrap().distance, 0);
    }

    #[test]
    fn relabel_beats_delete_and_insert() {
        let a = LabeledGraph::from_labels(vec![0], []).unwrap();
        let b = LabeledGraph::new(vec![1], 2, []).unwrap();
        let r = ged_bruteforce(&a, &b).unwrap();
        assert_eq!(r.distance, 1);
        assert_eq!(r.expanded, 2);
    }

    #[test]
    fn size_guard() {
        let big = LabeledGraph::from_labels(vec![0; 7], []).unwrap();
        assert!(matches!(
            ged_bruteforce(&big, &big),
            Err(GedError::SizeGuard { .. })
        ));
    }
}
