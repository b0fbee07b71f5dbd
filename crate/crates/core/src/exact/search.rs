use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::edit::{edit_path, Bound, GedResult, NodeMap};
use super::GedError;
use crate::graph::{bfs_order, LabeledGraph};

/// Beam width that never truncates a level.
pub const UNBOUNDED_WIDTH: usize = usize::MAX;

const NO_PARENT: u32 = u32::MAX;
const EPSILON: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AStarOptions {
    /// Refuse inputs whose larger graph exceeds this many nodes.
    pub max_nodes: usize,
    /// Expansion cap; hitting it is reported as an error.
    pub max_expanded: u64,
    /// A known upper bound; states with `g + h` above it are never queued.
    pub upper_bound: Option<u32>,
    /// Check `h` against an exhaustive completion for every expanded state.
    /// Exponential, test use only.
    pub audit_heuristic: bool,
}

impl Default for AStarOptions {
    fn default() -> Self {
        Self {
            max_nodes: 10,
            max_expanded: 2_000_000,
            upper_bound: None,
            audit_heuristic: false,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct State {
    parent: u32,
    target: u32,
    depth: u16,
    g: u32,
    h: u32,
    /// Target edges with both endpoints already used.
    target_edges_used: u32,
}

impl State {
    fn f(&self) -> u32 {
        self.g + self.h
    }
}

/// Precomputed data shared by every state of one search.
struct Search<'a> {
    g1: &'a LabeledGraph,
    g2: &'a LabeledGraph,
    order: Vec<usize>,
    rank: Vec<usize>,
    target_order: Vec<usize>,
    alphabet: usize,
    /// `source_suffix_labels[d]`: label histogram of `order[d..]`.
    source_suffix_labels: Vec<Vec<u32>>,
    /// `source_prefix_edges[d]`: source edges inside `order[..d]`.
    source_prefix_edges: Vec<u32>,
    target_labels: Vec<u32>,
    states: Vec<State>,
    // scratch, rebuilt per expansion
    map: Vec<Option<usize>>,
    inverse: Vec<Option<usize>>,
    used_labels: Vec<u32>,
}

impl<'a> Search<'a> {
    fn new(g1: &'a LabeledGraph, g2: &'a LabeledGraph) -> Self {
        let (n1, n2) = (g1.node_count(), g2.node_count());
        let order = bfs_order(g1).as_slice().to_vec();
        let mut rank = vec![0; n1];
        for (r, &u) in order.iter().enumerate() {
            rank[u] = r;
        }
        let alphabet = g1.num_labels().max(g2.num_labels()) as usize;
        let mut source_suffix_labels = vec![vec![0u32; alphabet]; n1 + 1];
        for d in (0..n1).rev() {
            let mut hist = source_suffix_labels[d + 1].clone();
            hist[g1.label(order[d]) as usize] += 1;
            source_suffix_labels[d] = hist;
        }
        let mut source_prefix_edges = vec![0u32; n1 + 1];
        for d in 0..n1 {
            let u = order[d];
            let back = g1.neighbors(u).iter().filter(|&&w| rank[w] < d).count() as u32;
            source_prefix_edges[d + 1] = source_prefix_edges[d] + back;
        }
        let mut target_labels = vec![0u32; alphabet];
        for v in 0..n2 {
            target_labels[g2.label(v) as usize] += 1;
        }
        Self {
            g1,
            g2,
            order,
            rank,
            target_order: bfs_order(g2).as_slice().to_vec(),
            alphabet,
            source_suffix_labels,
            source_prefix_edges,
            target_labels,
            states: Vec::new(),
            map: vec![None; n1],
            inverse: vec![None; n2],
            used_labels: vec![0; alphabet],
        }
    }

    fn root(&self) -> State {
        let mut root = State {
            parent: NO_PARENT,
            target: EPSILON,
            depth: 0,
            g: 0,
            h: 0,
            target_edges_used: 0,
        };
        root.h = self.heuristic(0, &self.target_labels, self.g2.node_count(), 0);
        root
    }

    /// Lower bound on the cost of finishing a state at `depth`, given the
    /// histogram of unused target labels. Node and edge edits are disjoint
    /// cost classes, so their bounds add.
    fn heuristic(&self, depth: usize, free_labels: &[u32], free_nodes: usize, target_edges_used: u32) -> u32 {
        let remaining = &self.source_suffix_labels[depth];
        let common: u32 = remaining
            .iter()
            .zip(free_labels)
            .map(|(&a, &b)| a.min(b))
            .sum();
        let source_left = (self.order.len() - depth) as u32;
        let node_bound = source_left.max(free_nodes as u32) - common;
        let source_edges = self.g1.edge_count() as u32 - self.source_prefix_edges[depth];
        let target_edges = self.g2.edge_count() as u32 - target_edges_used;
        node_bound + source_edges.abs_diff(target_edges)
    }

    /// Rebuilds the partial map of `idx` into the scratch buffers.
    fn load(&mut self, idx: usize) {
        for d in 0..self.order.len() {
            self.map[self.order[d]] = None;
        }
        self.inverse.iter_mut().for_each(|x| *x = None);
        self.used_labels.iter_mut().for_each(|x| *x = 0);
        let mut cursor = idx as u32;
        while cursor != NO_PARENT {
            let s = self.states[cursor as usize];
            if s.depth > 0 {
                let u = self.order[s.depth as usize - 1];
                if s.target != EPSILON {
                    let v = s.target as usize;
                    self.map[u] = Some(v);
                    self.inverse[v] = Some(u);
                    self.used_labels[self.g2.label(v) as usize] += 1;
                }
            }
            cursor = s.parent;
        }
    }

    /// Children of the loaded state `idx`, targets in target BFS order, the
    /// deletion last.
    fn children(&self, idx: usize, out: &mut Vec<State>) {
        let parent = self.states[idx];
        let d = parent.depth as usize;
        let u = self.order[d];
        let used_count: usize = self.used_labels.iter().map(|&c| c as usize).sum();
        let mut free = vec![0u32; self.alphabet];
        for l in 0..self.alphabet {
            free[l] = self.target_labels[l] - self.used_labels[l];
        }
        let free_nodes = self.g2.node_count() - used_count;

        for &v in &self.target_order {
            if self.inverse[v].is_some() {
                continue;
            }
            let mut cost = u32::from(self.g1.label(u) != self.g2.label(v));
            for &w in self.g1.neighbors(u) {
                if self.rank[w] < d {
                    let kept = matches!(self.map[w], Some(x) if self.g2.has_edge(v, x));
                    cost += u32::from(!kept);
                }
            }
            let mut closed = 0;
            for &x in self.g2.neighbors(v) {
                if let Some(w) = self.inverse[x] {
                    closed += 1;
                    cost += u32::from(!self.g1.has_edge(u, w));
                }
            }
            let label = self.g2.label(v) as usize;
            free[label] -= 1;
            let edges_used = parent.target_edges_used + closed;
            let h = self.heuristic(d + 1, &free, free_nodes - 1, edges_used);
            free[label] += 1;
            out.push(State {
                parent: idx as u32,
                target: v as u32,
                depth: (d + 1) as u16,
                g: parent.g + cost,
                h,
                target_edges_used: edges_used,
            });
        }

        let back_edges = self
            .g1
            .neighbors(u)
            .iter()
            .filter(|&&w| self.rank[w] < d)
            .count() as u32;
        out.push(State {
            parent: idx as u32,
            target: EPSILON,
            depth: (d + 1) as u16,
            g: parent.g + 1 + back_edges,
            h: self.heuristic(d + 1, &free, free_nodes, parent.target_edges_used),
            target_edges_used: parent.target_edges_used,
        });
    }

    fn node_map(&mut self, idx: usize) -> NodeMap {
        self.load(idx);
        self.map.clone()
    }

    /// Exhaustive best completion of the loaded partial map (audit only).
    fn best_completion(&self, depth: usize) -> u32 {
        let mut map = self.map.clone();
        let mut used: Vec<bool> = self.inverse.iter().map(Option::is_some).collect();
        let mut best = u32::MAX;
        self.complete(depth, &mut map, &mut used, &mut best);
        best
    }

    fn complete(&self, depth: usize, map: &mut Vec<Option<usize>>, used: &mut [bool], best: &mut u32) {
        if depth == self.order.len() {
            *best = (*best).min(edit_path(self.g1, self.g2, map).len() as u32);
            return;
        }
        let u = self.order[depth];
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                map[u] = Some(v);
                self.complete(depth + 1, map, used, best);
                used[v] = false;
            }
        }
        map[u] = None;
        self.complete(depth + 1, map, used, best);
    }

    fn finish(&mut self, idx: usize, bound: Bound, expanded: u64) -> GedResult {
        let map = self.node_map(idx);
        let path = edit_path(self.g1, self.g2, &map);
        let state = self.states[idx];
        debug_assert_eq!(path.len() as u32, state.f());
        GedResult {
            distance: path.len() as u32,
            bound,
            edit_path: Some(path),
            expanded,
        }
    }
}

/// Exact GED by A* with default options.
pub fn ged_astar(g1: &LabeledGraph, g2: &LabeledGraph) -> Result<GedResult, GedError> {
    ged_astar_with(g1, g2, &AStarOptions::default())
}

/// Exact GED by A* over partial maps of `g1` (in BFS order) into `g2`.
///
/// Ties on `g + h` prefer the deeper (larger `g`) state, then insertion
/// order. The result carries a witness edit path.
pub fn ged_astar_with(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    options: &AStarOptions,
) -> Result<GedResult, GedError> {
    let (n1, n2) = (g1.node_count(), g2.node_count());
    if n1.max(n2) > options.max_nodes {
        return Err(GedError::SizeGuard {
            n1,
            n2,
            limit: options.max_nodes,
        });
    }
    let mut search = Search::new(g1, g2);
    let root = search.root();
    search.states.push(root);
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push((Reverse(root.f()), root.g, Reverse(seq), 0usize));
    let mut expanded = 0u64;
    let mut children = Vec::with_capacity(n2 + 1);
    while let Some((_, _, _, idx)) = heap.pop() {
        let state = search.states[idx];
        if state.depth as usize == n1 {
            return Ok(search.finish(idx, Bound::Exact, expanded));
        }
        expanded += 1;
        if expanded > options.max_expanded {
            return Err(GedError::BudgetExhausted {
                expanded: expanded - 1,
            });
        }
        search.load(idx);
        if options.audit_heuristic {
            let best = search.best_completion(state.depth as usize);
            assert!(
                state.h <= best - state.g,
                "inadmissible heuristic: h = {}, true remainder = {}",
                state.h,
                best - state.g
            );
        }
        children.clear();
        search.children(idx, &mut children);
        for child in children.drain(..) {
            if options.upper_bound.is_some_and(|ub| child.f() > ub) {
                continue;
            }
            seq += 1;
            let child_idx = search.states.len();
            search.states.push(child);
            heap.push((Reverse(child.f()), child.g, Reverse(seq), child_idx));
        }
    }
    // Only reachable when a caller-supplied upper bound was below the optimum.
    Err(GedError::BudgetExhausted { expanded })
}

/// A*-Beamsearch: the same state space as [`ged_astar`], explored level by
/// level keeping the `width` best states of each depth. Returns an upper
/// bound; with [`UNBOUNDED_WIDTH`] it is exact.
pub fn ged_beam(g1: &LabeledGraph, g2: &LabeledGraph, width: usize) -> GedResult {
    assert!(width >= 1, "beam width must be positive");
    let n1 = g1.node_count();
    let mut search = Search::new(g1, g2);
    let root = search.root();
    search.states.push(root);
    let mut level = vec![0usize];
    let mut children = Vec::new();
    let mut expanded = 0u64;
    for _ in 0..n1 {
        children.clear();
        for &idx in &level {
            search.load(idx);
            search.children(idx, &mut children);
            expanded += 1;
        }
        // stable: equal keys keep generation order
        children.sort_by_key(|s| (s.f(), Reverse(s.g)));
        children.truncate(width);
        level.clear();
        for child in children.drain(..) {
            level.push(search.states.len());
            search.states.push(child);
        }
    }
    let best = *level
        .iter()
        .min_by_key(|&&idx| search.states[idx].f())
        .expect("beam keeps at least one state");
    let mut result = search.finish(best, Bound::Upper, expanded);
    if width == UNBOUNDED_WIDTH {
        result.bound = Bound::Exact;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ged_bruteforce;
    use crate::graph::generate_graph;

    fn single(label: u32) -> LabeledGraph {
        LabeledGraph::new(vec![label], 2, []).unwrap()
    }

    #[test]
    fn single_nodes() {
        assert_eq!(ged_astar(&single(0), &single(0)).unwrap().distance, 0);
        assert_eq!(ged_astar(&single(0), &single(1)).unwrap().distance, 1);
    }

    #[test]
    fn matches_bruteforce_with_audit() {
        let options = AStarOptions {
            audit_heuristic: true,
            ..AStarOptions::default()
        };
        for seed in 0..40u64 {
            let g1 = generate_graph(1 + (seed % 5) as usize, 0.4, 2, seed);
            let g2 = generate_graph(1 + (seed % 4) as usize, 0.5, 2, seed + 1000);
            let exact = ged_bruteforce(&g1, &g2).unwrap().distance;
            let r = ged_astar_with(&g1, &g2, &options).unwrap();
            assert_eq!(r.distance, exact, "seed {seed}");
            assert_eq!(r.edit_path.unwrap().len() as u32, exact);
        }
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let g1 = generate_graph(8, 0.4, 1, 1);
        let g2 = generate_graph(8, 0.6, 1, 2);
        let options = AStarOptions {
            max_expanded: 3,
            ..AStarOptions::default()
        };
        assert!(matches!(
            ged_astar_with(&g1, &g2, &options),
            Err(GedError::BudgetExhausted { .. })
        ));
    }

    #[test]
    fn size_guard_applies() {
        let g = generate_graph(11, 0.2, 1, 5);
        assert!(matches!(ged_astar(&g, &g), Err(GedError::SizeGuard { .. })));
    }

    #[test]
    fn beam_width_one_on_identical_graphs() {
        for seed in 0..20 {
            let g = generate_graph(7, 0.4, 3, seed);
            assert_eq!(ged_beam(&g, &g, 1).distance, 0);
        }
    }

    #[test]
    fn beam_is_an_upper_bound() {
        for seed in 0..30u64 {
            let g1 = generate_graph(5, 0.5, 2, seed);
            let g2 = generate_graph(4, 0.5, 2, seed + 77);
            let exact = ged_astar(&g1, &g2).unwrap().distance;
            for width in [1, 2, 5] {
                let r = ged_beam(&g1, &g2, width);
                assert!(r.distance >= exact);
                assert_eq!(r.bound, Bound::Upper);
            }
            assert_eq!(ged_beam(&g1, &g2, UNBOUNDED_WIDTH).distance, exact);
        }
    }
}
