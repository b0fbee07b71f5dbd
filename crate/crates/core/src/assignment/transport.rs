use super::AssignmentError;
use crate::scalar::Scalar;

/// Ground distances are rounded to integer multiples of this before the
/// flow is optimized.
pub const COST_RESOLUTION: f64 = 1e-12;

/// Fractional transport plan between two uniform point masses.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowMatrix {
    pub n1: usize,
    pub n2: usize,
    /// Row-major `n1 × n2`.
    pub flows: Vec<f64>,
}

impl FlowMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.flows[i * self.n2 + j]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.flows.chunks(self.n2).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.n2)
            .map(|j| (0..self.n1).map(|i| self.get(i, j)).sum())
            .collect()
    }
}

fn euclidean<T: Scalar>(a: &[T], b: &[T]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x.to_f64_lossy() - y.to_f64_lossy();
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Earth mover's distance between `x` (mass `1/n1` per point) and `y`
/// (mass `1/n2` per point) under Euclidean ground distance.
///
/// Masses are scaled by `n1 · n2` so supplies and demands are integers, and
/// distances are quantized at [`COST_RESOLUTION`]; the resulting integer
/// min-cost flow is solved exactly by successive shortest paths. The
/// reported cost re-prices the optimal plan with unrounded distances.
pub fn solve_transportation<T: Scalar>(
    x: &[Vec<T>],
    y: &[Vec<T>],
) -> Result<(FlowMatrix, f64), AssignmentError> {
    let (n1, n2) = (x.len(), y.len());
    if n1 == 0 || n2 == 0 {
        return Err(AssignmentError::Empty);
    }
    let dim = x[0].len();
    for p in x.iter().chain(y) {
        if p.len() != dim {
            return Err(AssignmentError::DimensionMismatch(dim, p.len()));
        }
    }
    let distance: Vec<f64> = x
        .iter()
        .flat_map(|a| y.iter().map(move |b| euclidean(a, b)))
        .collect();
    let quantized: Vec<i64> = distance
        .iter()
        .map(|&d| (d / COST_RESOLUTION).round() as i64)
        .collect();

    let mut net = FlowNetwork::new(n1 + n2 + 2);
    let (source, sink) = (0, n1 + n2 + 1);
    for i in 0..n1 {
        net.add_edge(source, 1 + i, n2 as i64, 0);
    }
    let mut arcs = Vec::with_capacity(n1 * n2);
    for i in 0..n1 {
        for j in 0..n2 {
            arcs.push(net.add_edge(1 + i, 1 + n1 + j, n1.min(n2) as i64, quantized[i * n2 + j]));
        }
    }
    for j in 0..n2 {
        net.add_edge(1 + n1 + j, sink, n1 as i64, 0);
    }
    let shipped = net.min_cost_flow(source, sink, (n1 * n2) as i64);
    debug_assert_eq!(shipped, (n1 * n2) as i64);

    let scale = (n1 * n2) as f64;
    let flows: Vec<f64> = arcs.iter().map(|&e| net.flow(e) as f64 / scale).collect();
    let cost = flows.iter().zip(&distance).map(|(t, d)| t * d).sum();
    Ok((FlowMatrix { n1, n2, flows }, cost))
}

struct Edge {
    to: usize,
    cap: i64,
    cost: i64,
}

/// Residual network; edge `2k` is forward, `2k + 1` its reverse.
struct FlowNetwork {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    original_cap: Vec<i64>,
}

impl FlowNetwork {
    fn new(n: usize) -> Self {
        Self {
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
            original_cap: Vec::new(),
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: i64, cost: i64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap, cost });
        self.edges.push(Edge {
            to: from,
            cap: 0,
            cost: -cost,
        });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        self.original_cap.push(cap);
        id
    }

    fn flow(&self, edge: usize) -> i64 {
        self.original_cap[edge / 2] - self.edges[edge].cap
    }

    /// Successive shortest paths with Johnson potentials (dense Dijkstra).
    fn min_cost_flow(&mut self, s: usize, t: usize, demand: i64) -> i64 {
        let n = self.adj.len();
        let mut potential = vec![0i64; n];
        let mut shipped = 0;
        while shipped < demand {
            let mut dist = vec![i64::MAX; n];
            let mut via = vec![usize::MAX; n];
            let mut done = vec![false; n];
            dist[s] = 0;
            loop {
                let mut u = usize::MAX;
                for v in 0..n {
                    if !done[v] && dist[v] != i64::MAX && (u == usize::MAX || dist[v] < dist[u]) {
                        u = v;
                    }
                }
                if u == usize::MAX {
                    break;
                }
                done[u] = true;
                for &e in &self.adj[u] {
                    let edge = &self.edges[e];
                    if edge.cap <= 0 {
                        continue;
                    }
                    let reduced = edge.cost + potential[u] - potential[edge.to];
                    let candidate = dist[u] + reduced;
                    if candidate < dist[edge.to] {
                        dist[edge.to] = candidate;
                        via[edge.to] = e;
                    }
                }
            }
            if dist[t] == i64::MAX {
                break;
            }
            for v in 0..n {
                if dist[v] != i64::MAX {
                    potential[v] += dist[v];
                }
            }
            let mut push = demand - shipped;
            let mut v = t;
            while v != s {
                let e = via[v];
                push = push.min(self.edges[e].cap);
                v = self.edges[e ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let e = via[v];
                self.edges[e].cap -= push;
                self.edges[e ^ 1].cap += push;
                v = self.edges[e ^ 1].to;
            }
            shipped += push;
        }
        shipped
    }
}
