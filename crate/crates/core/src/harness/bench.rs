use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::evaluation::Scorer;
use super::{HarnessError, Method};
use crate::graph::LabeledGraph;
use crate::model::SimilarityModel;
use crate::rng::substream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub method: String,
    /// `max(N1, N2)` of the timed pairs.
    pub size: usize,
    pub pairs: usize,
    pub mean_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub seed: u64,
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of log time against log size, per method.
    pub slopes: BTreeMap<String, Option<f64>>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,size,pairs,mean_seconds\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{:e}\n", r.method, r.size, r.pairs, r.mean_seconds));
        }
        out
    }
}

/// Slope of the least-squares line through `(ln x, ln y)`; needs two
/// distinct sizes and positive times.
pub fn loglog_slope(points: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(x, y)| x > 0 && y > 0.0)
        .map(|&(x, y)| ((x as f64).ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (pts.len() >= 2 && sxx > 0.0).then(|| sxy / sxx)
}

/// Up to `per_size` seeded random pairs for every value of `max(N1, N2)`.
pub fn bench_pairs(graphs: &[LabeledGraph], per_size: usize, seed: u64) -> BTreeMap<usize, Vec<(usize, usize)>> {
    let mut buckets: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    if graphs.len() < 2 {
        return buckets;
    }
    let mut rng = substream(seed, "bench");
    let attempts = 50 * per_size * graphs.len();
    for _ in 0..attempts {
        let i = rng.gen_range(0..graphs.len());
        let j = rng.gen_range(0..graphs.len());
        if i == j {
            continue;
        }
        let size = graphs[i].node_count().max(graphs[j].node_count());
        let bucket = buckets.entry(size).or_default();
        if bucket.len() < per_size {
            bucket.push((i, j));
        }
    }
    buckets
}

/// Wall-clock time per pair for each method, grouped by pair size.
pub fn run_bench(
    graphs: &[LabeledGraph],
    methods: &[(Method, Option<&SimilarityModel>)],
    per_size: usize,
    seed: u64,
) -> Result<BenchReport, HarnessError> {
    let buckets = bench_pairs(graphs, per_size, seed);
    let mut rows = Vec::new();
    let mut slopes = BTreeMap::new();
    for &(method, model) in methods {
        let scorer = Scorer::new(method, model, graphs)?;
        let mut points = Vec::new();
        for (&size, pairs) in &buckets {
            let start = Instant::now();
            for &(i, j) in pairs {
                scorer.score(graphs, i, j)?;
            }
            let mean = start.elapsed().as_secs_f64() / pairs.len() as f64;
            points.push((size, mean));
            rows.push(BenchRow { method: method.to_string(), size, pairs: pairs.len(), mean_seconds: mean });
        }
        slopes.insert(method.to_string(), loglog_slope(&points));
    }
    Ok(BenchReport { seed, rows, slopes })
}
