use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{HarnessError, Split};
use crate::assignment::{ged_bipartite, CostModel, LapSolver};
use crate::exact::{ged_astar_with, ged_beam, AStarOptions, GedError};
use crate::graph::{GroundTruthKind, LabeledGraph};
use crate::metrics::similarity_of;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroundTruthConfig {
    /// Exact search when the larger graph has at most this many nodes.
    pub exact_threshold: usize,
    pub beam_width: usize,
    /// A* expansion budget per pair before falling back to upper bounds.
    pub max_expanded: u64,
}

impl Default for GroundTruthConfig {
    fn default() -> Self {
        Self {
            exact_threshold: 10,
            beam_width: 100,
            max_expanded: 2_000_000,
        }
    }
}

/// One labeled pair; `i` is the query side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairRecord {
    pub i: usize,
    pub j: usize,
    pub ged: u32,
    pub kind: GroundTruthKind,
}

/// Pairs needing ground truth: training pairs (`i < j`), validation ×
/// training, and test × (training ∪ validation).
pub fn pair_indices(split: &Split) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for (a, &i) in split.train.iter().enumerate() {
        for &j in &split.train[a + 1..] {
            pairs.push((i, j));
        }
    }
    for &i in &split.val {
        pairs.extend(split.train.iter().map(|&j| (i, j)));
    }
    let candidates = split.candidates();
    for &i in &split.test {
        pairs.extend(candidates.iter().map(|&j| (i, j)));
    }
    pairs
}

/// Minimum of Beam, Hungarian and VJ: each is an upper bound.
pub fn min_of_upper_bounds(g1: &LabeledGraph, g2: &LabeledGraph, beam_width: usize) -> u32 {
    let hungarian = ged_bipartite(g1, g2, LapSolver::Hungarian, CostModel::Augmented).distance;
    let vj = ged_bipartite(g1, g2, LapSolver::Jv, CostModel::Augmented).distance;
    let beam = ged_beam(g1, g2, beam_width).distance;
    hungarian.min(vj).min(beam)
}

/// Exact distance below the size threshold, otherwise (or when A* runs out
/// of budget) the minimum of the three upper bounds.
pub fn ground_truth_for(g1: &LabeledGraph, g2: &LabeledGraph, config: &GroundTruthConfig) -> (u32, GroundTruthKind) {
    let ub = min_of_upper_bounds(g1, g2, config.beam_width);
    if g1.node_count().max(g2.node_count()) > config.exact_threshold {
        return (ub, GroundTruthKind::UpperBoundMin);
    }
    let options = AStarOptions {
        max_nodes: config.exact_threshold,
        max_expanded: config.max_expanded,
        upper_bound: Some(ub),
        audit_heuristic: false,
    };
    match ged_astar_with(g1, g2, &options) {
        Ok(r) => (r.distance, GroundTruthKind::Exact),
        Err(GedError::BudgetExhausted { expanded }) => {
            log::warn!("A* gave up after {expanded} expansions; using the upper bound {ub}");
            (ub, GroundTruthKind::UpperBoundMin)
        }
        Err(e) => unreachable!("size was checked above: {e}"),
    }
}

/// Labels every pair, in parallel, in input order.
pub fn compute_ground_truth(
    graphs: &[LabeledGraph],
    pairs: &[(usize, usize)],
    config: &GroundTruthConfig,
) -> Result<Vec<PairRecord>, HarnessError> {
    if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i >= graphs.len() || j >= graphs.len()) {
        return Err(HarnessError::Config(format!("pair ({i}, {j}) is out of range")));
    }
    Ok(pairs
        .par_iter()
        .map(|&(i, j)| {
            let (ged, kind) = ground_truth_for(&graphs[i], &graphs[j], config);
            PairRecord { i, j, ged, kind }
        })
        .collect())
}

pub fn serialize_pairs(pairs: &[PairRecord]) -> String {
    serde_json::to_string(pairs).expect("pair records serialize")
}

pub fn parse_pairs(text: &str) -> Result<Vec<PairRecord>, HarnessError> {
    serde_json::from_str(text).map_err(|e| HarnessError::Parse(format!("pair file: {e}")))
}

/// Symmetric lookup of ground-truth distances.
#[derive(Debug, Clone, Default)]
pub struct PairTable {
    map: HashMap<(usize, usize), PairRecord>,
}

impl PairTable {
    pub fn new(records: &[PairRecord]) -> Self {
        let map = records.iter().map(|r| ((r.i.min(r.j), r.i.max(r.j)), *r)).collect();
        Self { map }
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&PairRecord> {
        self.map.get(&(i.min(j), i.max(j)))
    }

    pub fn ged(&self, i: usize, j: usize) -> Option<u32> {
        self.get(i, j).map(|r| r.ged)
    }

    /// `λ(nGED)` of the pair.
    pub fn similarity(&self, graphs: &[LabeledGraph], i: usize, j: usize) -> Option<f64> {
        self.ged(i, j)
            .map(|ged| similarity_of(ged, graphs[i].node_count(), graphs[j].node_count()))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}
