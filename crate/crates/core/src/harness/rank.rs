use serde::{Deserialize, Serialize};

use super::{HarnessError, PairTable};
use crate::graph::LabeledGraph;
use crate::metrics::{nged, top_k};
use crate::model::{PreparedGraph, SimilarityModel, SimilarityScore};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub rank: usize,
    pub candidate: usize,
    pub score: f64,
    pub nged: Option<f64>,
}

/// The `k` candidates the model scores most similar to `query`; ties go to
/// the smaller candidate id. `truth` supplies true distances when the
/// query is itself a dataset graph.
pub fn rank_candidates(
    model: &SimilarityModel,
    query: &LabeledGraph,
    graphs: &[LabeledGraph],
    candidates: &[usize],
    k: usize,
    truth: Option<(&PairTable, usize)>,
) -> Result<Vec<RankEntry>, HarnessError> {
    let q = PreparedGraph::new(&model.config, query)?;
    let scores: Vec<f64> = candidates
        .iter()
        .map(|&c| {
            let p = PreparedGraph::new(&model.config, &graphs[c])?;
            Ok(SimilarityScore::from_sigmoid(model.raw_score(&q, &p)?).value())
        })
        .collect::<Result<_, HarnessError>>()?;
    Ok(top_k(&scores, k.min(candidates.len()))
        .into_iter()
        .enumerate()
        .map(|(rank, pos)| {
            let candidate = candidates[pos];
            let nged = truth.and_then(|(table, qi)| {
                table
                    .ged(qi, candidate)
                    .map(|g| nged(g, query.node_count(), graphs[candidate].node_count()))
            });
            RankEntry { rank: rank + 1, candidate, score: scores[pos], nged }
        })
        .collect())
}

pub fn format_rank_table(entries: &[RankEntry]) -> String {
    let mut out = format!("{:>4}  {:>9}  {:>10}  {:>8}\n", "rank", "candidate", "score", "nGED");
    for e in entries {
        let nged = e.nged.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into());
        out.push_str(&format!("{:>4}  {:>9}  {:>10.6}  {:>8}\n", e.rank, e.candidate, e.score, nged));
    }
    out
}
