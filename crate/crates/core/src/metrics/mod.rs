//! GED normalization, the similarity transform, and ranking metrics.

mod rank;
mod report;

pub use rank::{kendall_tau, mse, precision_at_k, spearman_rho, top_k};
pub use report::{evaluate, Aggregate, QueryResult, RankedCandidate, RankingReport};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least two observations, got {0}")]
    TooShort(usize),
    #[error("correlation undefined: an input has no rank variance")]
    ZeroVariance,
    #[error("invalid k = {k} for {n} candidates")]
    InvalidK { k: usize, n: usize },
    #[error("negative normalized distance {0}")]
    NegativeDistance(f64),
    #[error("no ground truth for query {query}, candidate {candidate}")]
    MissingGroundTruth { query: usize, candidate: usize },
}

/// GED divided by the mean node count of the two graphs.
pub fn nged(ged: u32, n1: usize, n2: usize) -> f64 {
    assert!(n1 >= 1 && n2 >= 1, "graphs have at least one node");
    2.0 * f64::from(ged) / (n1 + n2) as f64
}

/// `e^(-x)`, mapping a normalized distance into `(0, 1]`.
pub fn ged_to_sim(nged: f64) -> Result<f64, MetricError> {
    if nged < 0.0 || nged.is_nan() {
        return Err(MetricError::NegativeDistance(nged));
    }
    Ok((-nged).exp())
}

/// `λ(nGED)` for a raw distance.
pub fn similarity_of(ged: u32, n1: usize, n2: usize) -> f64 {
    (-nged(ged, n1, n2)).exp()
}
