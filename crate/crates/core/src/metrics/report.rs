use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{kendall_tau, mse, precision_at_k, spearman_rho, MetricError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCandidate {
    pub candidate: usize,
    pub predicted: f64,
    pub truth: f64,
}

/// One query's candidates, sorted by predicted similarity (descending,
/// ties by candidate id).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub query: usize,
    pub ranking: Vec<RankedCandidate>,
    pub mse: f64,
    pub rho: Option<f64>,
    pub tau: Option<f64>,
    pub p_at_10: Option<f64>,
    pub p_at_20: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub pairs: usize,
    pub mse: f64,
    pub rho: Option<f64>,
    pub tau: Option<f64>,
    pub p_at_10: Option<f64>,
    pub p_at_20: Option<f64>,
    /// Queries whose ρ (resp. τ) was undefined and left out of the mean.
    pub rho_excluded: usize,
    pub tau_excluded: usize,
    pub pooled_rho: Option<f64>,
    pub pooled_tau: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingReport {
    pub method: String,
    pub seed: Option<u64>,
    pub config_hash: Option<String>,
    pub queries: Vec<QueryResult>,
    pub aggregate: Aggregate,
}

impl RankingReport {
    pub const CSV_HEADER: &'static str = "method,mse(1e-3),rho,tau,p@10,p@20";

    pub fn csv_row(&self) -> String {
        let a = &self.aggregate;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "NA".into());
        format!(
            "{},{:.6},{},{},{},{}",
            self.method,
            a.mse * 1e3,
            opt(a.rho),
            opt(a.tau),
            opt(a.p_at_10),
            opt(a.p_at_20)
        )
    }

    pub fn to_csv(reports: &[RankingReport]) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in reports {
            let _ = writeln!(out, "{}", r.csv_row());
        }
        out
    }
}

fn mean_defined(values: impl Iterator<Item = Option<f64>>) -> (Option<f64>, usize) {
    let (mut sum, mut count, mut missing) = (0.0, 0usize, 0usize);
    for v in values {
        match v {
            Some(x) => {
                sum += x;
                count += 1;
            }
            None => missing += 1,
        }
    }
    ((count > 0).then(|| sum / count as f64), missing)
}

fn score_query<P, T>(query: usize, candidates: &[usize], predict: &P, truth: &T) -> Result<QueryResult, MetricError>
where
    P: Fn(usize, usize) -> f64,
    T: Fn(usize, usize) -> Option<f64>,
{
    let mut pred = Vec::with_capacity(candidates.len());
    let mut gold = Vec::with_capacity(candidates.len());
    for &c in candidates {
        let t = truth(query, c).ok_or(MetricError::MissingGroundTruth { query, candidate: c })?;
        pred.push(predict(query, c));
        gold.push(t);
    }
    let mut ranking: Vec<RankedCandidate> = candidates
        .iter()
        .zip(pred.iter().zip(&gold))
        .map(|(&candidate, (&predicted, &truth))| RankedCandidate { candidate, predicted, truth })
        .collect();
    ranking.sort_by(|a, b| b.predicted.total_cmp(&a.predicted).then(a.candidate.cmp(&b.candidate)));
    let at = |k: usize| (k <= pred.len()).then(|| precision_at_k(&pred, &gold, k)).transpose();
    Ok(QueryResult {
        query,
        mse: mse(&pred, &gold)?,
        rho: spearman_rho(&pred, &gold).ok(),
        tau: kendall_tau(&pred, &gold).ok(),
        p_at_10: at(10)?,
        p_at_20: at(20)?,
        ranking,
    })
}

/// Scores every query against every candidate and aggregates the metrics.
/// `predict` and `truth` return similarities; candidates that equal the
/// query id are still scored, so callers pass disjoint sets.
pub fn evaluate<P, T>(
    method: &str,
    queries: &[usize],
    candidates: &[usize],
    predict: P,
    truth: T,
) -> Result<RankingReport, MetricError>
where
    P: Fn(usize, usize) -> f64 + Sync,
    T: Fn(usize, usize) -> Option<f64> + Sync,
{
    if queries.is_empty() || candidates.is_empty() {
        return Err(MetricError::TooShort(0));
    }
    let results: Vec<QueryResult> = queries
        .par_iter()
        .map(|&q| score_query(q, candidates, &predict, &truth))
        .collect::<Result<_, _>>()?;

    let (pooled_pred, pooled_gold): (Vec<f64>, Vec<f64>) = results
        .iter()
        .flat_map(|r| r.ranking.iter().map(|c| (c.predicted, c.truth)))
        .unzip();
    let (rho, rho_excluded) = mean_defined(results.iter().map(|r| r.rho));
    let (tau, tau_excluded) = mean_defined(results.iter().map(|r| r.tau));
    let aggregate = Aggregate {
        pairs: pooled_pred.len(),
        mse: mse(&pooled_pred, &pooled_gold)?,
        rho,
        tau,
        p_at_10: mean_defined(results.iter().map(|r| r.p_at_10)).0,
        p_at_20: mean_defined(results.iter().map(|r| r.p_at_20)).0,
        rho_excluded,
        tau_excluded,
        pooled_rho: spearman_rho(&pooled_pred, &pooled_gold).ok(),
        pooled_tau: kendall_tau(&pooled_pred, &pooled_gold).ok(),
    };
    Ok(RankingReport { method: method.to_string(), seed: None, config_hash: None, queries: results, aggregate })
}
