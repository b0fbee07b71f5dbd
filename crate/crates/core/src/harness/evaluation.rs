use super::{HarnessError, Method, PairTable, Split};
use crate::graph::LabeledGraph;
use crate::metrics::{evaluate, similarity_of, RankingReport};
use crate::model::{PreparedGraph, SimilarityModel, SimilarityScore};

/// Pairwise similarity under one method, in `λ(nGED)` space for
/// algorithms.
pub(crate) enum Scorer<'a> {
    Model {
        model: &'a SimilarityModel,
        prepared: Vec<PreparedGraph>,
    },
    Algorithm(Method),
}

impl<'a> Scorer<'a> {
    pub fn new(method: Method, model: Option<&'a SimilarityModel>, graphs: &[LabeledGraph]) -> Result<Self, HarnessError> {
        match method.model_kind() {
            None => Ok(Scorer::Algorithm(method)),
            Some(kind) => {
                let model = model.ok_or_else(|| HarnessError::MissingInput(format!("{method} needs a checkpoint")))?;
                if model.config.kind != kind {
                    return Err(HarnessError::Config(format!(
                        "checkpoint holds a {:?} model, not {method}",
                        model.config.kind
                    )));
                }
                let prepared = graphs
                    .iter()
                    .map(|g| PreparedGraph::new(&model.config, g))
                    .collect::<Result<_, _>>()?;
                Ok(Scorer::Model { model, prepared })
            }
        }
    }

    pub fn score(&self, graphs: &[LabeledGraph], i: usize, j: usize) -> Result<f64, HarnessError> {
        match self {
            Scorer::Model { model, prepared } => {
                let raw = model.raw_score(&prepared[i], &prepared[j])?;
                Ok(SimilarityScore::from_sigmoid(raw).value())
            }
            Scorer::Algorithm(method) => {
                let (g1, g2) = (&graphs[i], &graphs[j]);
                let result = method.distance(g1, g2).expect("algorithmic method")?;
                Ok(similarity_of(result.distance, g1.node_count(), g2.node_count()))
            }
        }
    }
}

/// Test graphs as queries against training and validation candidates.
pub fn evaluate_method(
    method: Method,
    model: Option<&SimilarityModel>,
    graphs: &[LabeledGraph],
    split: &Split,
    table: &PairTable,
) -> Result<RankingReport, HarnessError> {
    let scorer = Scorer::new(method, model, graphs)?;
    let candidates = split.candidates();
    let scores: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        split
            .test
            .par_iter()
            .map(|&q| candidates.iter().map(|&c| scorer.score(graphs, q, c)).collect())
            .collect::<Result<_, _>>()?
    };
    let row_of = |q: usize| split.test.binary_search(&q).expect("query is a test graph");
    let col_of = |c: usize| candidates.binary_search(&c).expect("candidate is listed");
    let report = evaluate(
        &method.to_string(),
        &split.test,
        &candidates,
        |q, c| scores[row_of(q)][col_of(c)],
        |q, c| table.similarity(graphs, q, c),
    )?;
    Ok(report)
}
