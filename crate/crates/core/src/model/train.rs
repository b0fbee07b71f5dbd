use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checkpoint::ModelCheckpoint;
use super::network::{PreparedGraph, SimilarityModel};
use super::{ModelConfig, ModelError};
use crate::autodiff::{adam_step, AdamState, Tensor};
use crate::digest::config_hash;
use crate::graph::LabeledGraph;
use crate::rng::substream;

/// Pairs per parallel work unit; gradients are summed chunk by chunk in a
/// fixed order so results do not depend on the thread count.
const CHUNK: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub iterations: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Validation interval in iterations.
    pub eval_every: usize,
    /// Validation pairs kept (a seeded subsample when there are more).
    pub max_val_pairs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            iterations: 2000,
            batch_size: 32,
            learning_rate: 0.001,
            eval_every: 100,
            max_val_pairs: 1000,
            seed: 0,
        }
    }
}

/// A training or validation pair: graph indices and the target similarity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSample {
    pub i: usize,
    pub j: usize,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    /// Mean batch loss since the previous row; absent at iteration 0.
    pub train_loss: Option<f64>,
    pub val_loss: f64,
}

impl TraceRow {
    pub fn to_csv(rows: &[TraceRow]) -> String {
        let mut out = String::from("iteration,train_loss,val_loss\n");
        for r in rows {
            let train = r.train_loss.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{}\n", r.iteration, train, r.val_loss));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Parameters with the lowest validation loss seen.
    pub checkpoint: ModelCheckpoint,
    pub trace: Vec<TraceRow>,
}

fn validation_loss(
    model: &SimilarityModel,
    prepared: &[PreparedGraph],
    pairs: &[PairSample],
) -> Result<f64, ModelError> {
    let errors: Vec<f64> = pairs
        .par_iter()
        .map(|p| {
            let s = model.raw_score(&prepared[p.i], &prepared[p.j])?;
            Ok((s - p.target) * (s - p.target))
        })
        .collect::<Result<_, ModelError>>()?;
    Ok(errors.iter().sum::<f64>() / errors.len() as f64)
}

fn batch_gradients(
    model: &SimilarityModel,
    prepared: &[PreparedGraph],
    batch: &[PairSample],
) -> Result<(f64, Vec<Tensor>), ModelError> {
    let chunks: Vec<(f64, Vec<Vec<f64>>)> = batch
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut sums = model.zero_gradients();
            let mut total = 0.0;
            for p in chunk {
                total += model.accumulate_gradients(&prepared[p.i], &prepared[p.j], p.target, &mut sums)?;
            }
            Ok((total, sums))
        })
        .collect::<Result<_, ModelError>>()?;
    let mut iter = chunks.into_iter();
    let (mut total, mut sums) = iter.next().expect("batch is non-empty");
    for (l, g) in iter {
        total += l;
        sums.iter_mut()
            .zip(g)
            .for_each(|(a, b)| a.iter_mut().zip(b).for_each(|(x, y)| *x += y));
    }
    let n = batch.len() as f64;
    let grads = sums
        .into_iter()
        .zip(&model.params.tensors)
        .map(|(s, t)| Tensor::new(t.shape().to_vec(), s.into_iter().map(|v| v / n).collect()))
        .collect::<Result<_, _>>()?;
    Ok((total / n, grads))
}

fn check_pairs(pairs: &[PairSample], n: usize, split: &'static str) -> Result<(), ModelError> {
    if pairs.is_empty() {
        return Err(ModelError::EmptySplit(split));
    }
    match pairs.iter().find(|p| p.i >= n || p.j >= n || !p.target.is_finite()) {
        Some(p) => Err(ModelError::InvalidConfig(format!(
            "{split} pair ({}, {}) is out of range or has a non-finite target",
            p.i, p.j
        ))),
        None => Ok(()),
    }
}

/// Minimizes the mean squared error between scores and targets with Adam,
/// sampling each batch uniformly with replacement. Returns the parameters
/// with the lowest validation loss (iteration 0 included).
pub fn train(
    graphs: &[LabeledGraph],
    train_pairs: &[PairSample],
    val_pairs: &[PairSample],
    model_config: ModelConfig,
    config: &TrainConfig,
) -> Result<TrainOutcome, ModelError> {
    check_pairs(train_pairs, graphs.len(), "training")?;
    check_pairs(val_pairs, graphs.len(), "validation")?;
    if config.batch_size == 0 || config.eval_every == 0 || config.max_val_pairs == 0 {
        return Err(ModelError::InvalidConfig(
            "batch_size, eval_every and max_val_pairs must be positive".into(),
        ));
    }
    let hash = config_hash(&(&model_config, config));
    let prepared: Vec<PreparedGraph> = graphs
        .iter()
        .map(|g| PreparedGraph::new(&model_config, g))
        .collect::<Result<_, _>>()?;

    let val: Vec<PairSample> = if val_pairs.len() > config.max_val_pairs {
        let mut rng = substream(config.seed, "validation");
        let mut picked = sample(&mut rng, val_pairs.len(), config.max_val_pairs).into_vec();
        picked.sort_unstable();
        picked.into_iter().map(|k| val_pairs[k]).collect()
    } else {
        val_pairs.to_vec()
    };

    let mut model = SimilarityModel::new(model_config, config.seed)?;
    let mut adam = AdamState::with_lr(&model.params.tensors, config.learning_rate);
    let mut rng = substream(config.seed, "batching");

    let initial = validation_loss(&model, &prepared, &val)?;
    let snapshot = |model: &SimilarityModel, adam: &AdamState, iteration: usize, val_loss: f64| ModelCheckpoint {
        format: super::CHECKPOINT_FORMAT.to_string(),
        version: super::CHECKPOINT_VERSION,
        config: model.config.clone(),
        seed: config.seed,
        iteration,
        best_val_loss: val_loss,
        config_hash: hash.clone(),
        params: model.params.clone(),
        adam: adam.clone(),
    };
    let mut best = snapshot(&model, &adam, 0, initial);
    let mut trace = vec![TraceRow { iteration: 0, train_loss: None, val_loss: initial }];
    let (mut window_loss, mut window_len) = (0.0, 0usize);

    for iteration in 1..=config.iterations {
        let batch: Vec<PairSample> = (0..config.batch_size)
            .map(|_| train_pairs[rng.gen_range(0..train_pairs.len())])
            .collect();
        let (batch_loss, grads) = batch_gradients(&model, &prepared, &batch)?;
        adam_step(&mut model.params.tensors, &grads, &mut adam)?;
        window_loss += batch_loss;
        window_len += 1;

        if iteration % config.eval_every == 0 || iteration == config.iterations {
            let val_loss = validation_loss(&model, &prepared, &val)?;
            trace.push(TraceRow {
                iteration,
                train_loss: Some(window_loss / window_len as f64),
                val_loss,
            });
            log::info!("iteration {iteration}: train {:.6}, val {val_loss:.6}", window_loss / window_len as f64);
            (window_loss, window_len) = (0.0, 0);
            if val_loss < best.best_val_loss {
                best = snapshot(&model, &adam, iteration, val_loss);
            }
        }
    }
    Ok(TrainOutcome { checkpoint: best, trace })
}
