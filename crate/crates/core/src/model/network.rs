use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::config::{CnnLayer, ModelConfig, ModelKind};
use super::params::{Leaves, ParamSet};
use super::ModelError;
use crate::autodiff::{Tape, Tensor, Var, WeightedAdjacency};
use crate::graph::{bfs_order, GraphPair, LabeledGraph, NodeOrdering};
use crate::metrics::similarity_of;
use crate::rng::substream;

/// A model output, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct SimilarityScore(f64);

impl SimilarityScore {
    const LOW: f64 = f64::MIN_POSITIVE;
    const HIGH: f64 = 1.0 - f64::EPSILON / 2.0;

    /// Wraps a sigmoid output; values that rounded to 0 or 1 are pulled
    /// back to the nearest representable interior point.
    pub fn from_sigmoid(value: f64) -> Self {
        Self(value.clamp(Self::LOW, Self::HIGH))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// One-hot label rows `[N, input_dim]`, or a column of ones when
/// `input_dim == 1`.
pub fn node_features(g: &LabeledGraph, input_dim: usize) -> Result<Tensor, ModelError> {
    let n = g.node_count();
    if input_dim == 1 {
        return Ok(Tensor::new(vec![n, 1], vec![1.0; n])?);
    }
    let mut data = vec![0.0; n * input_dim];
    for (i, &label) in g.labels().iter().enumerate() {
        if label as usize >= input_dim {
            return Err(ModelError::LabelOutOfRange { label, input_dim });
        }
        data[i * input_dim + label as usize] = 1.0;
    }
    Ok(Tensor::new(vec![n, input_dim], data)?)
}

/// Neighbor lists including the node itself, weighted `1/√(d_i d_j)` with
/// `d = degree + 1`.
pub(crate) fn normalized_adjacency(g: &LabeledGraph) -> WeightedAdjacency {
    let d: Vec<f64> = (0..g.node_count()).map(|i| (g.degree(i) + 1) as f64).collect();
    let rows = (0..g.node_count())
        .map(|i| {
            std::iter::once(i)
                .chain(g.neighbors(i).iter().copied())
                .map(|j| (j, 1.0 / (d[i] * d[j]).sqrt()))
                .collect()
        })
        .collect();
    Arc::new(rows)
}

/// Per-graph inputs that do not depend on parameters.
#[derive(Debug, Clone)]
pub(crate) struct PreparedGraph {
    features: Tensor,
    adjacency: WeightedAdjacency,
    /// BFS order padded with `None` up to `pad_to` (empty for EmbAvg).
    padded_order: Vec<Option<usize>>,
}

impl PreparedGraph {
    pub fn new(config: &ModelConfig, g: &LabeledGraph) -> Result<Self, ModelError> {
        let padded_order = match config.kind {
            ModelKind::Gsimcnn => padded(&bfs_order(g), config.pad_to)?,
            ModelKind::Embavg => Vec::new(),
        };
        Ok(Self {
            features: node_features(g, config.input_dim)?,
            adjacency: normalized_adjacency(g),
            padded_order,
        })
    }
}

fn padded(order: &NodeOrdering, pad_to: usize) -> Result<Vec<Option<usize>>, ModelError> {
    if order.len() > pad_to {
        return Err(ModelError::GraphTooLarge { nodes: order.len(), pad_to });
    }
    let mut index: Vec<Option<usize>> = order.as_slice().iter().copied().map(Some).collect();
    index.resize(pad_to, None);
    Ok(index)
}

fn encode<'a>(tape: &mut Tape<'a>, leaves: &Leaves, g: &'a PreparedGraph) -> Result<Var, ModelError> {
    let mut h = tape.leaf_ref(&g.features, false);
    for &(w, b) in &leaves.gcn {
        let mixed = tape.aggregate(h, Arc::clone(&g.adjacency))?;
        let z = tape.matmul(mixed, w)?;
        let z = tape.add_bias(z, b)?;
        h = tape.relu(z);
    }
    Ok(h)
}

fn similarity_on_tape(
    tape: &mut Tape<'_>,
    h1: Var,
    h2: Var,
    order1: Vec<Option<usize>>,
    order2: Vec<Option<usize>>,
    resize_to: usize,
) -> Result<Var, ModelError> {
    let p = order1.len();
    let a = tape.gather_rows(h1, order1)?;
    let b = tape.gather_rows(h2, order2)?;
    let bt = tape.transpose(b)?;
    let s = tape.matmul(a, bt)?;
    let s = tape.reshape(s, &[1, 1, p, p])?;
    Ok(tape.bilinear_resize(s, resize_to, resize_to)?)
}

/// Pre-sigmoid graph: returns the `[1, 1]` score.
fn forward_on_tape<'a>(
    tape: &mut Tape<'a>,
    config: &ModelConfig,
    leaves: &Leaves,
    g1: &'a PreparedGraph,
    g2: &'a PreparedGraph,
) -> Result<Var, ModelError> {
    let h1 = encode(tape, leaves, g1)?;
    let h2 = encode(tape, leaves, g2)?;
    if config.kind == ModelKind::Embavg {
        let m1 = tape.mean_rows(h1)?;
        let m2 = tape.mean_rows(h2)?;
        let m2t = tape.transpose(m2)?;
        let dot = tape.matmul(m1, m2t)?;
        return Ok(tape.sigmoid(dot));
    }
    let mut x = similarity_on_tape(
        tape,
        h1,
        h2,
        g1.padded_order.clone(),
        g2.padded_order.clone(),
        config.resize_to,
    )?;
    let mut convs = leaves.conv.iter();
    for layer in &config.cnn {
        x = match *layer {
            CnnLayer::Conv { .. } => {
                let &(w, b) = convs.next().expect("one leaf pair per conv layer");
                let y = tape.conv2d(x, w, b)?;
                tape.relu(y)
            }
            CnnLayer::MaxPool { size } => tape.maxpool2d(x, size)?,
        };
    }
    x = tape.flatten(x)?;
    let last = leaves.dense.len() - 1;
    for (k, &(w, b)) in leaves.dense.iter().enumerate() {
        let y = tape.dense(x, w, b)?;
        x = if k == last { tape.sigmoid(y) } else { tape.relu(y) };
    }
    Ok(x)
}

/// A configuration together with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityModel {
    pub config: ModelConfig,
    pub params: ParamSet,
}

impl SimilarityModel {
    /// Fresh parameters drawn from the `init` substream of `seed`.
    pub fn new(config: ModelConfig, seed: u64) -> Result<Self, ModelError> {
        let params = ParamSet::init(&config, &mut substream(seed, "init"))?;
        Ok(Self { config, params })
    }

    pub fn from_parts(config: ModelConfig, params: ParamSet) -> Result<Self, ModelError> {
        params.check_layout(&config)?;
        Ok(Self { config, params })
    }

    pub(crate) fn raw_score(&self, g1: &PreparedGraph, g2: &PreparedGraph) -> Result<f64, ModelError> {
        let mut tape = Tape::new();
        let leaves = Leaves::new(&self.config, self.params.load(&mut tape, false));
        let out = forward_on_tape(&mut tape, &self.config, &leaves, g1, g2)?;
        Ok(tape.value(out).data()[0])
    }

    /// Squared error of one pair; its gradient is added onto `sums`, one
    /// buffer per parameter tensor.
    pub(crate) fn accumulate_gradients(
        &self,
        g1: &PreparedGraph,
        g2: &PreparedGraph,
        target: f64,
        sums: &mut [Vec<f64>],
    ) -> Result<f64, ModelError> {
        let mut tape = Tape::new();
        let leaves = Leaves::new(&self.config, self.params.load(&mut tape, true));
        let out = forward_on_tape(&mut tape, &self.config, &leaves, g1, g2)?;
        let loss = tape.mse_loss(out, &[target])?;
        let seeds = leaves.all.iter().zip(sums.iter_mut()).map(|(&v, s)| (v, std::mem::take(s))).collect();
        let mut grads = tape.backward_seeded(loss, seeds)?;
        for (&v, s) in leaves.all.iter().zip(sums.iter_mut()) {
            *s = grads.take(v).expect("seeded gradients are returned");
        }
        Ok(tape.value(loss).data()[0])
    }

    pub(crate) fn zero_gradients(&self) -> Vec<Vec<f64>> {
        self.params.tensors.iter().map(|t| vec![0.0; t.len()]).collect()
    }

    /// Similarity of `g1` (rows) to `g2` (columns).
    pub fn score(&self, g1: &LabeledGraph, g2: &LabeledGraph) -> Result<SimilarityScore, ModelError> {
        let (p1, p2) = (PreparedGraph::new(&self.config, g1)?, PreparedGraph::new(&self.config, g2)?);
        Ok(SimilarityScore::from_sigmoid(self.raw_score(&p1, &p2)?))
    }

    /// Mean squared error over `(g1, g2, target)` triples and its gradient
    /// with respect to every parameter tensor.
    pub fn loss_and_gradients(
        &self,
        samples: &[(&LabeledGraph, &LabeledGraph, f64)],
    ) -> Result<(f64, Vec<Tensor>), ModelError> {
        if samples.is_empty() {
            return Err(ModelError::EmptySplit("batch"));
        }
        let mut total = 0.0;
        let mut sums = self.zero_gradients();
        for &(g1, g2, target) in samples {
            let (p1, p2) = (PreparedGraph::new(&self.config, g1)?, PreparedGraph::new(&self.config, g2)?);
            total += self.accumulate_gradients(&p1, &p2, target, &mut sums)?;
        }
        let n = samples.len() as f64;
        let tensors = sums
            .into_iter()
            .zip(&self.params.tensors)
            .map(|(s, t)| Tensor::new(t.shape().to_vec(), s.into_iter().map(|v| v / n).collect()))
            .collect::<Result<_, _>>()?;
        Ok((total / n, tensors))
    }
}

/// Node embeddings `[N, D_K]` after every GCN layer.
pub fn gcn_encode(config: &ModelConfig, params: &ParamSet, g: &LabeledGraph) -> Result<Tensor, ModelError> {
    let prepared = PreparedGraph {
        features: node_features(g, config.input_dim)?,
        adjacency: normalized_adjacency(g),
        padded_order: Vec::new(),
    };
    let mut tape = Tape::new();
    let leaves = Leaves::new(config, params.load(&mut tape, false));
    let h = encode(&mut tape, &leaves, &prepared)?;
    Ok(tape.value(h).clone())
}

/// BFS-reordered, zero-padded Gram matrix of two embedding sets, resized to
/// `resize_to × resize_to`.
pub fn similarity_matrix(
    h1: &Tensor,
    h2: &Tensor,
    order1: &NodeOrdering,
    order2: &NodeOrdering,
    pad_to: usize,
    resize_to: usize,
) -> Result<Tensor, ModelError> {
    let (o1, o2) = (padded(order1, pad_to)?, padded(order2, pad_to)?);
    let mut tape = Tape::new();
    let (a, b) = (tape.leaf_ref(h1, false), tape.leaf_ref(h2, false));
    let s = similarity_on_tape(&mut tape, a, b, o1, o2, resize_to)?;
    Ok(tape.value(s).reshaped(&[resize_to, resize_to])?)
}

/// Score of a pair under the model's own architecture.
pub fn model_forward(pair: &GraphPair, model: &SimilarityModel) -> Result<SimilarityScore, ModelError> {
    model.score(&pair.g1, &pair.g2)
}

/// Sigmoid of the dot product of the mean node embeddings, using only the
/// GCN parameters of `model`.
pub fn emb_avg_score(pair: &GraphPair, model: &SimilarityModel) -> Result<SimilarityScore, ModelError> {
    let h1 = gcn_encode(&model.config, &model.params, &pair.g1)?;
    let h2 = gcn_encode(&model.config, &model.params, &pair.g2)?;
    let mean = |h: &Tensor| -> Vec<f64> {
        (0..h.cols())
            .map(|f| (0..h.rows()).map(|i| h.at2(i, f)).sum::<f64>() / h.rows() as f64)
            .collect()
    };
    let dot: f64 = mean(&h1).iter().zip(mean(&h2)).map(|(a, b)| a * b).sum();
    Ok(SimilarityScore::from_sigmoid(crate::autodiff::sigmoid(dot)))
}

/// Mean of `(ŝ − λ(nGED))²` over the pairs.
pub fn loss(pairs: &[GraphPair], model: &SimilarityModel) -> Result<f64, ModelError> {
    if pairs.is_empty() {
        return Err(ModelError::EmptySplit("batch"));
    }
    let mut total = 0.0;
    for (k, pair) in pairs.iter().enumerate() {
        let ged = pair.ground_truth_ged.ok_or(ModelError::MissingGroundTruth(k))?;
        let target = similarity_of(ged, pair.g1.node_count(), pair.g2.node_count());
        let (p1, p2) = (
            PreparedGraph::new(&model.config, &pair.g1)?,
            PreparedGraph::new(&model.config, &pair.g2)?,
        );
        let s = model.raw_score(&p1, &p2)?;
        total += (s - target) * (s - target);
    }
    Ok(total / pairs.len() as f64)
}
