//! The CNN-based similarity model: GCN node embeddings, a BFS-ordered,
//! padded and resized similarity matrix, a CNN + dense regression head,
//! the mean-embedding baseline, and training.

mod checkpoint;
mod config;
mod network;
mod params;
mod train;

pub use checkpoint::{ModelCheckpoint, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};
pub use config::{CnnLayer, ModelConfig, ModelKind, DEFAULT_CNN};
pub use network::{
    emb_avg_score, gcn_encode, loss, model_forward, node_features, similarity_matrix,
    SimilarityModel, SimilarityScore,
};
pub use params::ParamSet;
pub use train::{train, PairSample, TraceRow, TrainConfig, TrainOutcome};

pub(crate) use network::PreparedGraph;

use thiserror::Error;

use crate::autodiff::TensorError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid model config: {0}")]
    InvalidConfig(String),
    #[error("graph with {nodes} nodes exceeds pad_to = {pad_to}")]
    GraphTooLarge { nodes: usize, pad_to: usize },
    #[error("node label {label} does not fit input dimension {input_dim}")]
    LabelOutOfRange { label: u32, input_dim: usize },
    #[error("pair {0} has no ground truth")]
    MissingGroundTruth(usize),
    #[error("{0} split is empty")]
    EmptySplit(&'static str),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}
