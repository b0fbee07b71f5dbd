use serde::{Deserialize, Serialize};

use super::network::SimilarityModel;
use super::params::ParamSet;
use super::{ModelConfig, ModelError};
use crate::autodiff::{AdamState, Tensor};

pub const CHECKPOINT_FORMAT: &str = "gedforge-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Trained parameters with the optimizer state and provenance needed to
/// resume or reproduce a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelCheckpoint {
    pub format: String,
    pub version: u32,
    pub config: ModelConfig,
    pub seed: u64,
    pub iteration: usize,
    pub best_val_loss: f64,
    pub config_hash: String,
    pub params: ParamSet,
    pub adam: AdamState,
}

#[derive(Serialize, Deserialize)]
struct NamedTensor {
    name: String,
    shape: Vec<usize>,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckpointFile {
    format: String,
    version: u32,
    config: ModelConfig,
    seed: u64,
    iteration: usize,
    best_val_loss: f64,
    config_hash: String,
    params: Vec<NamedTensor>,
    adam: AdamState,
}

impl ModelCheckpoint {
    pub fn model(&self) -> Result<SimilarityModel, ModelError> {
        SimilarityModel::from_parts(self.config.clone(), self.params.clone())
    }

    pub fn into_model(self) -> Result<SimilarityModel, ModelError> {
        SimilarityModel::from_parts(self.config, self.params)
    }

    pub fn to_json(&self) -> String {
        let file = CheckpointFile {
            format: self.format.clone(),
            version: self.version,
            config: self.config.clone(),
            seed: self.seed,
            iteration: self.iteration,
            best_val_loss: self.best_val_loss,
            config_hash: self.config_hash.clone(),
            params: self
                .params
                .names
                .iter()
                .zip(&self.params.tensors)
                .map(|(name, t)| NamedTensor {
                    name: name.clone(),
                    shape: t.shape().to_vec(),
                    data: t.data().to_vec(),
                })
                .collect(),
            adam: self.adam.clone(),
        };
        serde_json::to_string(&file).expect("checkpoint values are finite")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let bad = |m: String| ModelError::Checkpoint(m);
        let file: CheckpointFile = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        if file.format != CHECKPOINT_FORMAT || file.version != CHECKPOINT_VERSION {
            return Err(bad(format!("unsupported format {} v{}", file.format, file.version)));
        }
        file.config.validate()?;
        let mut params = ParamSet { names: Vec::new(), tensors: Vec::new() };
        for p in file.params {
            params.names.push(p.name);
            params.tensors.push(Tensor::new(p.shape, p.data)?);
        }
        params.check_layout(&file.config)?;
        let moments_match = |m: &[Tensor]| {
            m.len() == params.tensors.len() && m.iter().zip(&params.tensors).all(|(a, b)| a.shape() == b.shape())
        };
        if !moments_match(&file.adam.m) || !moments_match(&file.adam.v) {
            return Err(bad("optimizer moments do not match the parameters".into()));
        }
        Ok(Self {
            format: file.format,
            version: file.version,
            config: file.config,
            seed: file.seed,
            iteration: file.iteration,
            best_val_loss: file.best_val_loss,
            config_hash: file.config_hash,
            params,
            adam: file.adam,
        })
    }
}
