use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::{CnnLayer, ModelConfig, ModelKind};
use super::ModelError;
use crate::autodiff::{Tape, Tensor, Var};

/// Named parameter tensors in a fixed order: GCN layers, then conv layers,
/// then dense layers, each as (weight, bias).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub names: Vec<String>,
    pub tensors: Vec<Tensor>,
}

fn glorot(rng: &mut impl Rng, shape: &[usize], fan_in: usize, fan_out: usize) -> Tensor {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let data = (0..shape.iter().product::<usize>())
        .map(|_| rng.gen_range(-limit..limit))
        .collect();
    Tensor::new(shape.to_vec(), data).expect("shape and data agree")
}

impl ParamSet {
    /// Glorot-uniform weights and zero biases.
    pub fn init(config: &ModelConfig, rng: &mut impl Rng) -> Result<Self, ModelError> {
        config.validate()?;
        let mut names = Vec::new();
        let mut tensors = Vec::new();
        let mut width = config.input_dim;
        for (k, &out) in config.gcn_dims.iter().enumerate() {
            names.push(format!("gcn.{k}.weight"));
            tensors.push(glorot(rng, &[width, out], width, out));
            names.push(format!("gcn.{k}.bias"));
            tensors.push(Tensor::zeros(&[out]));
            width = out;
        }
        if config.kind == ModelKind::Gsimcnn {
            for (k, layer) in config.cnn.iter().enumerate() {
                if let CnnLayer::Conv {
                    window,
                    in_channels,
                    out_channels,
                    ..
                } = *layer
                {
                    let area = window * window;
                    names.push(format!("conv.{k}.weight"));
                    tensors.push(glorot(
                        rng,
                        &[out_channels, in_channels, window, window],
                        in_channels * area,
                        out_channels * area,
                    ));
                    names.push(format!("conv.{k}.bias"));
                    tensors.push(Tensor::zeros(&[out_channels]));
                }
            }
            for (k, pair) in config.dense_dims.windows(2).enumerate() {
                names.push(format!("dense.{k}.weight"));
                tensors.push(glorot(rng, &[pair[0], pair[1]], pair[0], pair[1]));
                names.push(format!("dense.{k}.bias"));
                tensors.push(Tensor::zeros(&[pair[1]]));
            }
        }
        Ok(Self { names, tensors })
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn scalar_count(&self) -> usize {
        self.tensors.iter().map(Tensor::len).sum()
    }

    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.names.iter().position(|n| n == name).map(|k| &self.tensors[k])
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Tensor> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|k| &mut self.tensors[k])
    }

    /// Checks that names and shapes are what `config` produces.
    pub fn check_layout(&self, config: &ModelConfig) -> Result<(), ModelError> {
        let mut rng = rand::rngs::mock::StepRng::new(0, 1);
        let fresh = Self::init(config, &mut rng)?;
        let shapes_match = fresh.names == self.names
            && fresh
                .tensors
                .iter()
                .zip(&self.tensors)
                .all(|(a, b)| a.shape() == b.shape());
        if shapes_match {
            Ok(())
        } else {
            Err(ModelError::Checkpoint(
                "parameter layout does not match the model config".into(),
            ))
        }
    }

    /// Records every parameter as a borrowed leaf.
    pub(crate) fn load<'a>(&'a self, tape: &mut Tape<'a>, requires_grad: bool) -> Vec<Var> {
        self.tensors
            .iter()
            .map(|t| tape.leaf_ref(t, requires_grad))
            .collect()
    }
}

/// Parameter leaves grouped by stage.
pub(crate) struct Leaves {
    pub gcn: Vec<(Var, Var)>,
    pub conv: Vec<(Var, Var)>,
    pub dense: Vec<(Var, Var)>,
    pub all: Vec<Var>,
}

impl Leaves {
    pub fn new(config: &ModelConfig, all: Vec<Var>) -> Self {
        let pairs: Vec<(Var, Var)> = all.chunks(2).map(|c| (c[0], c[1])).collect();
        let n_gcn = config.gcn_dims.len();
        let n_conv = match config.kind {
            ModelKind::Gsimcnn => config
                .cnn
                .iter()
                .filter(|l| matches!(l, CnnLayer::Conv { .. }))
                .count(),
            ModelKind::Embavg => 0,
        };
        Self {
            gcn: pairs[..n_gcn].to_vec(),
            conv: pairs[n_gcn..n_gcn + n_conv].to_vec(),
            dense: pairs[n_gcn + n_conv..].to_vec(),
            all,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn layout_of_default_model() {
        let config = ModelConfig::gsimcnn(3, 10);
        let p = ParamSet::init(&config, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(p.len(), 2 * (3 + 5 + 3));
        assert_eq!(p.get("gcn.0.weight").unwrap().shape(), &[3, 64]);
        assert_eq!(p.get("conv.0.weight").unwrap().shape(), &[16, 1, 6, 6]);
        assert_eq!(p.get("conv.8.weight").unwrap().shape(), &[128, 128, 5, 5]);
        assert_eq!(p.get("dense.2.weight").unwrap().shape(), &[32, 1]);
        assert!(p.get("dense.2.bias").unwrap().data().iter().all(|&b| b == 0.0));
        p.check_layout(&config).unwrap();
    }

    #[test]
    fn glorot_bounds() {
        let config = ModelConfig::gsimcnn(3, 10);
        let p = ParamSet::init(&config, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let w = p.get("gcn.1.weight").unwrap();
        let limit = (6.0f64 / 128.0).sqrt();
        assert!(w.data().iter().all(|v| v.abs() <= limit));
    }
}
