use serde::{Deserialize, Serialize};

use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// GCN → similarity matrix → CNN → dense head.
    Gsimcnn,
    /// Sigmoid of the dot product of mean node embeddings.
    Embavg,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum CnnLayer {
    Conv {
        window: usize,
        stride: usize,
        in_channels: usize,
        out_channels: usize,
    },
    MaxPool {
        size: usize,
    },
}

impl CnnLayer {
    /// Parses `conv(window,stride,in,out), maxpool(size), ...`.
    pub fn parse_stack(text: &str) -> Result<Vec<Self>, ModelError> {
        let bad = |what: &str| ModelError::InvalidConfig(format!("cnn spec: {what}"));
        let mut layers = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let open = rest.find('(').ok_or_else(|| bad(rest))?;
            let close = rest.find(')').ok_or_else(|| bad(rest))?;
            let name = rest[..open].trim().trim_start_matches(',').trim();
            let args: Vec<usize> = rest[open + 1..close]
                .split(',')
                .map(|a| a.trim().parse::<usize>().map_err(|_| bad(a)))
                .collect::<Result<_, _>>()?;
            layers.push(match (name, args.as_slice()) {
                ("conv", &[window, stride, in_channels, out_channels]) => Self::Conv {
                    window,
                    stride,
                    in_channels,
                    out_channels,
                },
                ("maxpool", &[size]) => Self::MaxPool { size },
                _ => return Err(bad(&rest[..=close])),
            });
            rest = rest[close + 1..].trim_start_matches([',', ' ']).trim();
        }
        Ok(layers)
    }
}

pub const DEFAULT_CNN: &str = "conv(6,1,1,16), maxpool(2), conv(6,1,16,32), maxpool(2), \
    conv(5,1,32,64), maxpool(2), conv(5,1,64,128), maxpool(3), conv(5,1,128,128), maxpool(3)";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub kind: ModelKind,
    /// Output width of each GCN layer.
    pub gcn_dims: Vec<usize>,
    /// One-hot width, or 1 for unlabeled graphs (constant features).
    pub input_dim: usize,
    pub pad_to: usize,
    pub resize_to: usize,
    pub cnn: Vec<CnnLayer>,
    /// Dense widths starting with the flattened CNN output, ending in 1.
    pub dense_dims: Vec<usize>,
}

impl ModelConfig {
    /// Three GCN layers (64, 64, 32), padding to 10, 10×10 resize, the
    /// five conv/pool stages, then dense 128 → 64 → 32 → 1.
    pub fn gsimcnn(input_dim: usize, pad_to: usize) -> Self {
        Self {
            kind: ModelKind::Gsimcnn,
            gcn_dims: vec![64, 64, 32],
            input_dim,
            pad_to,
            resize_to: 10,
            cnn: CnnLayer::parse_stack(DEFAULT_CNN).expect("default stack parses"),
            dense_dims: vec![128, 64, 32, 1],
        }
    }

    pub fn embavg(input_dim: usize) -> Self {
        Self {
            kind: ModelKind::Embavg,
            cnn: Vec::new(),
            dense_dims: Vec::new(),
            ..Self::gsimcnn(input_dim, 10)
        }
    }

    /// Channels and spatial size after the CNN stack on a single-channel
    /// `resize_to × resize_to` input.
    pub fn cnn_output_shape(&self) -> Result<(usize, usize, usize), ModelError> {
        let mut channels = 1;
        let mut side = self.resize_to;
        for (k, layer) in self.cnn.iter().enumerate() {
            match *layer {
                CnnLayer::Conv {
                    window,
                    stride,
                    in_channels,
                    out_channels,
                } => {
                    if stride != 1 || window == 0 {
                        return Err(ModelError::InvalidConfig(format!(
                            "layer {k}: only stride-1 convolutions with a positive window"
                        )));
                    }
                    if in_channels != channels {
                        return Err(ModelError::InvalidConfig(format!(
                            "layer {k}: expects {in_channels} channels, receives {channels}"
                        )));
                    }
                    channels = out_channels;
                }
                CnnLayer::MaxPool { size } => {
                    if size == 0 {
                        return Err(ModelError::InvalidConfig(format!("layer {k}: pool size 0")));
                    }
                    side = side.div_ceil(size);
                }
            }
        }
        Ok((channels, side, side))
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let invalid = |m: String| Err(ModelError::InvalidConfig(m));
        if self.gcn_dims.is_empty() || self.gcn_dims.contains(&0) {
            return invalid("need at least one GCN layer of positive width".into());
        }
        if self.input_dim == 0 {
            return invalid("input_dim must be positive".into());
        }
        if self.kind == ModelKind::Embavg {
            return Ok(());
        }
        if self.pad_to == 0 || self.resize_to == 0 {
            return invalid("pad_to and resize_to must be positive".into());
        }
        let (channels, h, w) = self.cnn_output_shape()?;
        if (h, w) != (1, 1) {
            return invalid(format!("cnn stack ends at {h}x{w}, not 1x1"));
        }
        match (self.dense_dims.first(), self.dense_dims.last()) {
            (Some(&first), Some(&1)) if first == channels && self.dense_dims.len() >= 2 => Ok(()),
            _ => invalid(format!(
                "dense dims {:?} must start at {channels} and end at 1",
                self.dense_dims
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_stack_collapses_to_one_by_one() {
        let c = ModelConfig::gsimcnn(3, 10);
        assert_eq!(c.cnn.len(), 10);
        assert_eq!(c.cnn_output_shape().unwrap(), (128, 1, 1));
        c.validate().unwrap();
    }

    #[test]
    fn parse_round_trip_of_layers() {
        let layers = CnnLayer::parse_stack("conv(3,1,1,4),maxpool(2)").unwrap();
        assert_eq!(
            layers,
            vec![
                CnnLayer::Conv {
                    window: 3,
                    stride: 1,
                    in_channels: 1,
                    out_channels: 4
                },
                CnnLayer::MaxPool { size: 2 }
            ]
        );
        assert!(CnnLayer::parse_stack("pool(2)").is_err());
    }

    #[test]
    fn rejects_stacks_that_do_not_collapse() {
        let mut c = ModelConfig::gsimcnn(3, 10);
        c.cnn.truncate(6); // stops at 2x2
        assert!(c.validate().is_err());

        let mut c = ModelConfig::gsimcnn(3, 10);
        c.cnn[2] = CnnLayer::Conv {
            window: 6,
            stride: 1,
            in_channels: 8,
            out_channels: 32,
        };
        assert!(c.validate().is_err());

        let mut c = ModelConfig::gsimcnn(3, 10);
        c.dense_dims = vec![64, 1];
        assert!(c.validate().is_err());
    }
}
