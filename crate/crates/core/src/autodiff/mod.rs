//! A small dense-tensor engine with reverse-mode differentiation, limited
//! to the operators the similarity model uses, and the Adam optimizer.

mod adam;
mod tape;
mod tensor;

pub use adam::{adam_step, AdamState};
pub use tape::{Gradients, Tape, Var, WeightedAdjacency};
pub use tensor::Tensor;

pub(crate) use tape::sigmoid;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("{op}: shape mismatch ({detail})")]
    ShapeMismatch { op: &'static str, detail: String },
    #[error("backward needs a scalar loss, got shape {0:?}")]
    NonScalarLoss(Vec<usize>),
    #[error("resize target must be at least 1x1")]
    BadResizeTarget,
    #[error("data length {len} does not match shape {shape:?}")]
    BadData { shape: Vec<usize>, len: usize },
}

pub(crate) fn mismatch(op: &'static str, detail: impl Into<String>) -> TensorError {
    TensorError::ShapeMismatch {
        op,
        detail: detail.into(),
    }
}
