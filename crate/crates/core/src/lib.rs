//! Graph edit distance toolkit: exact and bounded GED solvers, assignment
//! and transportation solvers, a small autodiff engine, a CNN-based GED
//! approximator, ranking metrics and the experiment harness.

pub mod assignment;
pub mod autodiff;
pub mod digest;
pub mod exact;
pub mod graph;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod rng;
pub mod scalar;

pub use graph::{GraphPair, LabeledGraph, NodeOrdering};
pub use scalar::Scalar;

pub type CostMatrixF64 = assignment::CostMatrix<f64>;
pub type CostMatrixF32 = assignment::CostMatrix<f32>;
pub type CostMatrixI64 = assignment::CostMatrix<i64>;
pub type AssignmentF64 = assignment::Assignment<f64>;
pub type AssignmentF32 = assignment::Assignment<f32>;
pub type AssignmentI64 = assignment::Assignment<i64>;
