//! The experiment pipeline: corpus generation, ground truth, training,
//! evaluation, timing and retrieval, plus the file-level commands the
//! command-line tool exposes.

mod bench;
mod commands;
mod corpus;
mod evaluation;
mod groundtruth;
mod methods;
mod rank;

pub use bench::{bench_pairs, loglog_slope, run_bench, BenchReport, BenchRow};
pub use commands::{
    checkpoint_file, cmd_bench, cmd_eval, cmd_gen, cmd_groundtruth, cmd_rank, cmd_train, BenchOptions, Context,
    EvalOptions, Inputs, ModelOptions, PairsMeta, RankOptions, RankOutput, RunConfig, DATASET_FILE, MANIFEST_FILE,
    PAIRS_FILE, PAIRS_META_FILE,
};
pub use corpus::{generate_corpus, GenConfig, Manifest, Split};
pub use evaluation::evaluate_method;
pub use groundtruth::{
    compute_ground_truth, ground_truth_for, min_of_upper_bounds, pair_indices, parse_pairs, serialize_pairs,
    GroundTruthConfig, PairRecord, PairTable,
};
pub use methods::Method;
pub use rank::{format_rank_table, rank_candidates, RankEntry};

use std::path::Path;

use thiserror::Error;

use crate::graph::GraphError;
use crate::metrics::MetricError;
use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("missing input: {0}")]
    MissingInput(String),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, err: std::io::Error) -> Self {
        Self::Io { path: path.display().to_string(), message: err.to_string() }
    }

    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Config(_) => "config",
            Self::Parse(_) => "parse",
            Self::Io { .. } => "io",
            Self::MissingInput(_) => "missing_input",
            Self::Solver(_) => "solver",
            Self::Graph(_) => "graph",
            Self::Model(_) => "model",
            Self::Metric(_) => "metric",
        }
    }
}
