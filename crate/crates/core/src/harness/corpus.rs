use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::digest::config_hash;
use crate::graph::{generate_connected_graph, generate_graph, permute_graph, LabeledGraph, NodeOrdering};
use crate::rng::substream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub num_graphs: usize,
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub edge_prob: f64,
    pub num_labels: u32,
    pub connected: bool,
    /// Train, validation and test fractions.
    pub split: [f64; 3],
    /// Extra graphs appended as randomly relabeled copies of the first ones.
    pub duplicates: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            num_graphs: 300,
            min_nodes: 5,
            max_nodes: 10,
            edge_prob: 0.2,
            num_labels: 3,
            connected: true,
            split: [0.6, 0.2, 0.2],
            duplicates: 0,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.num_graphs == 0 {
            return bad("num_graphs must be positive");
        }
        if self.min_nodes == 0 || self.min_nodes > self.max_nodes {
            return bad("need 1 <= min_nodes <= max_nodes");
        }
        if !(0.0..=1.0).contains(&self.edge_prob) {
            return bad("edge_prob must lie in [0, 1]");
        }
        if self.num_labels == 0 {
            return bad("num_labels must be positive");
        }
        validate_split(&self.split)
    }
}

pub(crate) fn validate_split(split: &[f64; 3]) -> Result<(), HarnessError> {
    if split.iter().any(|f| !(0.0..=1.0).contains(f)) || (split.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(HarnessError::Config(format!(
            "split fractions {split:?} must be non-negative and sum to 1"
        )));
    }
    Ok(())
}

/// Graph indices of each split; together a partition of the corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl Split {
    /// Seeded shuffle of `0..n` cut by `fractions` (rounded, test takes
    /// the remainder). Each part is returned sorted.
    pub fn random(n: usize, fractions: &[f64; 3], seed: u64) -> Result<Self, HarnessError> {
        validate_split(fractions)?;
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut substream(seed, "split"));
        let n_train = ((n as f64) * fractions[0]).round() as usize;
        let n_val = (((n as f64) * fractions[1]).round() as usize).min(n - n_train.min(n));
        let n_train = n_train.min(n);
        let mut train = idx[..n_train].to_vec();
        let mut val = idx[n_train..n_train + n_val].to_vec();
        let mut test = idx[n_train + n_val..].to_vec();
        train.sort_unstable();
        val.sort_unstable();
        test.sort_unstable();
        Ok(Self { train, val, test })
    }

    pub fn len(&self) -> usize {
        self.train.len() + self.val.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks that the parts are disjoint and cover `0..n`.
    pub fn check_partition(&self, n: usize) -> Result<(), HarnessError> {
        let mut seen = vec![false; n];
        for &i in self.train.iter().chain(&self.val).chain(&self.test) {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(HarnessError::Config(format!("split is not a partition: graph {i}")));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(HarnessError::Config("split does not cover every graph".into()));
        }
        Ok(())
    }

    /// Candidates for test queries: training and validation graphs.
    pub fn candidates(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self.train.iter().chain(&self.val).copied().collect();
        c.sort_unstable();
        c
    }
}

/// Provenance of a generated corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub config_hash: String,
    pub dataset_hash: String,
    pub generator: GenConfig,
    pub split: Split,
    /// `(copy, original)` for every appended duplicate.
    pub duplicates: Vec<(usize, usize)>,
}

/// Generates the corpus, its split and (without the dataset hash, which
/// depends on serialization) its manifest.
pub fn generate_corpus(config: &GenConfig, seed: u64) -> Result<(Vec<LabeledGraph>, Manifest), HarnessError> {
    config.validate()?;
    let mut rng = substream(seed, "generation");
    let mut graphs: Vec<LabeledGraph> = (0..config.num_graphs)
        .map(|_| {
            let n = rng.gen_range(config.min_nodes..=config.max_nodes);
            let graph_seed = rng.next_u64();
            if config.connected {
                generate_connected_graph(n, config.edge_prob, config.num_labels, graph_seed)
            } else {
                generate_graph(n, config.edge_prob, config.num_labels, graph_seed)
            }
        })
        .collect();

    let mut dup_rng = substream(seed, "duplicates");
    let mut duplicates = Vec::with_capacity(config.duplicates);
    for d in 0..config.duplicates {
        let original = d % config.num_graphs;
        let mut order: Vec<usize> = (0..graphs[original].node_count()).collect();
        order.shuffle(&mut dup_rng);
        let p = NodeOrdering::new(order)?;
        graphs.push(permute_graph(&graphs[original], &p)?);
        duplicates.push((graphs.len() - 1, original));
    }

    let split = Split::random(graphs.len(), &config.split, seed)?;
    let manifest = Manifest {
        seed,
        config_hash: config_hash(&(seed, config)),
        dataset_hash: String::new(),
        generator: config.clone(),
        split,
        duplicates,
    };
    Ok((graphs, manifest))
}
