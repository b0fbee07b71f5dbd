use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{
    compute_ground_truth, evaluate_method, format_rank_table, generate_corpus, pair_indices, parse_pairs,
    rank_candidates, run_bench, serialize_pairs, BenchReport, GenConfig, GroundTruthConfig, HarnessError, Manifest,
    Method, PairTable, RankEntry,
};
use crate::digest::{bytes_hash, config_hash};
use crate::graph::{parse_dataset, parse_graph, serialize_dataset, GroundTruthKind, LabeledGraph};
use crate::metrics::{similarity_of, RankingReport};
use crate::model::{
    train, CnnLayer, ModelCheckpoint, ModelConfig, ModelKind, PairSample, SimilarityModel, TraceRow, TrainConfig,
    DEFAULT_CNN,
};

/// Architecture settings; `input_dim` comes from the dataset and `pad_to`
/// defaults to its largest graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelOptions {
    pub kind: ModelKind,
    pub gcn_dims: Vec<usize>,
    pub pad_to: Option<usize>,
    pub resize_to: usize,
    pub cnn: String,
    pub dense_dims: Vec<usize>,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self {
            kind: ModelKind::Gsimcnn,
            gcn_dims: vec![64, 64, 32],
            pad_to: None,
            resize_to: 10,
            cnn: DEFAULT_CNN.to_string(),
            dense_dims: vec![128, 64, 32, 1],
        }
    }
}

impl ModelOptions {
    pub fn build(&self, graphs: &[LabeledGraph]) -> Result<ModelConfig, HarnessError> {
        let labels = graphs.iter().map(|g| g.num_labels()).max().unwrap_or(1) as usize;
        let largest = graphs.iter().map(|g| g.node_count()).max().unwrap_or(1);
        let mut config = match self.kind {
            ModelKind::Gsimcnn => ModelConfig::gsimcnn(labels, self.pad_to.unwrap_or(largest)),
            ModelKind::Embavg => ModelConfig::embavg(labels),
        };
        config.gcn_dims = self.gcn_dims.clone();
        if self.kind == ModelKind::Gsimcnn {
            config.resize_to = self.resize_to;
            config.cnn = CnnLayer::parse_stack(&self.cnn)?;
            config.dense_dims = self.dense_dims.clone();
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalOptions {
    pub methods: Vec<Method>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { methods: Method::DEFAULT_EVAL.to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchOptions {
    pub methods: Vec<Method>,
    pub pairs_per_size: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            methods: Method::DEFAULT_EVAL.to_vec(),
            pairs_per_size: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RankOptions {
    pub k: usize,
    /// Dataset index of the query when no query file is given.
    pub query_index: Option<usize>,
}

impl Default for RankOptions {
    fn default() -> Self {
        Self { k: 10, query_index: None }
    }
}

/// Settings for every command; each reads its own section.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub gen: GenConfig,
    pub groundtruth: GroundTruthConfig,
    pub model: ModelOptions,
    /// The `seed` field here is replaced by the run seed.
    pub train: TrainConfig,
    pub eval: EvalOptions,
    pub bench: BenchOptions,
    pub rank: RankOptions,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Parse(format!("config: {e}")))
    }
}

/// Input file overrides; unset inputs are looked up in the output
/// directory under their default names.
#[derive(Debug, Clone, Default)]
pub struct Inputs {
    pub dataset: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub pairs: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub query: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct Context {
    pub seed: u64,
    pub out: PathBuf,
    pub config: RunConfig,
    pub inputs: Inputs,
}

pub const DATASET_FILE: &str = "dataset.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const PAIRS_FILE: &str = "pairs.json";
pub const PAIRS_META_FILE: &str = "pairs.meta.json";

pub fn checkpoint_file(kind: ModelKind) -> String {
    format!("checkpoint_{}.json", kind_name(kind))
}

fn kind_name(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Gsimcnn => "gsimcnn",
        ModelKind::Embavg => "embavg",
    }
}

/// Side file recorded next to the pair file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairsMeta {
    pub seed: u64,
    pub config_hash: String,
    pub dataset_hash: String,
    pub pairs_hash: String,
    pub exact: usize,
    pub upper_bound: usize,
}

fn read(path: &Path) -> Result<String, HarnessError> {
    fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("artifacts serialize")
}

impl Context {
    fn input(&self, given: &Option<PathBuf>, default: &str) -> PathBuf {
        given.clone().unwrap_or_else(|| self.out.join(default))
    }

    fn dataset_path(&self) -> PathBuf {
        self.input(&self.inputs.dataset, DATASET_FILE)
    }

    fn load_dataset(&self) -> Result<(Vec<LabeledGraph>, String), HarnessError> {
        let path = self.dataset_path();
        let text = read(&path)?;
        Ok((parse_dataset(&text)?, bytes_hash(text.as_bytes())))
    }

    fn load_manifest(&self, graphs: &[LabeledGraph]) -> Result<Manifest, HarnessError> {
        let default = self
            .dataset_path()
            .parent()
            .map(|d| d.join(MANIFEST_FILE))
            .unwrap_or_else(|| MANIFEST_FILE.into());
        let path = self.inputs.manifest.clone().unwrap_or(default);
        let manifest: Manifest =
            serde_json::from_str(&read(&path)?).map_err(|e| HarnessError::Parse(format!("manifest: {e}")))?;
        manifest.split.check_partition(graphs.len())?;
        Ok(manifest)
    }

    fn load_pairs(&self) -> Result<PairTable, HarnessError> {
        let path = self.input(&self.inputs.pairs, PAIRS_FILE);
        Ok(PairTable::new(&parse_pairs(&read(&path)?)?))
    }

    fn load_model(&self, kind: ModelKind) -> Result<SimilarityModel, HarnessError> {
        let path = self.input(&self.inputs.checkpoint, &checkpoint_file(kind));
        Ok(ModelCheckpoint::from_json(&read(&path)?)?.into_model()?)
    }
}

/// Writes `dataset.json` and `manifest.json`.
pub fn cmd_gen(ctx: &Context) -> Result<Manifest, HarnessError> {
    let (graphs, mut manifest) = generate_corpus(&ctx.config.gen, ctx.seed)?;
    let text = serialize_dataset(&graphs);
    manifest.dataset_hash = bytes_hash(text.as_bytes());
    write(&ctx.out.join(DATASET_FILE), &text)?;
    write(&ctx.out.join(MANIFEST_FILE), &to_json(&manifest))?;
    log::info!("generated {} graphs", graphs.len());
    Ok(manifest)
}

/// Writes `pairs.json` and its metadata file.
pub fn cmd_groundtruth(ctx: &Context) -> Result<PairsMeta, HarnessError> {
    let (graphs, dataset_hash) = ctx.load_dataset()?;
    let manifest = ctx.load_manifest(&graphs)?;
    let pairs = pair_indices(&manifest.split);
    let start = Instant::now();
    let records = compute_ground_truth(&graphs, &pairs, &ctx.config.groundtruth)?;
    log::info!("labeled {} pairs in {:.1?}", records.len(), start.elapsed());
    let text = serialize_pairs(&records);
    let exact = records.iter().filter(|r| r.kind == GroundTruthKind::Exact).count();
    let meta = PairsMeta {
        seed: ctx.seed,
        config_hash: config_hash(&(ctx.seed, &ctx.config.groundtruth)),
        dataset_hash,
        pairs_hash: bytes_hash(text.as_bytes()),
        exact,
        upper_bound: records.len() - exact,
    };
    write(&ctx.out.join(PAIRS_FILE), &text)?;
    write(&ctx.out.join(PAIRS_META_FILE), &to_json(&meta))?;
    Ok(meta)
}

fn samples(queries: &[usize], candidates: &[usize], lower_only: bool, graphs: &[LabeledGraph], table: &PairTable) -> Result<Vec<PairSample>, HarnessError> {
    let mut out = Vec::new();
    for &i in queries {
        for &j in candidates {
            if i == j || (lower_only && j < i) {
                continue;
            }
            let target = table
                .ged(i, j)
                .map(|g| similarity_of(g, graphs[i].node_count(), graphs[j].node_count()))
                .ok_or_else(|| HarnessError::MissingInput(format!("no ground truth for pair ({i}, {j})")))?;
            out.push(PairSample { i, j, target });
        }
    }
    Ok(out)
}

/// Trains `config.model.kind` and writes its checkpoint and loss trace.
pub fn cmd_train(ctx: &Context) -> Result<ModelCheckpoint, HarnessError> {
    let (graphs, _) = ctx.load_dataset()?;
    let manifest = ctx.load_manifest(&graphs)?;
    let table = ctx.load_pairs()?;
    let split = &manifest.split;
    let train_pairs = samples(&split.train, &split.train, true, &graphs, &table)?;
    let val_pairs = samples(&split.val, &split.train, false, &graphs, &table)?;
    let model_config = ctx.config.model.build(&graphs)?;
    let train_config = TrainConfig { seed: ctx.seed, ..ctx.config.train.clone() };
    let start = Instant::now();
    let outcome = train(&graphs, &train_pairs, &val_pairs, model_config, &train_config)?;
    log::info!(
        "trained {} iterations in {:.1?}; best validation loss {:.6} at iteration {}",
        train_config.iterations,
        start.elapsed(),
        outcome.checkpoint.best_val_loss,
        outcome.checkpoint.iteration
    );
    let kind = ctx.config.model.kind;
    write(&ctx.out.join(checkpoint_file(kind)), &outcome.checkpoint.to_json())?;
    write(
        &ctx.out.join(format!("trace_{}.csv", kind_name(kind))),
        &TraceRow::to_csv(&outcome.trace),
    )?;
    Ok(outcome.checkpoint)
}

/// Writes one `report_<method>.json` per method plus `reports.csv`.
pub fn cmd_eval(ctx: &Context) -> Result<Vec<RankingReport>, HarnessError> {
    let (graphs, dataset_hash) = ctx.load_dataset()?;
    let manifest = ctx.load_manifest(&graphs)?;
    let table = ctx.load_pairs()?;
    let mut reports = Vec::new();
    for &method in &ctx.config.eval.methods {
        let model = method.model_kind().map(|k| ctx.load_model(k)).transpose()?;
        let start = Instant::now();
        let mut report = evaluate_method(method, model.as_ref(), &graphs, &manifest.split, &table)?;
        log::info!("evaluated {method} in {:.1?}", start.elapsed());
        report.seed = Some(ctx.seed);
        report.config_hash = Some(config_hash(&(
            ctx.seed,
            method,
            &dataset_hash,
            model.as_ref().map(|m| config_hash(&m.params)),
        )));
        write(&ctx.out.join(format!("report_{}.json", method.file_stem())), &to_json(&report))?;
        reports.push(report);
    }
    write(&ctx.out.join("reports.csv"), &RankingReport::to_csv(&reports))?;
    Ok(reports)
}

/// Writes `bench.json` and `bench.csv`.
pub fn cmd_bench(ctx: &Context) -> Result<BenchReport, HarnessError> {
    let (graphs, _) = ctx.load_dataset()?;
    let models: Vec<(Method, Option<SimilarityModel>)> = ctx
        .config
        .bench
        .methods
        .iter()
        .map(|&m| Ok((m, m.model_kind().map(|k| ctx.load_model(k)).transpose()?)))
        .collect::<Result<_, HarnessError>>()?;
    let methods: Vec<(Method, Option<&SimilarityModel>)> = models.iter().map(|(m, s)| (*m, s.as_ref())).collect();
    let report = run_bench(&graphs, &methods, ctx.config.bench.pairs_per_size, ctx.seed)?;
    write(&ctx.out.join("bench.json"), &to_json(&report))?;
    write(&ctx.out.join("bench.csv"), &report.to_csv())?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankOutput {
    pub seed: u64,
    pub method: String,
    pub query_index: Option<usize>,
    pub k: usize,
    pub results: Vec<RankEntry>,
}

/// Writes `rank.json`; returns it along with a plain-text table.
pub fn cmd_rank(ctx: &Context) -> Result<(RankOutput, String), HarnessError> {
    let (graphs, _) = ctx.load_dataset()?;
    let path = ctx.input(&ctx.inputs.checkpoint, &checkpoint_file(ctx.config.model.kind));
    let model = ModelCheckpoint::from_json(&read(&path)?)?.into_model()?;
    let opts = &ctx.config.rank;
    let (query, query_index) = match (&ctx.inputs.query, opts.query_index) {
        (Some(p), _) => (parse_graph(&read(p)?)?, None),
        (None, Some(q)) if q < graphs.len() => (graphs[q].clone(), Some(q)),
        (None, Some(q)) => return Err(HarnessError::Config(format!("query index {q} is out of range"))),
        (None, None) => return Err(HarnessError::MissingInput("rank needs a query file or rank.query_index".into())),
    };
    let candidates: Vec<usize> = (0..graphs.len()).filter(|&c| Some(c) != query_index).collect();
    let pairs_path = ctx.input(&ctx.inputs.pairs, PAIRS_FILE);
    let table = if pairs_path.exists() { Some(ctx.load_pairs()?) } else { None };
    let truth = table.as_ref().zip(query_index);
    let results = rank_candidates(&model, &query, &graphs, &candidates, opts.k, truth)?;
    let output = RankOutput {
        seed: ctx.seed,
        method: kind_name(model.config.kind).to_string(),
        query_index,
        k: opts.k,
        results,
    };
    write(&ctx.out.join("rank.json"), &to_json(&output))?;
    let text = format_rank_table(&output.results);
    Ok((output, text))
}
