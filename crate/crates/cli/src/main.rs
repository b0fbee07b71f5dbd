//! `gedforge`: generate corpora, compute ground truth, train, evaluate,
//! benchmark and rank.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context as _;
use clap::{Parser, Subcommand, ValueEnum};
use gedforge_core::harness::{self, Context, HarnessError, Inputs, Method, RunConfig};
use gedforge_core::model::ModelKind;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "gedforge", version, about = "Graph edit distance toolkit")]
struct Cli {
    /// Root seed for every random substream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; also where inputs are looked up by default.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long, global = true)]
    dataset: Option<PathBuf>,
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[arg(long, global = true)]
    pairs: Option<PathBuf>,
    #[arg(long, global = true)]
    checkpoint: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Gsimcnn,
    Embavg,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus and its split.
    Gen,
    /// Label every training, validation and test pair with a GED.
    Groundtruth,
    /// Train a model on the training pairs.
    Train {
        #[arg(long, value_enum)]
        model: Option<ModelArg>,
    },
    /// Rank test queries against training and validation graphs.
    Eval {
        /// Comma-separated methods, e.g. `gsimcnn,beam:100,hed`.
        #[arg(long, value_delimiter = ',')]
        methods: Vec<Method>,
    },
    /// Time each method against pair size.
    Bench {
        #[arg(long, value_delimiter = ',')]
        methods: Vec<Method>,
    },
    /// Top-k most similar dataset graphs for a query.
    Rank {
        /// Query graph file; otherwise `--query-index` picks a dataset graph.
        #[arg(long)]
        query: Option<PathBuf>,
        #[arg(long)]
        query_index: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Gen => "gen",
            Command::Groundtruth => "groundtruth",
            Command::Train { .. } => "train",
            Command::Eval { .. } => "eval",
            Command::Bench { .. } => "bench",
            Command::Rank { .. } => "rank",
        }
    }
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    command: &'a str,
    kind: &'a str,
    message: String,
}

fn report_error(command: &str, kind: &str, message: String) {
    let record = ErrorRecord { error: ErrorBody { command, kind, message } };
    eprintln!("{}", serde_json::to_string(&record).expect("error record serializes"));
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("summary serializes"));
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    let mut query = None;
    match &cli.command {
        Command::Train { model: Some(m) } => {
            config.model.kind = match m {
                ModelArg::Gsimcnn => ModelKind::Gsimcnn,
                ModelArg::Embavg => ModelKind::Embavg,
            }
        }
        Command::Eval { methods } if !methods.is_empty() => config.eval.methods = methods.clone(),
        Command::Bench { methods } if !methods.is_empty() => config.bench.methods = methods.clone(),
        Command::Rank { query: q, query_index, k } => {
            query = q.clone();
            if query_index.is_some() {
                config.rank.query_index = *query_index;
            }
            if let Some(k) = k {
                config.rank.k = *k;
            }
        }
        _ => {}
    }
    let ctx = Context {
        seed: cli.seed,
        out: cli.out.clone(),
        config,
        inputs: Inputs {
            dataset: cli.dataset.clone(),
            manifest: cli.manifest.clone(),
            pairs: cli.pairs.clone(),
            checkpoint: cli.checkpoint.clone(),
            query,
        },
    };
    match cli.command {
        Command::Gen => {
            let m = harness::cmd_gen(&ctx)?;
            print_json(&serde_json::json!({
                "seed": m.seed,
                "config_hash": m.config_hash,
                "dataset_hash": m.dataset_hash,
                "graphs": m.split.len(),
                "train": m.split.train.len(),
                "val": m.split.val.len(),
                "test": m.split.test.len(),
            }));
        }
        Command::Groundtruth => print_json(&harness::cmd_groundtruth(&ctx)?),
        Command::Train { .. } => {
            let ckpt = harness::cmd_train(&ctx)?;
            print_json(&serde_json::json!({
                "seed": ckpt.seed,
                "config_hash": ckpt.config_hash,
                "iteration": ckpt.iteration,
                "best_val_loss": ckpt.best_val_loss,
            }));
        }
        Command::Eval { .. } => {
            let reports = harness::cmd_eval(&ctx)?;
            print!("{}", gedforge_core::metrics::RankingReport::to_csv(&reports));
        }
        Command::Bench { .. } => print!("{}", harness::cmd_bench(&ctx)?.to_csv()),
        Command::Rank { .. } => print!("{}", harness::cmd_rank(&ctx)?.1),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report_error("", "usage", e.to_string().trim().to_string());
            return ExitCode::from(2);
        }
    };
    let command = cli.command.name();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let kind = err.downcast_ref::<HarnessError>().map_or("io", HarnessError::kind);
            report_error(command, kind, format!("{err:#}"));
            ExitCode::FAILURE
        }
    }
}
