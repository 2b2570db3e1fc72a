//! attribkit: train, evaluate, explain and benchmark text attribution models
//! from one binary.
//!
//! Exit codes: 0 success, 2 validation/usage error, 3 I/O error, 4 numeric
//! failure.

mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ConfigFile;

/// Root seed used when neither flag nor config provides one.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "attribkit",
    version,
    about = "Attribute text to human authors or to the LLM tool that generated it"
)]
struct Cli {
    /// Key=value config file; explicit flags win over config values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Root seed for all derived random streams (split, bootstrap, lime,
    /// synthetic).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker-thread cap for parallel sections.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-class word frequency tables and word-cloud SVGs.
    Stats(commands::stats::StatsArgs),
    /// Generate a labeled synthetic corpus (JSONL).
    Synth(commands::synth::SynthArgs),
    /// Split, featurize, train and evaluate a model; persist the bundle.
    Train(commands::train::TrainArgs),
    /// Per-document labels and probabilities for a trained model.
    Predict(commands::predict::PredictArgs),
    /// Local explanations (JSON + SVG) for selected documents.
    Explain(commands::explain::ExplainArgs),
    /// Evaluate a trained model on a labeled corpus.
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Aggregated per-class feature-importance profiles.
    Profile(commands::profile::ProfileArgs),
    /// Benchmark detectors (internal model, built-in baseline, external
    /// service) on the held-out split.
    Compare(commands::compare::CompareArgs),
}

/// Everything commands need from the top level.
pub struct Ctx {
    pub seed: u64,
    pub out: PathBuf,
    pub config: ConfigFile,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::empty(),
    };
    let seed = cli
        .seed
        .or(config.get("seed")?)
        .unwrap_or(DEFAULT_SEED);
    let out = cli
        .out
        .clone()
        .or(config.get_path("out"))
        .unwrap_or_else(|| PathBuf::from("attribkit-out"));
    if let Some(jobs) = cli.jobs.or(config.get("jobs")?) {
        // ignore failure when a pool already exists (tests call run twice)
        let _ = rayon_thread_cap(jobs);
    }
    let ctx = Ctx { seed, out, config };

    match cli.command {
        Command::Stats(args) => commands::stats::run(&ctx, args),
        Command::Synth(args) => commands::synth::run(&ctx, args),
        Command::Train(args) => commands::train::run(&ctx, args),
        Command::Predict(args) => commands::predict::run(&ctx, args),
        Command::Explain(args) => commands::explain::run(&ctx, args),
        Command::Evaluate(args) => commands::evaluate::run(&ctx, args),
        Command::Profile(args) => commands::profile::run(&ctx, args),
        Command::Compare(args) => commands::compare::run(&ctx, args),
    }
}

fn rayon_thread_cap(jobs: usize) -> Result<(), Box<dyn std::error::Error>> {
    std::env::set_var("RAYON_NUM_THREADS", jobs.to_string());
    Ok(())
}

/// Maps the error chain onto the documented exit codes.
fn exit_code_for(err: &anyhow::Error) -> u8 {
    use attribkit::corpus::CorpusError;
    use attribkit::detector::DetectorError;
    use attribkit::eval::EvalError;
    use attribkit::features::FeatureError;
    use attribkit::models::{ModelError, PersistError};
    use attribkit::preprocess::PreprocessError;

    for cause in err.chain() {
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 3;
        }
        if let Some(e) = cause.downcast_ref::<CorpusError>() {
            return match e {
                CorpusError::Io { .. } => 3,
                _ => 2,
            };
        }
        if let Some(e) = cause.downcast_ref::<PreprocessError>() {
            return match e {
                PreprocessError::Io { .. } => 3,
                _ => 2,
            };
        }
        if let Some(e) = cause.downcast_ref::<FeatureError>() {
            return match e {
                FeatureError::Io { .. } => 3,
                _ => 2,
            };
        }
        if let Some(e) = cause.downcast_ref::<ModelError>() {
            return match e {
                ModelError::NonFiniteLoss { .. } => 4,
                ModelError::Persist(PersistError::Io { .. }) => 3,
                _ => 2,
            };
        }
        if let Some(e) = cause.downcast_ref::<PersistError>() {
            return match e {
                PersistError::Io { .. } => 3,
                _ => 2,
            };
        }
        if let Some(e) = cause.downcast_ref::<EvalError>() {
            return match e {
                EvalError::Model(ModelError::NonFiniteLoss { .. }) => 4,
                _ => 2,
            };
        }
        if let Some(e) = cause.downcast_ref::<DetectorError>() {
            return match e {
                DetectorError::Io { .. } | DetectorError::Transport { .. } => 3,
                _ => 2,
            };
        }
        if cause.downcast_ref::<attribkit::explain::ExplainError>().is_some() {
            return 2;
        }
    }
    2
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
