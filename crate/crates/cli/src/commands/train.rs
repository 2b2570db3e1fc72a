//! `attribkit train`: split -> featurize (train side only) -> train ->
//! persist bundle + split manifest -> evaluate on the held-out side.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde_json::json;

use attribkit::corpus::{encode_labels, split, Corpus, SplitSpec, Task};
use attribkit::eval::{evaluate, EvalReport};
use attribkit::features::{FeatureMatrix, Vocabulary};
use attribkit::models::{
    train_boosted, train_forest, train_linear, BoostedParams, ForestParams, LinearParams, Model,
    ModelBundle,
};
use attribkit::preprocess::Preprocessor;
use attribkit::seed::derived_seed;

use crate::config::{resolve, resolve_opt};
use crate::svg;
use crate::Ctx;

use super::{preprocessor_from, write_artifact, InputArgs, TaskArg};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Forest,
    Boosted,
    Linear,
}

impl std::str::FromStr for ModelKind {
    type Err = String;
    fn from_str(s: &str) -> Result<ModelKind, String> {
        match s.to_lowercase().as_str() {
            "forest" => Ok(ModelKind::Forest),
            "boosted" => Ok(ModelKind::Boosted),
            "linear" => Ok(ModelKind::Linear),
            other => Err(format!("unknown model kind {other:?}")),
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[arg(long, value_enum)]
    pub task: Option<TaskArg>,

    /// Model family to train.
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,

    #[arg(long)]
    pub test_fraction: Option<f64>,

    #[arg(long)]
    pub stratified: bool,

    // forest
    #[arg(long)]
    pub n_trees: Option<usize>,
    /// Tree depth cap (forest and boosted).
    #[arg(long)]
    pub max_depth: Option<usize>,

    // boosted
    #[arg(long)]
    pub n_rounds: Option<usize>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,

    // linear
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub l2: Option<f64>,

    // features
    #[arg(long)]
    pub min_df: Option<u32>,
    #[arg(long)]
    pub max_features: Option<usize>,

    /// Custom stopword list (one word per line).
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
}

pub struct Trained {
    pub bundle: ModelBundle,
    pub report: EvalReport,
}

/// The train pipeline, reusable by other commands (compare).
pub fn train_pipeline(ctx: &Ctx, args: &TrainArgs, corpus: &Corpus) -> anyhow::Result<Trained> {
    let task: Task = resolve(args.task, &ctx.config, "task", TaskArg::Binary)?.into();
    let kind = resolve(args.model, &ctx.config, "model", ModelKind::Forest)?;
    let test_fraction = resolve(args.test_fraction, &ctx.config, "test-fraction", 0.2)?;
    let stratified = args.stratified || ctx.config.get("stratified")?.unwrap_or(false);
    let min_df = resolve(args.min_df, &ctx.config, "min-df", 1)?;
    let max_features = resolve_opt(args.max_features, &ctx.config, "max-features")?;

    // Multi-class needs tool labels on every document; fail fast with the
    // offending document named.
    let labels_all = encode_labels(corpus, task)?;
    drop(labels_all);

    let split_spec = SplitSpec::new(test_fraction, derived_seed(ctx.seed, "split"), stratified);
    let (train_corpus, test_corpus) = split(corpus, &split_spec)?;

    let pre: Preprocessor = preprocessor_from(args.stopwords.as_ref())?;
    let train_tokens = pre.process_corpus(&train_corpus);
    let test_tokens = pre.process_corpus(&test_corpus);
    let vocab = Vocabulary::fit(&train_tokens, min_df, max_features)?;

    let train_matrix = FeatureMatrix::from_token_lists(
        &train_tokens,
        encode_labels(&train_corpus, task)?,
        &vocab,
    );
    let test_matrix = FeatureMatrix::from_token_lists(
        &test_tokens,
        encode_labels(&test_corpus, task)?,
        &vocab,
    );

    let model = match kind {
        ModelKind::Forest => {
            let params = ForestParams {
                n_trees: resolve(args.n_trees, &ctx.config, "n-trees", 100)?,
                max_depth: resolve_opt(args.max_depth, &ctx.config, "max-depth")?,
                min_samples_split: 2,
                features_per_split: None,
                bootstrap: true,
                seed: derived_seed(ctx.seed, "bootstrap"),
            };
            Model::Forest(train_forest(&train_matrix, params)?)
        }
        ModelKind::Boosted => {
            let params = BoostedParams {
                n_rounds: resolve(args.n_rounds, &ctx.config, "n-rounds", 50)?,
                max_depth: resolve(args.max_depth, &ctx.config, "max-depth", 4)?,
                learning_rate: resolve(args.eta, &ctx.config, "eta", 0.3)?,
                lambda: resolve(args.lambda, &ctx.config, "lambda", 1.0)?,
                gamma: resolve(args.gamma, &ctx.config, "gamma", 0.0)?,
                seed: derived_seed(ctx.seed, "boost"),
            };
            Model::Boosted(train_boosted(&train_matrix, params)?)
        }
        ModelKind::Linear => {
            let params = LinearParams {
                epochs: resolve(args.epochs, &ctx.config, "epochs", 100)?,
                learning_rate: resolve(args.learning_rate, &ctx.config, "learning-rate", 0.5)?,
                l2: resolve(args.l2, &ctx.config, "l2", 1e-4)?,
                batch_size: 32,
                seed: derived_seed(ctx.seed, "linear"),
            };
            Model::Linear(train_linear(&train_matrix, params)?)
        }
    };

    let bundle = ModelBundle::new(model, task, vocab, pre.stopwords().clone());
    let report = evaluate(&bundle.model, &test_matrix, &task.class_names())?;

    // split manifest
    let manifest = json!({
        "test_fraction": test_fraction,
        "stratified": stratified,
        "seed": ctx.seed,
        "train_ids": train_corpus.iter().map(|d| d.id.as_str()).collect::<Vec<_>>(),
        "test_ids": test_corpus.iter().map(|d| d.id.as_str()).collect::<Vec<_>>(),
    });
    write_artifact(
        &ctx.out.join("split.json"),
        &serde_json::to_string_pretty(&manifest)?,
    )?;

    Ok(Trained { bundle, report })
}

pub fn write_report_artifacts(ctx: &Ctx, report: &EvalReport, title: &str) -> anyhow::Result<()> {
    write_artifact(&ctx.out.join("report.md"), &report.to_markdown(title))?;
    write_artifact(&ctx.out.join("metrics.csv"), &report.metrics_csv())?;
    write_artifact(&ctx.out.join("confusion.csv"), &report.confusion_csv(false))?;
    write_artifact(
        &ctx.out.join("confusion_pct.csv"),
        &report.confusion_csv(true),
    )?;
    write_artifact(
        &ctx.out.join("confusion.svg"),
        &svg::heatmap(&report.confusion_pct, &report.class_names, title),
    )?;
    let mut roc_csv = String::from("class,fpr,tpr\n");
    for (name, roc) in report.class_names.iter().zip(&report.roc) {
        if let Some(curve) = roc {
            for (fpr, tpr) in &curve.points {
                writeln!(roc_csv, "{name},{fpr:.6},{tpr:.6}").unwrap();
            }
        }
    }
    write_artifact(&ctx.out.join("roc.csv"), &roc_csv)?;
    Ok(())
}

pub fn run(ctx: &Ctx, args: TrainArgs) -> anyhow::Result<()> {
    let corpus = args.input.load()?;
    let trained = train_pipeline(ctx, &args, &corpus)?;

    let model_dir = ctx.out.join("model");
    trained.bundle.save(&model_dir)?;

    write_report_artifacts(ctx, &trained.report, "Held-out evaluation")?;

    // Training log: deliberately free of timestamps so identical runs
    // produce identical bytes.
    let mut log_text = String::new();
    writeln!(log_text, "task: {}", trained.bundle.metadata.task).unwrap();
    writeln!(log_text, "model: {}", trained.bundle.metadata.model_kind).unwrap();
    writeln!(log_text, "documents: {}", corpus.len()).unwrap();
    writeln!(log_text, "vocabulary: {}", trained.bundle.vocabulary.len()).unwrap();
    writeln!(log_text, "vocabulary_hash: {}", trained.bundle.metadata.vocabulary_hash).unwrap();
    writeln!(log_text, "stopword_hash: {}", trained.bundle.metadata.stopword_hash).unwrap();
    writeln!(log_text, "seed: {}", ctx.seed).unwrap();
    writeln!(
        log_text,
        "hyperparameters: {}",
        trained.bundle.metadata.hyperparameters
    )
    .unwrap();
    writeln!(log_text, "held_out_accuracy: {:.6}", trained.report.accuracy).unwrap();
    write_artifact(&ctx.out.join("train.log"), &log_text)?;

    println!(
        "trained {} ({}) on {} documents; held-out accuracy {:.1}%; bundle at {}",
        trained.bundle.metadata.model_kind,
        trained.bundle.metadata.task,
        corpus.len(),
        trained.report.accuracy * 100.0,
        model_dir.display()
    );
    Ok(())
}
