//! `attribkit compare`: benchmark detectors on the held-out binary split.
//!
//! Detectors: the trained internal model (always answers Human/AI), the
//! built-in perplexity/burstiness baseline calibrated on the training side,
//! and optionally an external service (live endpoint or recorded fixtures).

use std::path::PathBuf;

use clap::Args;

use attribkit::corpus::{encode_labels, split, Category, SplitSpec, Task};
use attribkit::detector::{
    burstiness, compare, fit_calibration, train_lm, BaselineDetector, DetectorClient,
    DetectorVerdict, FixtureDetectorClient, HttpDetectorClient,
};
use attribkit::models::Classifier;
use attribkit::preprocess::{tokenize, TokenList};
use attribkit::seed::derived_seed;

use crate::config::resolve;
use crate::Ctx;

use super::{load_bundle, write_artifact, InputArgs};

/// Environment variable holding the external-detector API key. Never
/// logged or written to artifacts.
pub const API_KEY_ENV: &str = "ATTRIBKIT_API_KEY";

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Model bundle directory (from `train`); must be a binary model.
    #[arg(long)]
    pub model: PathBuf,

    #[arg(long)]
    pub test_fraction: Option<f64>,

    #[arg(long)]
    pub stratified: bool,

    /// External detector HTTP endpoint.
    #[arg(long)]
    pub detector_endpoint: Option<String>,

    /// Directory of recorded external responses keyed by document id.
    #[arg(long)]
    pub fixtures_dir: Option<PathBuf>,

    #[arg(long)]
    pub allow_hash_mismatch: bool,
}

pub fn run(ctx: &Ctx, args: CompareArgs) -> anyhow::Result<()> {
    let corpus = args.input.load()?;
    let bundle = load_bundle(&args.model, args.allow_hash_mismatch)?;
    if bundle.task() != Task::Binary {
        anyhow::bail!("compare needs a binary model; this bundle is multi-class");
    }
    let test_fraction = resolve(args.test_fraction, &ctx.config, "test-fraction", 0.2)?;
    let stratified = args.stratified || ctx.config.get("stratified")?.unwrap_or(false);

    let split_spec = SplitSpec::new(test_fraction, derived_seed(ctx.seed, "split"), stratified);
    let (train_corpus, test_corpus) = split(&corpus, &split_spec)?;
    let true_labels = encode_labels(&test_corpus, Task::Binary)?;

    // Internal model verdicts: always recognized, Human/AI only.
    let pre = bundle.preprocessor();
    let llms_idx = 1usize;
    let mut internal = Vec::with_capacity(test_corpus.len());
    for doc in test_corpus.iter() {
        let row = bundle.vocabulary.transform(&pre.process(doc));
        let p_ai = bundle.model.predict_proba(&row)?[llms_idx];
        internal.push(DetectorVerdict::from_internal_probability(p_ai));
    }

    // Baseline: bigram model over the training side's human documents,
    // logistic calibration on the full training side.
    let human_tokens: Vec<TokenList> = train_corpus
        .iter()
        .filter(|d| d.category == Category::Human)
        .map(|d| TokenList::new(tokenize(&d.text), &d.id))
        .collect();
    let lm = train_lm(&human_tokens, 1.0)?;
    let mut features = Vec::with_capacity(train_corpus.len());
    let mut calib_labels = Vec::with_capacity(train_corpus.len());
    for (doc, &label) in train_corpus
        .iter()
        .zip(&encode_labels(&train_corpus, Task::Binary)?)
    {
        let tokens = TokenList::new(tokenize(&doc.text), &doc.id);
        if tokens.is_empty() {
            continue;
        }
        let perplexity = lm.perplexity(&tokens)?;
        let burst = burstiness(&doc.text).unwrap_or(0.0);
        features.push([perplexity, burst]);
        calib_labels.push(label);
    }
    let calibration = fit_calibration(&features, &calib_labels)?;
    let baseline = BaselineDetector { lm, calibration };
    let mut baseline_verdicts = Vec::with_capacity(test_corpus.len());
    for doc in test_corpus.iter() {
        baseline_verdicts.push(baseline.verdict(&doc.text)?);
    }

    let mut detectors = vec![
        ("our-model".to_string(), internal),
        ("baseline-ppl-burst".to_string(), baseline_verdicts),
    ];

    // Optional external detector.
    let external_client: Option<Box<dyn DetectorClient>> = match (&args.fixtures_dir, &args.detector_endpoint)
    {
        (Some(dir), _) => Some(Box::new(FixtureDetectorClient { dir: dir.clone() })),
        (None, Some(endpoint)) => {
            let mut client = HttpDetectorClient::new(endpoint.clone());
            client.api_key = std::env::var(API_KEY_ENV).ok();
            Some(Box::new(client))
        }
        (None, None) => None,
    };
    if let Some(client) = external_client {
        let mut verdicts = Vec::with_capacity(test_corpus.len());
        for doc in test_corpus.iter() {
            verdicts.push(client.verdict(&doc.id, &doc.text)?);
        }
        detectors.push((client.name().to_string(), verdicts));
    }

    let report = compare(&detectors, &true_labels)?;
    write_artifact(&ctx.out.join("comparison.md"), &report.to_markdown())?;
    write_artifact(&ctx.out.join("comparison.csv"), &report.to_csv())?;

    for row in &report.rows {
        println!("{}: accuracy {:.1}%", row.detector, row.accuracy * 100.0);
    }
    Ok(())
}
