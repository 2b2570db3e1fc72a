//! `attribkit evaluate`: score a trained model on a labeled corpus.

use std::path::PathBuf;

use clap::Args;

use attribkit::corpus::encode_labels;
use attribkit::eval::evaluate;
use attribkit::features::FeatureMatrix;

use crate::Ctx;

use super::{load_bundle, InputArgs};
use super::train::write_report_artifacts;

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Model bundle directory (from `train`).
    #[arg(long)]
    pub model: PathBuf,

    #[arg(long)]
    pub allow_hash_mismatch: bool,
}

pub fn run(ctx: &Ctx, args: EvaluateArgs) -> anyhow::Result<()> {
    let corpus = args.input.load()?;
    let bundle = load_bundle(&args.model, args.allow_hash_mismatch)?;
    let task = bundle.task();
    let labels = encode_labels(&corpus, task)?;
    let pre = bundle.preprocessor();
    let tokens = pre.process_corpus(&corpus);
    let matrix = FeatureMatrix::from_token_lists(&tokens, labels, &bundle.vocabulary);

    let report = evaluate(&bundle.model, &matrix, &bundle.metadata.label_map)?;
    write_report_artifacts(ctx, &report, "Evaluation")?;
    println!(
        "evaluated {} documents: accuracy {:.1}%, macro-F1 {:.1}%",
        corpus.len(),
        report.accuracy * 100.0,
        report.macro_f1 * 100.0
    );
    Ok(())
}
