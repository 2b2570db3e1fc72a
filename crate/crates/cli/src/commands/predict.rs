//! `attribkit predict`: per-document predicted label and class
//! probabilities as CSV.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;

use attribkit::models::Classifier;

use crate::Ctx;

use super::{load_bundle, write_artifact, InputArgs};

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Model bundle directory (from `train`).
    #[arg(long)]
    pub model: PathBuf,

    /// Proceed even when the stopword list differs from training time.
    #[arg(long)]
    pub allow_hash_mismatch: bool,
}

pub fn run(ctx: &Ctx, args: PredictArgs) -> anyhow::Result<()> {
    let corpus = args.input.load()?;
    let bundle = load_bundle(&args.model, args.allow_hash_mismatch)?;
    let pre = bundle.preprocessor();
    let class_names = &bundle.metadata.label_map;

    let mut csv = String::from("id,predicted");
    for name in class_names {
        write!(csv, ",p_{name}").unwrap();
    }
    csv.push_str(",oov_tokens\n");

    let mut total_oov = 0usize;
    for doc in corpus.iter() {
        let tokens = pre.process(doc);
        let (row, oov) = bundle.vocabulary.transform_counting(&tokens);
        total_oov += oov;
        let proba = bundle.model.predict_proba(&row)?;
        let predicted = bundle.model.predict(&row)?;
        write!(csv, "{},{}", doc.id, class_names[predicted]).unwrap();
        for p in &proba {
            write!(csv, ",{p:.6}").unwrap();
        }
        writeln!(csv, ",{oov}").unwrap();
    }
    write_artifact(&ctx.out.join("predictions.csv"), &csv)?;
    println!(
        "predicted {} documents ({} out-of-vocabulary tokens ignored)",
        corpus.len(),
        total_oov
    );
    Ok(())
}
