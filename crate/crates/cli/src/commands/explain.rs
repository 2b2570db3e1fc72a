//! `attribkit explain`: local explanations for selected documents, exported
//! as JSON and horizontal-bar SVG. Unexplainable documents are recorded and
//! the run continues.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;

use attribkit::explain::{explain_instance, ExplainSettings, InterpretableInstance};
use attribkit::models::Classifier;
use attribkit::seed::{derived_seed, rng_from};

use crate::config::resolve;
use crate::svg;
use crate::Ctx;

use super::{load_bundle, write_artifact, InputArgs};

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Model bundle directory (from `train`).
    #[arg(long)]
    pub model: PathBuf,

    /// Document id(s) to explain; default is the first document.
    #[arg(long = "doc-id")]
    pub doc_ids: Vec<String>,

    /// Target class name; default is each document's predicted class.
    #[arg(long)]
    pub class: Option<String>,

    #[arg(long)]
    pub lime_samples: Option<usize>,
    #[arg(long)]
    pub kernel_width: Option<f64>,
    #[arg(long)]
    pub top_k: Option<usize>,

    #[arg(long)]
    pub allow_hash_mismatch: bool,
}

pub fn run(ctx: &Ctx, args: ExplainArgs) -> anyhow::Result<()> {
    let corpus = args.input.load()?;
    let bundle = load_bundle(&args.model, args.allow_hash_mismatch)?;
    let pre = bundle.preprocessor();
    let settings = ExplainSettings {
        top_k: resolve(args.top_k, &ctx.config, "top-k", 10)?,
        n_samples: resolve(args.lime_samples, &ctx.config, "lime-samples", 1000)?,
        kernel_width: resolve(args.kernel_width, &ctx.config, "kernel-width", 0.25)?,
        ridge: 1.0,
    };

    let target_class_idx = match &args.class {
        Some(name) => Some(
            bundle
                .metadata
                .label_map
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| {
                    anyhow::anyhow!(
                        "unknown class {name:?}; model classes: {}",
                        bundle.metadata.label_map.join(", ")
                    )
                })?,
        ),
        None => None,
    };

    let selected: Vec<&attribkit::corpus::Document> = if args.doc_ids.is_empty() {
        corpus.iter().take(1).collect()
    } else {
        let mut docs = Vec::new();
        for id in &args.doc_ids {
            let doc = corpus
                .iter()
                .find(|d| &d.id == id)
                .ok_or_else(|| anyhow::anyhow!("document {id:?} not found in the input"))?;
            docs.push(doc);
        }
        docs
    };

    let lime_seed = derived_seed(ctx.seed, "lime");
    let mut errors = String::from("id,error\n");
    let mut n_ok = 0usize;
    let mut n_err = 0usize;
    for doc in selected {
        let tokens = pre.process(doc);
        let result = InterpretableInstance::new(tokens, &bundle.vocabulary).and_then(|instance| {
            let target = match target_class_idx {
                Some(t) => t,
                None => bundle.model.predict(&instance.original_row)?,
            };
            let mut rng = rng_from(derived_seed(lime_seed, &doc.id));
            explain_instance(
                &bundle.model,
                &instance,
                &bundle.vocabulary,
                target,
                &settings,
                &mut rng,
            )
        });
        match result {
            Ok(explanation) => {
                let class_name = &bundle.metadata.label_map[explanation.target_class];
                write_artifact(
                    &ctx.out.join(format!("explain_{}.json", doc.id)),
                    &explanation.to_json(),
                )?;
                let title = format!("{}: evidence for {class_name}", doc.id);
                write_artifact(
                    &ctx.out.join(format!("explain_{}.svg", doc.id)),
                    &svg::barchart(&explanation.weighted_words, &title),
                )?;
                n_ok += 1;
            }
            Err(e) => {
                log::warn!("explaining {}: {e}", doc.id);
                writeln!(errors, "{},{e}", doc.id).unwrap();
                n_err += 1;
            }
        }
    }
    if n_err > 0 {
        write_artifact(&ctx.out.join("explain_errors.csv"), &errors)?;
    }
    println!("explained {n_ok} documents ({n_err} skipped)");
    Ok(())
}
