//! `attribkit profile`: aggregated per-class feature-importance profiles
//! over a sample of each class's documents.

use std::path::PathBuf;

use clap::Args;

use attribkit::corpus::encode_labels;
use attribkit::explain::{class_profile, ExplainSettings, InterpretableInstance};
use attribkit::seed::derived_seed;

use crate::config::resolve;
use crate::svg;
use crate::Ctx;

use super::{load_bundle, write_artifact, InputArgs};

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Model bundle directory (from `train`).
    #[arg(long)]
    pub model: PathBuf,

    /// Profile only this class (default: every class in the corpus).
    #[arg(long)]
    pub class: Option<String>,

    /// Instances sampled per class (corpus order).
    #[arg(long)]
    pub profile_instances: Option<usize>,

    #[arg(long)]
    pub lime_samples: Option<usize>,
    #[arg(long)]
    pub kernel_width: Option<f64>,
    #[arg(long)]
    pub top_k: Option<usize>,

    #[arg(long)]
    pub allow_hash_mismatch: bool,
}

pub fn run(ctx: &Ctx, args: ProfileArgs) -> anyhow::Result<()> {
    let corpus = args.input.load()?;
    let bundle = load_bundle(&args.model, args.allow_hash_mismatch)?;
    let task = bundle.task();
    let labels = encode_labels(&corpus, task)?;
    let pre = bundle.preprocessor();
    let settings = ExplainSettings {
        top_k: resolve(args.top_k, &ctx.config, "top-k", 10)?,
        n_samples: resolve(args.lime_samples, &ctx.config, "lime-samples", 1000)?,
        kernel_width: resolve(args.kernel_width, &ctx.config, "kernel-width", 0.25)?,
        ridge: 1.0,
    };
    let per_class = resolve(args.profile_instances, &ctx.config, "profile-instances", 10)?;
    let base_seed = derived_seed(ctx.seed, "lime");

    let class_indices: Vec<usize> = match &args.class {
        Some(name) => vec![bundle
            .metadata
            .label_map
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| {
                anyhow::anyhow!(
                    "unknown class {name:?}; model classes: {}",
                    bundle.metadata.label_map.join(", ")
                )
            })?],
        None => (0..bundle.metadata.label_map.len()).collect(),
    };

    for class_idx in class_indices {
        let class_name = &bundle.metadata.label_map[class_idx];
        let mut instances = Vec::new();
        let mut skipped = 0usize;
        for (doc, &label) in corpus.iter().zip(&labels) {
            if label != class_idx || instances.len() >= per_class {
                continue;
            }
            match InterpretableInstance::new(pre.process(doc), &bundle.vocabulary) {
                Ok(instance) => instances.push(instance),
                Err(e) => {
                    log::warn!("skipping {} for profile: {e}", doc.id);
                    skipped += 1;
                }
            }
        }
        if instances.is_empty() {
            log::warn!("class {class_name}: no usable instances, skipping profile");
            continue;
        }
        let profile = class_profile(
            &bundle.model,
            &instances,
            &bundle.vocabulary,
            class_idx,
            &settings,
            derived_seed(base_seed, class_name),
        )?;
        write_artifact(
            &ctx.out.join(format!("profile_{class_name}.json")),
            &profile.to_json(),
        )?;
        let title = format!(
            "top features for {class_name} over {} instances",
            profile.n_instances_aggregated
        );
        let signed: Vec<(String, f64)> = profile
            .entries
            .iter()
            .map(|(w, v)| (w.clone(), *v))
            .collect();
        write_artifact(
            &ctx.out.join(format!("profile_{class_name}.svg")),
            &svg::barchart(&signed, &title),
        )?;
        println!(
            "profiled {class_name}: {} instances, top word {:?}{}",
            profile.n_instances_aggregated,
            profile.entries.first().map(|(w, _)| w.as_str()).unwrap_or(""),
            if skipped > 0 {
                format!(" ({skipped} unexplainable skipped)")
            } else {
                String::new()
            }
        );
    }
    Ok(())
}
