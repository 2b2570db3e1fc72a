//! `attribkit synth`: write a seeded synthetic corpus as JSONL.

use clap::Args;

use attribkit::eval::{generate_synthetic, SyntheticSpec};
use attribkit::seed::derived_seed;

use crate::config::{resolve, resolve_opt};
use crate::Ctx;

use super::{write_artifact, TaskArg};

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Class layout: binary (2 x 300) or multi (6 x 100).
    #[arg(long, value_enum)]
    pub task: Option<TaskArg>,

    /// Documents per class (overrides the layout default).
    #[arg(long)]
    pub docs_per_class: Option<usize>,

    /// Marker-word rate in [0, 1]; lower is harder.
    #[arg(long)]
    pub marker_weight: Option<f64>,
}

pub fn run(ctx: &Ctx, args: SynthArgs) -> anyhow::Result<()> {
    let task = resolve(args.task, &ctx.config, "task", TaskArg::Binary)?;
    let seed = derived_seed(ctx.seed, "synthetic");
    let mut spec = match task {
        TaskArg::Binary => SyntheticSpec::binary_default(seed),
        TaskArg::Multi => SyntheticSpec::multi_default(seed),
    };
    if let Some(weight) = resolve_opt(args.marker_weight, &ctx.config, "marker-weight")? {
        spec = spec.with_marker_weight(weight);
    }
    if let Some(n) = resolve_opt(args.docs_per_class, &ctx.config, "docs-per-class")? {
        for class in &mut spec.classes {
            class.n_docs = n;
        }
    }
    let corpus = generate_synthetic(&spec)?;
    std::fs::create_dir_all(&ctx.out)?;
    let path = ctx.out.join("synthetic.jsonl");
    corpus.save_jsonl(&path)?;
    let summary = format!(
        "documents={} classes={} seed={}\n",
        corpus.len(),
        spec.classes.len(),
        ctx.seed
    );
    write_artifact(&ctx.out.join("synthetic.summary.txt"), &summary)?;
    println!("wrote {} documents to {}", corpus.len(), path.display());
    Ok(())
}
