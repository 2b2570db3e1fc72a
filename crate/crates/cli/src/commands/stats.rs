//! `attribkit stats`: per-class top-k word frequencies (CSV) and word-cloud
//! SVGs.

use std::path::PathBuf;

use clap::Args;

use attribkit::corpus::{Category, Subcategory};
use attribkit::preprocess::{class_frequencies, wordcloud_data};

use crate::config::resolve;
use crate::svg;
use crate::Ctx;

use super::{preprocessor_from, write_artifact, InputArgs, TaskArg};

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// binary groups by human/llms; multi by the six tool classes.
    #[arg(long, value_enum)]
    pub task: Option<TaskArg>,

    /// Rows per frequency table.
    #[arg(long)]
    pub top_k: Option<usize>,

    /// Custom stopword list (one word per line).
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
}

pub fn run(ctx: &Ctx, args: StatsArgs) -> anyhow::Result<()> {
    let corpus = args.input.load()?;
    let task = resolve(args.task, &ctx.config, "task", TaskArg::Binary)?;
    let top_k = resolve(args.top_k, &ctx.config, "top-k", 10)?;
    let pre = preprocessor_from(args.stopwords.as_ref())?;

    let classes: Vec<(String, Box<dyn Fn(&attribkit::corpus::Document) -> bool>)> = match task {
        TaskArg::Binary => vec![
            (
                "human".to_string(),
                Box::new(|d: &attribkit::corpus::Document| d.category == Category::Human) as _,
            ),
            (
                "llms".to_string(),
                Box::new(|d: &attribkit::corpus::Document| d.category == Category::Llms) as _,
            ),
        ],
        TaskArg::Multi => Subcategory::ALL
            .into_iter()
            .map(|sub| {
                let name = sub.as_str().to_string();
                let pred =
                    Box::new(move |d: &attribkit::corpus::Document| d.subcategory == Some(sub)) as _;
                (name, pred)
            })
            .collect(),
    };

    for (name, select) in classes {
        let table = class_frequencies(&corpus, &pre, select, top_k)
            .map_err(|e| anyhow::anyhow!("class {name}: {e}"))?;
        write_artifact(&ctx.out.join(format!("freq_{name}.csv")), &table.to_csv())?;
        let cloud = wordcloud_data(&table);
        let title = format!("top {} words: {name}", table.entries.len());
        write_artifact(
            &ctx.out.join(format!("wordcloud_{name}.svg")),
            &svg::wordcloud(&cloud, &title),
        )?;
        println!(
            "{name}: {} tokens, top word {:?}",
            table.total_tokens,
            table.entries.first().map(|e| e.word.as_str()).unwrap_or("")
        );
    }
    Ok(())
}
