//! Subcommand implementations.

pub mod compare;
pub mod evaluate;
pub mod explain;
pub mod predict;
pub mod profile;
pub mod stats;
pub mod synth;
pub mod train;

use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, ValueEnum};

use attribkit::corpus::{Corpus, Task};
use attribkit::models::ModelBundle;
use attribkit::preprocess::{Preprocessor, StopwordSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    Binary,
    Multi,
}

impl From<TaskArg> for Task {
    fn from(value: TaskArg) -> Task {
        match value {
            TaskArg::Binary => Task::Binary,
            TaskArg::Multi => Task::Multi,
        }
    }
}

impl std::str::FromStr for TaskArg {
    type Err = String;
    fn from_str(s: &str) -> Result<TaskArg, String> {
        match s.to_lowercase().as_str() {
            "binary" => Ok(TaskArg::Binary),
            "multi" => Ok(TaskArg::Multi),
            other => Err(format!("unknown task {other:?}")),
        }
    }
}

/// Input corpus flags shared by data-consuming subcommands.
#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input dataset(s); repeat to merge several files.
    #[arg(long = "input", required = true)]
    pub input: Vec<PathBuf>,

    /// Input format; default infers from the file extension.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

impl InputArgs {
    /// Loads and merges all inputs, rejecting duplicate ids across files.
    pub fn load(&self) -> anyhow::Result<Corpus> {
        let mut corpus: Option<Corpus> = None;
        for path in &self.input {
            let format = match self.format {
                Some(f) => f,
                None => infer_format(path)?,
            };
            let loaded = match format {
                FormatArg::Csv => Corpus::load_kaggle_csv(path),
                FormatArg::Jsonl => Corpus::load_jsonl(path),
            }
            .with_context(|| format!("loading {}", path.display()))?;
            corpus = Some(match corpus {
                None => loaded,
                Some(existing) => existing.merge(loaded)?,
            });
        }
        corpus.ok_or_else(|| anyhow::anyhow!("no input files given"))
    }
}

fn infer_format(path: &Path) -> anyhow::Result<FormatArg> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Ok(FormatArg::Csv),
        Some("jsonl") | Some("json") => Ok(FormatArg::Jsonl),
        other => anyhow::bail!(
            "cannot infer format from extension {other:?} for {}; pass --format",
            path.display()
        ),
    }
}

/// Loads a model bundle directory and applies the readiness gate.
pub fn load_bundle(dir: &Path, allow_hash_mismatch: bool) -> anyhow::Result<ModelBundle> {
    let bundle = ModelBundle::load(dir)
        .with_context(|| format!("loading model bundle from {}", dir.display()))?;
    bundle.check_ready(allow_hash_mismatch)?;
    Ok(bundle)
}

/// Builds the preprocessor from an optional custom stopword list.
pub fn preprocessor_from(stopwords: Option<&PathBuf>) -> anyhow::Result<Preprocessor> {
    let set = match stopwords {
        Some(path) => StopwordSet::from_file(path)?,
        None => StopwordSet::default_list(),
    };
    Ok(Preprocessor::new(set))
}

/// Writes a text artifact, creating parent directories.
pub fn write_artifact(path: &Path, contents: &str) -> anyhow::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("creating directory {}", parent.display()))?;
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(())
}
