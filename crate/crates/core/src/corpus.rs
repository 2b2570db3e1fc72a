//! Labeled essay corpora: loading, validation, label encoding and seeded
//! train/test splitting.
//!
//! Two on-disk carriers are supported. The Kaggle-style CSV carries only the
//! binary `generated` flag, so its LLM rows have no tool label and can feed
//! binary tasks only. The JSONL carrier has full six-way labels and is what
//! the synthetic generator emits.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed::rng_from;

/// Binary origin label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Human,
    Llms,
}

impl Category {
    pub fn as_str(&self) -> &'static str {
        match self {
            Category::Human => "human",
            Category::Llms => "llms",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Six-way origin label: human or one of the five LLM tools.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subcategory {
    Human,
    Chatgpt,
    Llama,
    Bard,
    Claude,
    Perplexity,
}

impl Subcategory {
    pub const ALL: [Subcategory; 6] = [
        Subcategory::Human,
        Subcategory::Chatgpt,
        Subcategory::Llama,
        Subcategory::Bard,
        Subcategory::Claude,
        Subcategory::Perplexity,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Subcategory::Human => "human",
            Subcategory::Chatgpt => "chatgpt",
            Subcategory::Llama => "llama",
            Subcategory::Bard => "bard",
            Subcategory::Claude => "claude",
            Subcategory::Perplexity => "perplexity",
        }
    }

    /// Case-insensitive parse; `Err` carries the list of accepted names.
    pub fn parse(value: &str) -> Result<Subcategory, CorpusError> {
        let lower = value.to_lowercase();
        Subcategory::ALL
            .iter()
            .find(|s| s.as_str() == lower)
            .copied()
            .ok_or_else(|| CorpusError::UnknownSubcategory {
                value: value.to_string(),
                allowed: Subcategory::ALL.map(|s| s.as_str()).join(", "),
            })
    }

    /// Stable class index used for multi-class label encoding.
    pub fn class_index(&self) -> usize {
        match self {
            Subcategory::Human => 0,
            Subcategory::Chatgpt => 1,
            Subcategory::Llama => 2,
            Subcategory::Bard => 3,
            Subcategory::Claude => 4,
            Subcategory::Perplexity => 5,
        }
    }
}

impl fmt::Display for Subcategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("missing required column: {column}")]
    MissingColumn { column: String },
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("document {id}: text is empty")]
    EmptyText { id: String },
    #[error("document {id}: prompt_id must be 0 or 1, got {value}")]
    BadPromptId { id: String, value: i64 },
    #[error("duplicate document id: {id}")]
    DuplicateId { id: String },
    #[error("unknown subcategory {value:?}; allowed values: {allowed}")]
    UnknownSubcategory { value: String, allowed: String },
    #[error("document {id}: category {category} is inconsistent with subcategory {subcategory}")]
    InconsistentLabels {
        id: String,
        category: String,
        subcategory: String,
    },
    #[error("document {id} has no tool label; multi-class encoding needs one")]
    UnknownTool { id: String },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("test fraction must be in (0, 1), got {0}")]
    BadTestFraction(f64),
    #[error("split leaves the {side} side empty (n={n}, test_fraction={fraction})")]
    EmptySplitSide {
        side: &'static str,
        n: usize,
        fraction: f64,
    },
}

/// One labeled essay.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    /// 0 = "Car-free cities", 1 = "Does the electoral college work?".
    pub prompt_id: u8,
    pub text: String,
    pub category: Category,
    /// `None` means the document is LLM-generated but the tool is unknown
    /// (Kaggle rows). Such documents are usable for binary tasks only.
    pub subcategory: Option<Subcategory>,
}

impl Document {
    /// Validates label consistency, prompt id and non-empty text.
    pub fn new(
        id: impl Into<String>,
        prompt_id: u8,
        text: impl Into<String>,
        category: Category,
        subcategory: Option<Subcategory>,
    ) -> Result<Document, CorpusError> {
        let id = id.into();
        let text = text.into();
        if text.trim().is_empty() {
            return Err(CorpusError::EmptyText { id });
        }
        if prompt_id > 1 {
            return Err(CorpusError::BadPromptId {
                id,
                value: prompt_id as i64,
            });
        }
        let consistent = match (category, subcategory) {
            (Category::Human, Some(Subcategory::Human)) => true,
            (Category::Llms, Some(sub)) => sub != Subcategory::Human,
            (Category::Llms, None) => true,
            _ => false,
        };
        if !consistent {
            return Err(CorpusError::InconsistentLabels {
                id,
                category: category.as_str().to_string(),
                subcategory: subcategory
                    .map(|s| s.as_str().to_string())
                    .unwrap_or_else(|| "none".to_string()),
            });
        }
        Ok(Document {
            id,
            prompt_id,
            text,
            category,
            subcategory,
        })
    }
}

/// An immutable collection of documents plus a record of where they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    documents: Vec<Document>,
    source_manifest: Vec<(String, usize)>,
}

impl Corpus {
    /// Builds a corpus, rejecting duplicate ids.
    pub fn from_documents(
        documents: Vec<Document>,
        source: impl Into<String>,
    ) -> Result<Corpus, CorpusError> {
        let mut seen = HashSet::new();
        for doc in &documents {
            if !seen.insert(doc.id.clone()) {
                return Err(CorpusError::DuplicateId { id: doc.id.clone() });
            }
        }
        let manifest = vec![(source.into(), documents.len())];
        Ok(Corpus {
            documents,
            source_manifest: manifest,
        })
    }

    /// Merges two corpora. Duplicate ids across sources are rejected rather
    /// than deduplicated so provenance stays auditable.
    pub fn merge(mut self, other: Corpus) -> Result<Corpus, CorpusError> {
        let mut seen: HashSet<&str> = self.documents.iter().map(|d| d.id.as_str()).collect();
        for doc in &other.documents {
            if seen.contains(doc.id.as_str()) {
                return Err(CorpusError::DuplicateId { id: doc.id.clone() });
            }
            seen.insert(doc.id.as_str());
        }
        drop(seen);
        self.documents.extend(other.documents);
        self.source_manifest.extend(other.source_manifest);
        Ok(self)
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn source_manifest(&self) -> &[(String, usize)] {
        &self.source_manifest
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Document> {
        self.documents.iter()
    }

    /// Number of documents per binary category, as (human, llms).
    pub fn category_counts(&self) -> (usize, usize) {
        let human = self
            .documents
            .iter()
            .filter(|d| d.category == Category::Human)
            .count();
        (human, self.documents.len() - human)
    }

    /// Loads the Kaggle-schema CSV: columns `id`, `prompt_id`, `text`,
    /// `generated` (0 = student, 1 = LLM). LLM rows get no tool label.
    pub fn load_kaggle_csv(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(path)
            .map_err(|e| CorpusError::Io {
                path: path.display().to_string(),
                source: match e.into_kind() {
                    csv::ErrorKind::Io(io) => io,
                    other => std::io::Error::other(format!("{other:?}")),
                },
            })?;

        let headers = reader
            .headers()
            .map_err(|e| CorpusError::Row {
                row: 0,
                message: e.to_string(),
            })?
            .clone();
        let col = |name: &str| -> Result<usize, CorpusError> {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| CorpusError::MissingColumn {
                    column: name.to_string(),
                })
        };
        let id_col = col("id")?;
        let prompt_col = col("prompt_id")?;
        let text_col = col("text")?;
        let generated_col = col("generated")?;

        let mut documents = Vec::new();
        for (row_idx, record) in reader.records().enumerate() {
            let row = row_idx + 1; // 1-based data rows
            let record = record.map_err(|e| CorpusError::Row {
                row,
                message: e.to_string(),
            })?;
            let field = |idx: usize| record.get(idx).unwrap_or("").to_string();
            let id = field(id_col);
            let prompt_id: u8 = field(prompt_col).trim().parse().map_err(|_| CorpusError::Row {
                row,
                message: format!("prompt_id is not an integer: {:?}", field(prompt_col)),
            })?;
            let generated = field(generated_col);
            let (category, subcategory) = match generated.trim() {
                "0" => (Category::Human, Some(Subcategory::Human)),
                "1" => (Category::Llms, None),
                other => {
                    return Err(CorpusError::Row {
                        row,
                        message: format!("generated must be 0 or 1, got {other:?}"),
                    })
                }
            };
            documents.push(Document::new(id, prompt_id, field(text_col), category, subcategory)?);
        }
        Corpus::from_documents(documents, path.display().to_string())
    }

    /// Loads the JSONL carrier: one object per line with keys `id`,
    /// `prompt_id`, `text`, `category`, `subcategory`. A `null` subcategory
    /// marks an LLM document with unknown tool. Unknown keys are ignored
    /// with a warning.
    pub fn load_jsonl(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| CorpusError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let reader = BufReader::new(file);

        let mut documents = Vec::new();
        for (line_idx, line) in reader.lines().enumerate() {
            let row = line_idx + 1;
            let line = line.map_err(|e| CorpusError::Io {
                path: path.display().to_string(),
                source: e,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let value: serde_json::Value =
                serde_json::from_str(&line).map_err(|e| CorpusError::Row {
                    row,
                    message: format!("invalid JSON: {e}"),
                })?;
            let obj = value.as_object().ok_or_else(|| CorpusError::Row {
                row,
                message: "line is not a JSON object".to_string(),
            })?;
            for key in obj.keys() {
                if !matches!(key.as_str(), "id" | "prompt_id" | "text" | "category" | "subcategory")
                {
                    log::warn!("{}:{row}: ignoring unknown key {key:?}", path.display());
                }
            }
            let get = |key: &str| -> Result<&serde_json::Value, CorpusError> {
                obj.get(key).ok_or_else(|| CorpusError::Row {
                    row,
                    message: format!("missing key {key:?}"),
                })
            };
            let id = get("id")?
                .as_str()
                .ok_or_else(|| CorpusError::Row {
                    row,
                    message: "id must be a string".to_string(),
                })?
                .to_string();
            let prompt_id = get("prompt_id")?.as_u64().ok_or_else(|| CorpusError::Row {
                row,
                message: "prompt_id must be a non-negative integer".to_string(),
            })?;
            let text = get("text")?
                .as_str()
                .ok_or_else(|| CorpusError::Row {
                    row,
                    message: "text must be a string".to_string(),
                })?
                .to_string();
            let category_str = get("category")?.as_str().ok_or_else(|| CorpusError::Row {
                row,
                message: "category must be a string".to_string(),
            })?;
            let category = match category_str.to_lowercase().as_str() {
                "human" => Category::Human,
                "llms" => Category::Llms,
                other => {
                    return Err(CorpusError::Row {
                        row,
                        message: format!("category must be \"human\" or \"llms\", got {other:?}"),
                    })
                }
            };
            let subcategory = match get("subcategory")? {
                serde_json::Value::Null => None,
                serde_json::Value::String(s) => Some(Subcategory::parse(s)?),
                _ => {
                    return Err(CorpusError::Row {
                        row,
                        message: "subcategory must be a string or null".to_string(),
                    })
                }
            };
            let prompt_id = u8::try_from(prompt_id).map_err(|_| CorpusError::BadPromptId {
                id: id.clone(),
                value: prompt_id as i64,
            })?;
            documents.push(Document::new(id, prompt_id, text, category, subcategory)?);
        }
        Corpus::from_documents(documents, path.display().to_string())
    }

    /// Writes the corpus in the JSONL carrier format; `load_jsonl` of the
    /// output reproduces the same documents.
    pub fn save_jsonl(&self, path: impl AsRef<Path>) -> Result<(), CorpusError> {
        #[derive(Serialize)]
        struct Record<'a> {
            id: &'a str,
            prompt_id: u8,
            text: &'a str,
            category: Category,
            subcategory: Option<Subcategory>,
        }
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| CorpusError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let mut writer = BufWriter::new(file);
        for doc in &self.documents {
            let record = Record {
                id: &doc.id,
                prompt_id: doc.prompt_id,
                text: &doc.text,
                category: doc.category,
                subcategory: doc.subcategory,
            };
            let line = serde_json::to_string(&record).expect("record serializes");
            writeln!(writer, "{line}").map_err(|e| CorpusError::Io {
                path: path.display().to_string(),
                source: e,
            })?;
        }
        writer.flush().map_err(|e| CorpusError::Io {
            path: path.display().to_string(),
            source: e,
        })
    }
}

/// Classification task arity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Binary,
    Multi,
}

impl Task {
    pub fn n_classes(&self) -> usize {
        match self {
            Task::Binary => 2,
            Task::Multi => 6,
        }
    }

    /// Class names in label-index order.
    pub fn class_names(&self) -> Vec<String> {
        match self {
            Task::Binary => vec!["human".to_string(), "llms".to_string()],
            Task::Multi => Subcategory::ALL.map(|s| s.as_str().to_string()).to_vec(),
        }
    }
}

/// Encodes documents to integer labels.
///
/// Binary: human = 0, llms = 1. Multi: human = 0, chatgpt = 1, llama = 2,
/// bard = 3, claude = 4, perplexity = 5; the mapping is fixed and recorded
/// in persisted model metadata.
pub fn encode_labels(corpus: &Corpus, task: Task) -> Result<Vec<usize>, CorpusError> {
    corpus
        .iter()
        .map(|doc| match task {
            Task::Binary => Ok(match doc.category {
                Category::Human => 0,
                Category::Llms => 1,
            }),
            Task::Multi => doc
                .subcategory
                .map(|s| s.class_index())
                .ok_or_else(|| CorpusError::UnknownTool { id: doc.id.clone() }),
        })
        .collect()
}

/// Train/test split configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl SplitSpec {
    pub fn new(test_fraction: f64, seed: u64, stratified: bool) -> SplitSpec {
        SplitSpec {
            test_fraction,
            seed,
            stratified,
        }
    }
}

impl Default for SplitSpec {
    fn default() -> SplitSpec {
        SplitSpec {
            test_fraction: 0.2,
            seed: 0,
            stratified: false,
        }
    }
}

/// Splits a corpus into (train, test).
///
/// Deterministic given the seed. Unstratified mode is a uniform seeded
/// shuffle taking `round(test_fraction * n)` documents for the test side;
/// stratified mode allocates `round(test_fraction * class_n)` per
/// (category, subcategory) stratum. Both sides preserve original corpus
/// order.
pub fn split(corpus: &Corpus, spec: &SplitSpec) -> Result<(Corpus, Corpus), CorpusError> {
    if corpus.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(CorpusError::BadTestFraction(spec.test_fraction));
    }
    let n = corpus.len();
    let mut rng = rng_from(spec.seed);

    let mut test_indices: Vec<usize> = Vec::new();
    if spec.stratified {
        // Strata keyed by (category, subcategory); iteration order follows
        // first appearance in the corpus, which is deterministic.
        let mut strata: Vec<((Category, Option<Subcategory>), Vec<usize>)> = Vec::new();
        for (idx, doc) in corpus.iter().enumerate() {
            let key = (doc.category, doc.subcategory);
            match strata.iter_mut().find(|(k, _)| *k == key) {
                Some((_, members)) => members.push(idx),
                None => strata.push((key, vec![idx])),
            }
        }
        for (_, mut members) in strata {
            let take = (spec.test_fraction * members.len() as f64).round() as usize;
            members.shuffle(&mut rng);
            test_indices.extend(members.into_iter().take(take));
        }
    } else {
        let mut indices: Vec<usize> = (0..n).collect();
        indices.shuffle(&mut rng);
        let take = (spec.test_fraction * n as f64).round() as usize;
        test_indices.extend(indices.into_iter().take(take));
    }

    let test_set: HashSet<usize> = test_indices.iter().copied().collect();
    if test_set.is_empty() {
        return Err(CorpusError::EmptySplitSide {
            side: "test",
            n,
            fraction: spec.test_fraction,
        });
    }
    if test_set.len() == n {
        return Err(CorpusError::EmptySplitSide {
            side: "train",
            n,
            fraction: spec.test_fraction,
        });
    }

    let mut train_docs = Vec::with_capacity(n - test_set.len());
    let mut test_docs = Vec::with_capacity(test_set.len());
    for (idx, doc) in corpus.iter().enumerate() {
        if test_set.contains(&idx) {
            test_docs.push(doc.clone());
        } else {
            train_docs.push(doc.clone());
        }
    }
    let train = Corpus {
        documents: train_docs,
        source_manifest: corpus.source_manifest.clone(),
    };
    let test = Corpus {
        documents: test_docs,
        source_manifest: corpus.source_manifest.clone(),
    };
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, category: Category, subcategory: Option<Subcategory>) -> Document {
        Document::new(id, 0, format!("essay text for {id}"), category, subcategory).unwrap()
    }

    fn write_temp(content: &str, ext: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::Builder::new().suffix(ext).tempfile().unwrap();
        file.write_all(content.as_bytes()).unwrap();
        file.flush().unwrap();
        file
    }

    #[test]
    fn kaggle_csv_roundtrips_rows_in_order() {
        let csv = "id,prompt_id,text,generated\n\
                   a1,0,Cars are everywhere in cities.,0\n\
                   a2,1,The electoral college has critics.,0\n\
                   a3,0,Urban planning without cars.,1\n\
                   a4,1,Voting systems differ.,1\n";
        let file = write_temp(csv, ".csv");
        let corpus = Corpus::load_kaggle_csv(file.path()).unwrap();
        assert_eq!(corpus.len(), 4);
        let ids: Vec<&str> = corpus.iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids, ["a1", "a2", "a3", "a4"]);
        assert_eq!(corpus.documents()[0].category, Category::Human);
        assert_eq!(corpus.documents()[0].subcategory, Some(Subcategory::Human));
        assert_eq!(corpus.documents()[2].category, Category::Llms);
        assert_eq!(corpus.documents()[2].subcategory, None);
        assert_eq!(corpus.source_manifest().len(), 1);
        assert_eq!(corpus.source_manifest()[0].1, 4);
    }

    #[test]
    fn kaggle_csv_missing_column_names_it() {
        let csv = "id,prompt_id,generated\na1,0,0\n";
        let file = write_temp(csv, ".csv");
        let err = Corpus::load_kaggle_csv(file.path()).unwrap_err();
        match err {
            CorpusError::MissingColumn { column } => assert_eq!(column, "text"),
            other => panic!("expected MissingColumn, got {other:?}"),
        }
    }

    #[test]
    fn kaggle_csv_bad_generated_is_row_indexed() {
        let csv = "id,prompt_id,text,generated\na1,0,ok text,0\na2,0,bad row,7\n";
        let file = write_temp(csv, ".csv");
        let err = Corpus::load_kaggle_csv(file.path()).unwrap_err();
        match err {
            CorpusError::Row { row, .. } => assert_eq!(row, 2),
            other => panic!("expected Row, got {other:?}"),
        }
    }

    #[test]
    fn kaggle_csv_empty_text_rejected() {
        let csv = "id,prompt_id,text,generated\na1,0,   ,0\n";
        let file = write_temp(csv, ".csv");
        let err = Corpus::load_kaggle_csv(file.path()).unwrap_err();
        assert!(matches!(err, CorpusError::EmptyText { .. }));
    }

    #[test]
    fn jsonl_parses_full_labels() {
        let line = r#"{"id":"c1","prompt_id":1,"text":"Dear Senator, I write to express strong support.","category":"llms","subcategory":"llama"}"#;
        let file = write_temp(line, ".jsonl");
        let corpus = Corpus::load_jsonl(file.path()).unwrap();
        assert_eq!(corpus.len(), 1);
        assert_eq!(corpus.documents()[0].category, Category::Llms);
        assert_eq!(corpus.documents()[0].subcategory, Some(Subcategory::Llama));
    }

    #[test]
    fn jsonl_inconsistent_labels_rejected() {
        let line = r#"{"id":"c1","prompt_id":0,"text":"hello there world","category":"human","subcategory":"chatgpt"}"#;
        let file = write_temp(line, ".jsonl");
        let err = Corpus::load_jsonl(file.path()).unwrap_err();
        assert!(matches!(err, CorpusError::InconsistentLabels { .. }));
    }

    #[test]
    fn jsonl_unknown_subcategory_lists_allowed() {
        let line = r#"{"id":"c1","prompt_id":0,"text":"hello","category":"llms","subcategory":"gpt4"}"#;
        let file = write_temp(line, ".jsonl");
        let err = Corpus::load_jsonl(file.path()).unwrap_err();
        match err {
            CorpusError::UnknownSubcategory { value, allowed } => {
                assert_eq!(value, "gpt4");
                assert!(allowed.contains("perplexity"));
            }
            other => panic!("expected UnknownSubcategory, got {other:?}"),
        }
    }

    #[test]
    fn jsonl_roundtrip_preserves_documents() {
        let docs = vec![
            doc("h1", Category::Human, Some(Subcategory::Human)),
            doc("l1", Category::Llms, Some(Subcategory::Claude)),
            doc("l2", Category::Llms, None),
        ];
        let corpus = Corpus::from_documents(docs, "test").unwrap();
        let file = tempfile::Builder::new().suffix(".jsonl").tempfile().unwrap();
        corpus.save_jsonl(file.path()).unwrap();
        let reloaded = Corpus::load_jsonl(file.path()).unwrap();
        assert_eq!(corpus.documents(), reloaded.documents());
    }

    #[test]
    fn duplicate_ids_rejected_within_and_across_sources() {
        let err = Corpus::from_documents(
            vec![
                doc("x", Category::Human, Some(Subcategory::Human)),
                doc("x", Category::Human, Some(Subcategory::Human)),
            ],
            "a",
        )
        .unwrap_err();
        assert!(matches!(err, CorpusError::DuplicateId { .. }));

        let a = Corpus::from_documents(
            vec![doc("x", Category::Human, Some(Subcategory::Human))],
            "a",
        )
        .unwrap();
        let b = Corpus::from_documents(
            vec![doc("x", Category::Llms, Some(Subcategory::Bard))],
            "b",
        )
        .unwrap();
        assert!(matches!(a.merge(b), Err(CorpusError::DuplicateId { .. })));
    }

    #[test]
    fn encode_binary_and_multi() {
        let corpus = Corpus::from_documents(
            vec![
                doc("h1", Category::Human, Some(Subcategory::Human)),
                doc("c1", Category::Llms, Some(Subcategory::Claude)),
                doc("p1", Category::Llms, Some(Subcategory::Perplexity)),
            ],
            "test",
        )
        .unwrap();
        assert_eq!(encode_labels(&corpus, Task::Binary).unwrap(), vec![0, 1, 1]);
        assert_eq!(encode_labels(&corpus, Task::Multi).unwrap(), vec![0, 4, 5]);
    }

    #[test]
    fn encode_multi_requires_tool_labels() {
        let corpus = Corpus::from_documents(vec![doc("k9", Category::Llms, None)], "test").unwrap();
        let err = encode_labels(&corpus, Task::Multi).unwrap_err();
        match err {
            CorpusError::UnknownTool { id } => assert_eq!(id, "k9"),
            other => panic!("expected UnknownTool, got {other:?}"),
        }
    }

    #[test]
    fn encode_multi_histogram_matches_fixture() {
        let mut docs = Vec::new();
        let kinds = [
            (Subcategory::Human, 3),
            (Subcategory::Chatgpt, 2),
            (Subcategory::Llama, 1),
            (Subcategory::Bard, 2),
            (Subcategory::Claude, 1),
            (Subcategory::Perplexity, 2),
        ];
        for (sub, count) in kinds {
            let category = if sub == Subcategory::Human {
                Category::Human
            } else {
                Category::Llms
            };
            for i in 0..count {
                docs.push(doc(&format!("{sub}-{i}"), category, Some(sub)));
            }
        }
        let corpus = Corpus::from_documents(docs, "test").unwrap();
        let labels = encode_labels(&corpus, Task::Multi).unwrap();
        let mut hist = [0usize; 6];
        for l in labels {
            hist[l] += 1;
        }
        assert_eq!(hist, [3, 2, 1, 2, 1, 2]);
    }

    #[test]
    fn split_sizes_and_determinism() {
        let docs: Vec<Document> = (0..600)
            .map(|i| {
                let (cat, sub) = if i < 300 {
                    (Category::Human, Some(Subcategory::Human))
                } else {
                    (Category::Llms, None)
                };
                doc(&format!("d{i}"), cat, sub)
            })
            .collect();
        let corpus = Corpus::from_documents(docs, "test").unwrap();
        let spec = SplitSpec::new(0.2, 7, false);
        let (train, test) = split(&corpus, &spec).unwrap();
        assert_eq!(test.len(), 120);
        assert_eq!(train.len(), 480);

        let (train2, test2) = split(&corpus, &spec).unwrap();
        assert_eq!(train.documents(), train2.documents());
        assert_eq!(test.documents(), test2.documents());

        // Partition: every id lands on exactly one side.
        let mut ids: Vec<&str> = train.iter().chain(test.iter()).map(|d| d.id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), 600);
    }

    #[test]
    fn stratified_split_allocates_per_class() {
        let docs: Vec<Document> = (0..600)
            .map(|i| {
                let (cat, sub) = if i % 2 == 0 {
                    (Category::Human, Some(Subcategory::Human))
                } else {
                    (Category::Llms, Some(Subcategory::Bard))
                };
                doc(&format!("d{i}"), cat, sub)
            })
            .collect();
        let corpus = Corpus::from_documents(docs, "test").unwrap();
        let (_, test) = split(&corpus, &SplitSpec::new(0.2, 3, true)).unwrap();
        let (human, llms) = test.category_counts();
        assert_eq!(human, 60);
        assert_eq!(llms, 60);
    }

    #[test]
    fn split_rejects_degenerate_fractions() {
        let corpus = Corpus::from_documents(
            vec![doc("only", Category::Human, Some(Subcategory::Human))],
            "test",
        )
        .unwrap();
        assert!(matches!(
            split(&corpus, &SplitSpec::new(0.5, 0, false)),
            Err(CorpusError::EmptySplitSide { side: "train", .. })
        ));
        assert!(matches!(
            split(&corpus, &SplitSpec::new(1.5, 0, false)),
            Err(CorpusError::BadTestFraction(_))
        ));
    }
}
