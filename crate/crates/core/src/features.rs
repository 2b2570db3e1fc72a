//! Vocabulary fitting and sparse TF-IDF vectorization.
//!
//! The weighting is normative for this toolkit: raw term count for tf,
//! smoothed idf `ln((1 + N) / (1 + df)) + 1`, then L2 normalization of each
//! row (`tfidf-v1`). The vocabulary is built from training documents only so
//! test data can never leak into idf statistics.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::preprocess::TokenList;

/// Formula/version tag persisted with every vocabulary.
pub const TFIDF_VERSION: &str = "tfidf-v1";

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("vocabulary is empty after applying min_df={min_df}")]
    EmptyVocabulary { min_df: u32 },
    #[error("no rows labeled with class {label}")]
    ClassAbsent { label: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("failed to access {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed vocabulary file {path}: {message}")]
    Malformed { path: String, message: String },
}

/// A sparse non-negative feature vector with strictly increasing indices.
/// Nonzero vectors produced by [`Vocabulary::transform`] have unit L2 norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    indices: Vec<u32>,
    values: Vec<f64>,
    dimension: usize,
}

impl SparseVector {
    /// `indices` must be strictly increasing and in range; `values` positive.
    pub fn new(indices: Vec<u32>, values: Vec<f64>, dimension: usize) -> SparseVector {
        debug_assert_eq!(indices.len(), values.len());
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(indices.iter().all(|&i| (i as usize) < dimension));
        debug_assert!(values.iter().all(|&v| v > 0.0 && v.is_finite()));
        SparseVector {
            indices,
            values,
            dimension,
        }
    }

    pub fn zeros(dimension: usize) -> SparseVector {
        SparseVector {
            indices: Vec::new(),
            values: Vec::new(),
            dimension,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_zero(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    /// Value at a column, 0.0 when absent.
    pub fn get(&self, index: u32) -> f64 {
        match self.indices.binary_search(&index) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let mut sum = 0.0;
        let (mut i, mut j) = (0, 0);
        while i < self.indices.len() && j < other.indices.len() {
            match self.indices[i].cmp(&other.indices[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    sum += self.values[i] * other.values[j];
                    i += 1;
                    j += 1;
                }
            }
        }
        sum
    }

    /// Cosine distance in [0, 1] for non-negative vectors. Distance to a
    /// zero vector is defined as 1 (maximal dissimilarity) unless both are
    /// zero, which gives 0.
    pub fn cosine_distance(&self, other: &SparseVector) -> f64 {
        if self.is_zero() && other.is_zero() {
            return 0.0;
        }
        if self.is_zero() || other.is_zero() {
            return 1.0;
        }
        let sim = self.dot(other) / (self.norm() * other.norm());
        (1.0 - sim).clamp(0.0, 1.0)
    }

    fn scale(&mut self, factor: f64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }
}

/// Term index fitted on training documents.
///
/// Indices are dense `0..V-1`, assigned in lexicographic term order for
/// determinism.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    term_to_index: HashMap<String, u32>,
    document_frequency: Vec<u32>,
    n_train_docs: usize,
}

impl Vocabulary {
    /// Fits a vocabulary: terms with document frequency below `min_df` are
    /// dropped; with `max_features` set, the highest-total-count terms are
    /// kept (ties broken lexicographically).
    pub fn fit(
        train_docs: &[TokenList],
        min_df: u32,
        max_features: Option<usize>,
    ) -> Result<Vocabulary, FeatureError> {
        if train_docs.is_empty() {
            return Err(FeatureError::EmptyTrainingSet);
        }
        let min_df = min_df.max(1);
        let mut df: HashMap<&str, u32> = HashMap::new();
        let mut total_count: HashMap<&str, u64> = HashMap::new();
        for doc in train_docs {
            let mut seen: HashMap<&str, ()> = HashMap::new();
            for token in &doc.tokens {
                *total_count.entry(token.as_str()).or_insert(0) += 1;
                if seen.insert(token.as_str(), ()).is_none() {
                    *df.entry(token.as_str()).or_insert(0) += 1;
                }
            }
        }
        let mut kept: Vec<&str> = df
            .iter()
            .filter(|(_, &count)| count >= min_df)
            .map(|(&term, _)| term)
            .collect();
        if kept.is_empty() {
            return Err(FeatureError::EmptyVocabulary { min_df });
        }
        if let Some(max) = max_features {
            kept.sort_by(|a, b| {
                total_count[b]
                    .cmp(&total_count[a])
                    .then_with(|| a.cmp(b))
            });
            kept.truncate(max.max(1));
        }
        kept.sort_unstable();

        let terms: Vec<String> = kept.iter().map(|t| t.to_string()).collect();
        let term_to_index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        let document_frequency = kept.iter().map(|t| df[t]).collect();
        Ok(Vocabulary {
            terms,
            term_to_index,
            document_frequency,
            n_train_docs: train_docs.len(),
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_train_docs(&self) -> usize {
        self.n_train_docs
    }

    pub fn index_of(&self, term: &str) -> Option<u32> {
        self.term_to_index.get(term).copied()
    }

    pub fn term(&self, index: u32) -> &str {
        &self.terms[index as usize]
    }

    pub fn document_frequency(&self, index: u32) -> u32 {
        self.document_frequency[index as usize]
    }

    /// Smoothed inverse document frequency: `ln((1 + N) / (1 + df)) + 1`.
    /// A term present in every training document has idf exactly 1.
    pub fn idf(&self, index: u32) -> f64 {
        let n = self.n_train_docs as f64;
        let df = self.document_frequency[index as usize] as f64;
        ((1.0 + n) / (1.0 + df)).ln() + 1.0
    }

    /// Unnormalized tf·idf weights; out-of-vocabulary tokens are ignored.
    pub fn transform_raw(&self, doc: &TokenList) -> SparseVector {
        self.transform_raw_counting(doc).0
    }

    fn transform_raw_counting(&self, doc: &TokenList) -> (SparseVector, usize) {
        let mut counts: HashMap<u32, u64> = HashMap::new();
        let mut oov = 0usize;
        for token in &doc.tokens {
            match self.index_of(token) {
                Some(idx) => *counts.entry(idx).or_insert(0) += 1,
                None => oov += 1,
            }
        }
        let mut pairs: Vec<(u32, u64)> = counts.into_iter().collect();
        pairs.sort_unstable_by_key(|&(idx, _)| idx);
        let indices: Vec<u32> = pairs.iter().map(|&(i, _)| i).collect();
        let values: Vec<f64> = pairs
            .iter()
            .map(|&(i, tf)| tf as f64 * self.idf(i))
            .collect();
        (SparseVector::new(indices, values, self.len()), oov)
    }

    /// L2-normalized TF-IDF row. All-OOV documents map to the zero vector.
    pub fn transform(&self, doc: &TokenList) -> SparseVector {
        self.transform_counting(doc).0
    }

    /// Like [`Vocabulary::transform`], also reporting how many tokens fell
    /// outside the vocabulary.
    pub fn transform_counting(&self, doc: &TokenList) -> (SparseVector, usize) {
        let (mut row, oov) = self.transform_raw_counting(doc);
        let norm = row.norm();
        if norm > 0.0 {
            row.scale(1.0 / norm);
        }
        (row, oov)
    }

    /// Deterministic digest over the formula tag, the training-document
    /// count and every (term, df) pair.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(TFIDF_VERSION.as_bytes());
        hasher.update(b"\n");
        hasher.update(self.n_train_docs.to_le_bytes());
        for (term, df) in self.terms.iter().zip(&self.document_frequency) {
            hasher.update(term.as_bytes());
            hasher.update(b"\t");
            hasher.update(df.to_le_bytes());
            hasher.update(b"\n");
        }
        let bytes = hasher.finalize();
        let mut out = String::with_capacity(64);
        for b in bytes {
            write!(out, "{b:02x}").expect("writing to String cannot fail");
        }
        out
    }

    /// Writes the vocabulary as a sorted text table: a header with the
    /// formula tag and `n_train_docs`, then `term <TAB> index <TAB> df` rows.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), FeatureError> {
        let path = path.as_ref();
        let mut out = String::new();
        writeln!(out, "{TFIDF_VERSION}").unwrap();
        writeln!(out, "n_train_docs\t{}", self.n_train_docs).unwrap();
        writeln!(out, "term\tindex\tdf").unwrap();
        for (i, (term, df)) in self.terms.iter().zip(&self.document_frequency).enumerate() {
            writeln!(out, "{term}\t{i}\t{df}").unwrap();
        }
        std::fs::write(path, out).map_err(|e| FeatureError::Io {
            path: path.display().to_string(),
            source: e,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Vocabulary, FeatureError> {
        let path = path.as_ref();
        let contents = std::fs::read_to_string(path).map_err(|e| FeatureError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let malformed = |message: &str| FeatureError::Malformed {
            path: path.display().to_string(),
            message: message.to_string(),
        };
        let mut lines = contents.lines();
        match lines.next() {
            Some(tag) if tag == TFIDF_VERSION => {}
            Some(tag) => return Err(malformed(&format!("unsupported formula tag {tag:?}"))),
            None => return Err(malformed("empty file")),
        }
        let n_train_docs = lines
            .next()
            .and_then(|l| l.strip_prefix("n_train_docs\t"))
            .and_then(|v| v.parse::<usize>().ok())
            .ok_or_else(|| malformed("missing n_train_docs header"))?;
        match lines.next() {
            Some("term\tindex\tdf") => {}
            _ => return Err(malformed("missing column header")),
        }
        let mut terms = Vec::new();
        let mut document_frequency = Vec::new();
        for (i, line) in lines.enumerate() {
            let mut parts = line.split('\t');
            let term = parts.next().ok_or_else(|| malformed("missing term"))?;
            let index: usize = parts
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| malformed("bad index"))?;
            let df: u32 = parts
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| malformed("bad df"))?;
            if index != i {
                return Err(malformed(&format!("non-dense index {index} at row {i}")));
            }
            terms.push(term.to_string());
            document_frequency.push(df);
        }
        if terms.is_empty() {
            return Err(malformed("no terms"));
        }
        let term_to_index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Ok(Vocabulary {
            terms,
            term_to_index,
            document_frequency,
            n_train_docs,
        })
    }
}

/// Vectorized rows plus their labels and the vocabulary digest they were
/// produced with.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    pub rows: Vec<SparseVector>,
    pub labels: Vec<usize>,
    pub vocabulary_hash: String,
}

impl FeatureMatrix {
    pub fn from_token_lists(
        docs: &[TokenList],
        labels: Vec<usize>,
        vocab: &Vocabulary,
    ) -> FeatureMatrix {
        assert_eq!(docs.len(), labels.len(), "one label per document");
        let rows = docs.iter().map(|d| vocab.transform(d)).collect();
        FeatureMatrix {
            rows,
            labels,
            vocabulary_hash: vocab.hash(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn dimension(&self) -> usize {
        self.rows.first().map(|r| r.dimension()).unwrap_or(0)
    }

    pub fn n_classes(&self) -> usize {
        self.labels.iter().copied().max().map(|m| m + 1).unwrap_or(0)
    }
}

/// For each term, the maximum TF-IDF weight over the class's documents;
/// returns the top k, descending, ties broken lexicographically.
pub fn top_tfidf_terms(
    matrix: &FeatureMatrix,
    vocab: &Vocabulary,
    class_label: usize,
    k: usize,
) -> Result<Vec<(String, f64)>, FeatureError> {
    let mut max_weight: HashMap<u32, f64> = HashMap::new();
    let mut seen_class = false;
    for (row, &label) in matrix.rows.iter().zip(&matrix.labels) {
        if label != class_label {
            continue;
        }
        seen_class = true;
        for (idx, value) in row.iter() {
            let entry = max_weight.entry(idx).or_insert(0.0);
            if value > *entry {
                *entry = value;
            }
        }
    }
    if !seen_class {
        return Err(FeatureError::ClassAbsent { label: class_label });
    }
    let mut pairs: Vec<(String, f64)> = max_weight
        .into_iter()
        .map(|(idx, w)| (vocab.term(idx).to_string(), w))
        .collect();
    pairs.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.0.cmp(&b.0))
    });
    pairs.truncate(k);
    Ok(pairs)
}
