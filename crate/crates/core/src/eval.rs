//! Evaluation: accuracy/precision/recall/F1, confusion matrices, one-vs-rest
//! ROC curves with trapezoidal AUC, report rendering, and a seeded synthetic
//! corpus generator for desk-scale experiments.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Category, Corpus, Document, Subcategory};
use crate::features::FeatureMatrix;
use crate::models::{Classifier, ModelError};
use crate::seed::rng_from;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("test set is empty")]
    EmptyTestSet,
    #[error("ROC needs both positive and negative examples")]
    SingleClassLabels,
    #[error("scores and labels differ in length: {scores} vs {labels}")]
    LengthMismatch { scores: usize, labels: usize },
    #[error("synthetic spec invalid: {0}")]
    DegenerateSpec(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Corpus(#[from] crate::corpus::CorpusError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocCurve {
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// Full evaluation artifact for one model on one labeled set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub class_names: Vec<String>,
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub per_class: Vec<ClassMetrics>,
    /// Rows = true class, columns = predicted class.
    pub confusion: Vec<Vec<u64>>,
    /// Row-normalized percentages; occupied rows sum to 100.
    pub confusion_pct: Vec<Vec<f64>>,
    /// One-vs-rest curve per class; `None` when a class lacks positives or
    /// negatives in the test set.
    pub roc: Vec<Option<RocCurve>>,
}

/// Runs a classifier over a labeled matrix and computes the full report.
///
/// Macro averages run over classes present in the test set; a class with no
/// predicted positives gets precision 0 by convention.
pub fn evaluate<M: Classifier + ?Sized>(
    model: &M,
    test: &FeatureMatrix,
    class_names: &[String],
) -> Result<EvalReport, EvalError> {
    if test.n_rows() == 0 {
        return Err(EvalError::EmptyTestSet);
    }
    let k = model.n_classes();
    let mut confusion = vec![vec![0u64; k]; k];
    let mut probas: Vec<Vec<f64>> = Vec::with_capacity(test.n_rows());
    for (row, &label) in test.rows.iter().zip(&test.labels) {
        let proba = model.predict_proba(row)?;
        let pred = crate::models::argmax(&proba);
        confusion[label][pred] += 1;
        probas.push(proba);
    }

    let total: u64 = test.n_rows() as u64;
    let trace: u64 = (0..k).map(|c| confusion[c][c]).sum();
    let accuracy = trace as f64 / total as f64;

    let mut per_class = Vec::with_capacity(k);
    let mut macro_p = 0.0;
    let mut macro_r = 0.0;
    let mut macro_f = 0.0;
    let mut present = 0usize;
    for c in 0..k {
        let support: u64 = confusion[c].iter().sum();
        let predicted: u64 = (0..k).map(|r| confusion[r][c]).sum();
        let tp = confusion[c][c];
        let precision = if predicted == 0 {
            0.0
        } else {
            tp as f64 / predicted as f64
        };
        let recall = if support == 0 {
            0.0
        } else {
            tp as f64 / support as f64
        };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        if support > 0 {
            macro_p += precision;
            macro_r += recall;
            macro_f += f1;
            present += 1;
        }
        per_class.push(ClassMetrics {
            label: class_names.get(c).cloned().unwrap_or_else(|| c.to_string()),
            precision,
            recall,
            f1,
            support: support as usize,
        });
    }
    let present = present.max(1) as f64;

    let mut roc = Vec::with_capacity(k);
    for c in 0..k {
        let scores: Vec<f64> = probas.iter().map(|p| p[c]).collect();
        let labels: Vec<bool> = test.labels.iter().map(|&l| l == c).collect();
        roc.push(roc_curve(&scores, &labels).ok());
    }

    Ok(EvalReport {
        class_names: class_names.to_vec(),
        accuracy,
        macro_precision: macro_p / present,
        macro_recall: macro_r / present,
        macro_f1: macro_f / present,
        per_class,
        confusion_pct: confusion_pct(&confusion),
        confusion,
        roc,
    })
}

/// Row-normalizes a confusion matrix to percentages; empty rows become
/// all-zero rows.
pub fn confusion_pct(confusion: &[Vec<u64>]) -> Vec<Vec<f64>> {
    confusion
        .iter()
        .map(|row| {
            let sum: u64 = row.iter().sum();
            if sum == 0 {
                vec![0.0; row.len()]
            } else {
                row.iter().map(|&c| c as f64 * 100.0 / sum as f64).collect()
            }
        })
        .collect()
}

/// Threshold-sweep ROC over distinct scores (descending) with trapezoidal
/// AUC. The curve always contains (0,0) and (1,1).
pub fn roc_curve(scores: &[f64], labels: &[bool]) -> Result<RocCurve, EvalError> {
    if scores.len() != labels.len() {
        return Err(EvalError::LengthMismatch {
            scores: scores.len(),
            labels: labels.len(),
        });
    }
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(EvalError::SingleClassLabels);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).expect("finite scores"));

    let mut points = vec![(0.0, 0.0)];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < order.len() {
        let score = scores[order[i]];
        // advance over the whole tie group before emitting a point
        while i < order.len() && scores[order[i]] == score {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
    }
    debug_assert_eq!(*points.last().unwrap(), (1.0, 1.0));

    let mut auc = 0.0;
    for w in points.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        auc += (x1 - x0) * (y0 + y1) / 2.0;
    }
    Ok(RocCurve { points, auc })
}

impl EvalReport {
    /// Markdown rendering: summary row in the Accuracy/Precision/Recall/F1
    /// layout, per-class table, and both confusion matrices.
    pub fn to_markdown(&self, title: &str) -> String {
        let mut out = String::new();
        writeln!(out, "# {title}\n").unwrap();
        writeln!(out, "| Accuracy | Precision | Recall | F1-Score |").unwrap();
        writeln!(out, "|---|---|---|---|").unwrap();
        writeln!(
            out,
            "| {:.1}% | {:.1}% | {:.1}% | {:.1}% |",
            self.accuracy * 100.0,
            self.macro_precision * 100.0,
            self.macro_recall * 100.0,
            self.macro_f1 * 100.0
        )
        .unwrap();
        writeln!(out, "\n## Per-class metrics\n").unwrap();
        writeln!(out, "| Class | Precision | Recall | F1 | Support |").unwrap();
        writeln!(out, "|---|---|---|---|---|").unwrap();
        for m in &self.per_class {
            writeln!(
                out,
                "| {} | {:.4} | {:.4} | {:.4} | {} |",
                m.label, m.precision, m.recall, m.f1, m.support
            )
            .unwrap();
        }
        writeln!(out, "\n## Confusion matrix (counts)\n").unwrap();
        out.push_str(&self.confusion_markdown(false));
        writeln!(out, "\n## Confusion matrix (row %)\n").unwrap();
        out.push_str(&self.confusion_markdown(true));
        if self.roc.iter().any(|r| r.is_some()) {
            writeln!(out, "\n## ROC AUC (one-vs-rest)\n").unwrap();
            writeln!(out, "| Class | AUC |").unwrap();
            writeln!(out, "|---|---|").unwrap();
            for (name, roc) in self.class_names.iter().zip(&self.roc) {
                match roc {
                    Some(r) => writeln!(out, "| {name} | {:.4} |", r.auc).unwrap(),
                    None => writeln!(out, "| {name} | n/a |").unwrap(),
                }
            }
        }
        out
    }

    fn confusion_markdown(&self, pct: bool) -> String {
        let mut out = String::new();
        write!(out, "| true \\ pred |").unwrap();
        for name in &self.class_names {
            write!(out, " {name} |").unwrap();
        }
        writeln!(out).unwrap();
        write!(out, "|---|").unwrap();
        for _ in &self.class_names {
            write!(out, "---|").unwrap();
        }
        writeln!(out).unwrap();
        for (r, name) in self.class_names.iter().enumerate() {
            write!(out, "| {name} |").unwrap();
            for c in 0..self.class_names.len() {
                if pct {
                    write!(out, " {:.1} |", self.confusion_pct[r][c]).unwrap();
                } else {
                    write!(out, " {} |", self.confusion[r][c]).unwrap();
                }
            }
            writeln!(out).unwrap();
        }
        out
    }

    /// CSV with one `metric,value` row per summary metric, then per-class
    /// rows.
    pub fn metrics_csv(&self) -> String {
        let mut out = String::from("metric,class,value\n");
        writeln!(out, "accuracy,,{:.6}", self.accuracy).unwrap();
        writeln!(out, "macro_precision,,{:.6}", self.macro_precision).unwrap();
        writeln!(out, "macro_recall,,{:.6}", self.macro_recall).unwrap();
        writeln!(out, "macro_f1,,{:.6}", self.macro_f1).unwrap();
        for m in &self.per_class {
            writeln!(out, "precision,{},{:.6}", m.label, m.precision).unwrap();
            writeln!(out, "recall,{},{:.6}", m.label, m.recall).unwrap();
            writeln!(out, "f1,{},{:.6}", m.label, m.f1).unwrap();
            writeln!(out, "support,{},{}", m.label, m.support).unwrap();
        }
        for (name, roc) in self.class_names.iter().zip(&self.roc) {
            if let Some(r) = roc {
                writeln!(out, "auc,{name},{:.6}", r.auc).unwrap();
            }
        }
        out
    }

    /// Confusion matrix CSV (counts or percentages).
    pub fn confusion_csv(&self, pct: bool) -> String {
        let mut out = String::from("true\\pred");
        for name in &self.class_names {
            write!(out, ",{name}").unwrap();
        }
        out.push('\n');
        for (r, name) in self.class_names.iter().enumerate() {
            write!(out, "{name}").unwrap();
            for c in 0..self.class_names.len() {
                if pct {
                    write!(out, ",{:.4}", self.confusion_pct[r][c]).unwrap();
                } else {
                    write!(out, ",{}", self.confusion[r][c]).unwrap();
                }
            }
            out.push('\n');
        }
        out
    }
}

/// One synthetic class: labeled documents whose tokens mix class-specific
/// marker words into a shared background vocabulary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticClass {
    pub name: String,
    pub category: Category,
    pub subcategory: Option<Subcategory>,
    pub marker_words: Vec<String>,
    /// Probability that any token is drawn from the markers (difficulty
    /// knob: 0 = indistinguishable from background, 1 = pure markers).
    pub marker_weight: f64,
    pub n_docs: usize,
    /// Sentence length range in words (inclusive); wide ranges give bursty,
    /// human-looking text.
    pub sentence_words: (usize, usize),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub classes: Vec<SyntheticClass>,
    pub background: Vec<String>,
    /// Document length range in words (inclusive).
    pub doc_words: (usize, usize),
    pub seed: u64,
}

impl SyntheticSpec {
    /// Two classes x 300 docs: a human class with bursty sentences and one
    /// unlabeled-tool LLM class with uniform sentences.
    pub fn binary_default(seed: u64) -> SyntheticSpec {
        SyntheticSpec {
            classes: vec![
                SyntheticClass {
                    name: "human".to_string(),
                    category: Category::Human,
                    subcategory: Some(Subcategory::Human),
                    marker_words: marker_words("human"),
                    marker_weight: 0.2,
                    n_docs: 300,
                    sentence_words: (3, 26),
                },
                SyntheticClass {
                    name: "llms".to_string(),
                    category: Category::Llms,
                    subcategory: None,
                    marker_words: marker_words("llms"),
                    marker_weight: 0.2,
                    n_docs: 300,
                    sentence_words: (10, 13),
                },
            ],
            background: background_vocab(240),
            doc_words: (60, 120),
            seed,
        }
    }

    /// Six classes x 100 docs: human plus the five tools.
    pub fn multi_default(seed: u64) -> SyntheticSpec {
        let mut classes = vec![SyntheticClass {
            name: "human".to_string(),
            category: Category::Human,
            subcategory: Some(Subcategory::Human),
            marker_words: marker_words("human"),
            marker_weight: 0.25,
            n_docs: 100,
            sentence_words: (3, 26),
        }];
        for sub in [
            Subcategory::Chatgpt,
            Subcategory::Llama,
            Subcategory::Bard,
            Subcategory::Claude,
            Subcategory::Perplexity,
        ] {
            classes.push(SyntheticClass {
                name: sub.as_str().to_string(),
                category: Category::Llms,
                subcategory: Some(sub),
                marker_words: marker_words(sub.as_str()),
                marker_weight: 0.25,
                n_docs: 100,
                sentence_words: (9, 14),
            });
        }
        SyntheticSpec {
            classes,
            background: background_vocab(240),
            doc_words: (60, 120),
            seed,
        }
    }

    /// Overrides every class's marker weight (difficulty).
    pub fn with_marker_weight(mut self, weight: f64) -> SyntheticSpec {
        for class in &mut self.classes {
            class.marker_weight = weight;
        }
        self
    }

    /// Overrides one class's marker weight by name.
    pub fn with_class_marker_weight(mut self, name: &str, weight: f64) -> SyntheticSpec {
        for class in &mut self.classes {
            if class.name == name {
                class.marker_weight = weight;
            }
        }
        self
    }

    fn validate(&self) -> Result<(), EvalError> {
        if self.classes.len() < 2 {
            return Err(EvalError::DegenerateSpec(
                "need at least two classes".to_string(),
            ));
        }
        if self.doc_words.0 == 0 || self.doc_words.0 > self.doc_words.1 {
            return Err(EvalError::DegenerateSpec(format!(
                "bad document length range {:?}",
                self.doc_words
            )));
        }
        for class in &self.classes {
            if !(0.0..=1.0).contains(&class.marker_weight) {
                return Err(EvalError::DegenerateSpec(format!(
                    "class {}: marker_weight {} outside [0, 1]",
                    class.name, class.marker_weight
                )));
            }
            if class.marker_weight > 0.0 && class.marker_words.is_empty() {
                return Err(EvalError::DegenerateSpec(format!(
                    "class {}: positive marker weight but no marker words",
                    class.name
                )));
            }
            if class.marker_weight < 1.0 && self.background.is_empty() {
                return Err(EvalError::DegenerateSpec(
                    "background vocabulary is empty".to_string(),
                ));
            }
            if class.n_docs == 0 {
                return Err(EvalError::DegenerateSpec(format!(
                    "class {}: zero documents",
                    class.name
                )));
            }
            if class.sentence_words.0 == 0 || class.sentence_words.0 > class.sentence_words.1 {
                return Err(EvalError::DegenerateSpec(format!(
                    "class {}: bad sentence length range {:?}",
                    class.name, class.sentence_words
                )));
            }
        }
        Ok(())
    }
}

fn background_vocab(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("w{i:03}")).collect()
}

fn marker_words(class: &str) -> Vec<String> {
    (0..8).map(|i| format!("{class}mark{i}")).collect()
}

/// Generates a labeled synthetic corpus: seeded, deterministic, loadable
/// through the JSONL carrier.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Corpus, EvalError> {
    spec.validate()?;
    let mut rng = rng_from(spec.seed);
    let mut documents = Vec::new();
    for class in &spec.classes {
        for doc_idx in 0..class.n_docs {
            let n_words = rng.random_range(spec.doc_words.0..=spec.doc_words.1);
            let mut text = String::new();
            let mut written = 0;
            while written < n_words {
                let sentence_len = rng
                    .random_range(class.sentence_words.0..=class.sentence_words.1)
                    .min(n_words - written);
                for w in 0..sentence_len {
                    if w > 0 {
                        text.push(' ');
                    }
                    let word = if rng.random::<f64>() < class.marker_weight {
                        &class.marker_words[rng.random_range(0..class.marker_words.len())]
                    } else {
                        &spec.background[rng.random_range(0..spec.background.len())]
                    };
                    text.push_str(word);
                }
                text.push_str(". ");
                written += sentence_len;
            }
            documents.push(Document::new(
                format!("{}-{doc_idx:04}", class.name),
                0,
                text.trim_end(),
                class.category,
                class.subcategory,
            )?);
        }
    }
    Ok(Corpus::from_documents(documents, "synthetic")?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::SparseVector;

    /// Fixed predictor for metric fixtures: predicts the single nonzero
    /// column index of each row.
    struct IndexModel {
        k: usize,
    }

    impl Classifier for IndexModel {
        fn n_classes(&self) -> usize {
            self.k
        }
        fn dimension(&self) -> usize {
            self.k
        }
        fn predict_proba(&self, row: &SparseVector) -> Result<Vec<f64>, ModelError> {
            let mut p = vec![0.0; self.k];
            let idx = row.iter().next().map(|(i, _)| i as usize).unwrap_or(0);
            p[idx] = 1.0;
            Ok(p)
        }
    }

    fn fixture_matrix(preds: &[usize], labels: &[usize], k: usize) -> FeatureMatrix {
        let rows = preds
            .iter()
            .map(|&p| SparseVector::new(vec![p as u32], vec![1.0], k))
            .collect();
        FeatureMatrix {
            rows,
            labels: labels.to_vec(),
            vocabulary_hash: String::new(),
        }
    }

    #[test]
    fn perfect_predictor_scores_one() {
        let labels = vec![0, 1, 0, 1];
        let matrix = fixture_matrix(&labels.clone(), &labels, 2);
        let report = evaluate(
            &IndexModel { k: 2 },
            &matrix,
            &["a".to_string(), "b".to_string()],
        )
        .unwrap();
        assert_eq!(report.accuracy, 1.0);
        assert_eq!(report.macro_f1, 1.0);
        for m in &report.per_class {
            assert_eq!(m.f1, 1.0);
        }
    }

    #[test]
    fn three_class_metrics_match_hand_computation() {
        // labels [0,0,0,1,1,2], preds [0,1,0,1,1,0]
        // class 0: P=2/3, R=2/3, F1=2/3
        // class 1: P=2/3, R=1,   F1=0.8
        // class 2: P=0 (no predictions), R=0, F1=0
        let matrix = fixture_matrix(&[0, 1, 0, 1, 1, 0], &[0, 0, 0, 1, 1, 2], 3);
        let names: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let report = evaluate(&IndexModel { k: 3 }, &matrix, &names).unwrap();

        assert!((report.accuracy - 4.0 / 6.0).abs() < 1e-12);
        let c0 = &report.per_class[0];
        assert!((c0.precision - 2.0 / 3.0).abs() < 1e-12);
        assert!((c0.recall - 2.0 / 3.0).abs() < 1e-12);
        assert!((c0.f1 - 2.0 / 3.0).abs() < 1e-12);
        let c1 = &report.per_class[1];
        assert!((c1.precision - 2.0 / 3.0).abs() < 1e-12);
        assert!((c1.recall - 1.0).abs() < 1e-12);
        assert!((c1.f1 - 0.8).abs() < 1e-12);
        let c2 = &report.per_class[2];
        assert_eq!(c2.precision, 0.0);
        assert_eq!(c2.recall, 0.0);
        assert_eq!(c2.f1, 0.0);

        assert!((report.macro_precision - 4.0 / 9.0).abs() < 1e-12);
        assert!((report.macro_recall - 5.0 / 9.0).abs() < 1e-12);
        assert!((report.macro_f1 - (2.0 / 3.0 + 0.8) / 3.0).abs() < 1e-12);

        // macro-F1 bracketed by per-class extremes
        let f1s: Vec<f64> = report.per_class.iter().map(|m| m.f1).collect();
        let max = f1s.iter().cloned().fold(f64::MIN, f64::max);
        let min = f1s.iter().cloned().fold(f64::MAX, f64::min);
        assert!(report.macro_f1 <= max && report.macro_f1 >= min);

        // confusion row sums equal supports
        for (row, m) in report.confusion.iter().zip(&report.per_class) {
            assert_eq!(row.iter().sum::<u64>() as usize, m.support);
        }

        // accuracy equals independently computed per-row correctness
        let preds = [0, 1, 0, 1, 1, 0];
        let labels = [0, 0, 0, 1, 1, 2];
        let correct = preds.iter().zip(&labels).filter(|(p, l)| p == l).count();
        assert!((report.accuracy - correct as f64 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn report_renders_paper_style_header() {
        let matrix = fixture_matrix(&[0, 1], &[0, 1], 2);
        let report = evaluate(
            &IndexModel { k: 2 },
            &matrix,
            &["human".to_string(), "llms".to_string()],
        )
        .unwrap();
        let md = report.to_markdown("Binary evaluation");
        assert!(md.contains("| Accuracy | Precision | Recall | F1-Score |"));
        assert!(md.contains("100.0%"));
    }

    #[test]
    fn confusion_pct_rows_sum_to_100() {
        let pct = confusion_pct(&[vec![10, 0], vec![0, 10]]);
        assert_eq!(pct[0][0], 100.0);
        assert_eq!(pct[1][1], 100.0);

        let pct = confusion_pct(&[vec![1, 7]]);
        assert!((pct[0][0] - 12.5).abs() < 1e-12);
        assert!((pct[0][1] - 87.5).abs() < 1e-12);

        let pct = confusion_pct(&[vec![3, 4, 5], vec![0, 0, 0], vec![1, 1, 1]]);
        for row in &pct {
            let sum: f64 = row.iter().sum();
            assert!(sum == 0.0 || (sum - 100.0).abs() < 1e-6);
        }
    }

    /// Pair-counting AUC estimator: concordant pairs over all pos/neg pairs.
    fn pair_counting_auc(scores: &[f64], labels: &[bool]) -> f64 {
        let mut concordant = 0.0;
        let mut total = 0.0;
        for (i, &li) in labels.iter().enumerate() {
            if !li {
                continue;
            }
            for (j, &lj) in labels.iter().enumerate() {
                if lj {
                    continue;
                }
                total += 1.0;
                if scores[i] > scores[j] {
                    concordant += 1.0;
                } else if scores[i] == scores[j] {
                    concordant += 0.5;
                }
            }
        }
        concordant / total
    }

    #[test]
    fn roc_matches_pair_counting_oracle() {
        let scores = [0.9, 0.8, 0.7, 0.4, 0.3, 0.1];
        let labels = [true, true, false, true, false, false];
        let roc = roc_curve(&scores, &labels).unwrap();
        let oracle = pair_counting_auc(&scores, &labels);
        assert!((roc.auc - oracle).abs() < 1e-9);
        assert_eq!(roc.points.first(), Some(&(0.0, 0.0)));
        assert_eq!(roc.points.last(), Some(&(1.0, 1.0)));
    }

    #[test]
    fn roc_extremes() {
        let scores = [0.9, 0.8, 0.2, 0.1];
        let labels = [true, true, false, false];
        assert!((roc_curve(&scores, &labels).unwrap().auc - 1.0).abs() < 1e-12);

        let constant = [0.5, 0.5, 0.5, 0.5];
        assert!((roc_curve(&constant, &labels).unwrap().auc - 0.5).abs() < 1e-12);

        let single = [true, true];
        assert!(matches!(
            roc_curve(&[0.1, 0.2], &single),
            Err(EvalError::SingleClassLabels)
        ));
    }

    #[test]
    fn roc_with_ties_still_matches_pair_counting() {
        let scores = [0.9, 0.5, 0.5, 0.5, 0.2, 0.1];
        let labels = [true, true, false, true, false, false];
        let roc = roc_curve(&scores, &labels).unwrap();
        let oracle = pair_counting_auc(&scores, &labels);
        assert!((roc.auc - oracle).abs() < 1e-9);
    }

    #[test]
    fn synthetic_counts_and_determinism() {
        let spec = SyntheticSpec::binary_default(42);
        let corpus = generate_synthetic(&spec).unwrap();
        assert_eq!(corpus.len(), 600);
        let (human, llms) = corpus.category_counts();
        assert_eq!(human, 300);
        assert_eq!(llms, 300);

        let again = generate_synthetic(&spec).unwrap();
        assert_eq!(corpus.documents(), again.documents());

        // multi spec has 6 classes x 100
        let multi = generate_synthetic(&SyntheticSpec::multi_default(7)).unwrap();
        assert_eq!(multi.len(), 600);
    }

    #[test]
    fn synthetic_document_lengths_in_range() {
        let spec = SyntheticSpec::binary_default(3);
        let corpus = generate_synthetic(&spec).unwrap();
        for doc in corpus.iter().take(50) {
            let words = crate::preprocess::tokenize(&doc.text).len();
            assert!((60..=120).contains(&words), "doc length {words}");
        }
    }

    #[test]
    fn degenerate_specs_rejected() {
        let mut spec = SyntheticSpec::binary_default(0);
        spec.classes.truncate(1);
        assert!(matches!(
            generate_synthetic(&spec),
            Err(EvalError::DegenerateSpec(_))
        ));

        let mut spec = SyntheticSpec::binary_default(0);
        spec.classes[0].marker_weight = 1.5;
        assert!(matches!(
            generate_synthetic(&spec),
            Err(EvalError::DegenerateSpec(_))
        ));

        let mut spec = SyntheticSpec::binary_default(0);
        spec.background.clear();
        assert!(matches!(
            generate_synthetic(&spec),
            Err(EvalError::DegenerateSpec(_))
        ));
    }
}
