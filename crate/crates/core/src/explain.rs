//! Local surrogate explanations: perturb one instance's words, weight the
//! perturbations by proximity, and fit a ridge-regularized linear model to
//! the classifier's probabilities over word presence/absence.
//!
//! The interpretable representation is the binary presence vector over the
//! instance's distinct words; a perturbation removes every occurrence of
//! each dropped word before re-vectorizing.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::features::{SparseVector, Vocabulary};
use crate::models::{Classifier, ModelError};
use crate::preprocess::TokenList;
use crate::seed::{derived_seed, rng_from};

#[derive(Debug, Error)]
pub enum ExplainError {
    #[error("instance {id} is unexplainable: no token maps into the vocabulary")]
    Unexplainable { id: String },
    #[error("instance {id} has no tokens")]
    EmptyInstance { id: String },
    #[error("n_samples must be at least 10, got {0}")]
    TooFewSamples(usize),
    #[error("kernel width must be positive, got {0}")]
    BadKernelWidth(f64),
    #[error("target class {target} out of range for {n_classes} classes")]
    BadTargetClass { target: usize, n_classes: usize },
    #[error("explanation sample is empty")]
    EmptySample,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// One instance prepared for explanation.
#[derive(Debug, Clone)]
pub struct InterpretableInstance {
    /// Unique tokens in first-occurrence order.
    pub distinct_words: Vec<String>,
    pub original_row: SparseVector,
    pub document: TokenList,
}

impl InterpretableInstance {
    pub fn new(document: TokenList, vocab: &Vocabulary) -> Result<InterpretableInstance, ExplainError> {
        if document.is_empty() {
            return Err(ExplainError::EmptyInstance {
                id: document.source_id.clone(),
            });
        }
        let mut distinct_words = Vec::new();
        for token in &document.tokens {
            if !distinct_words.iter().any(|w| w == token) {
                distinct_words.push(token.clone());
            }
        }
        let original_row = vocab.transform(&document);
        if original_row.is_zero() {
            return Err(ExplainError::Unexplainable {
                id: document.source_id.clone(),
            });
        }
        Ok(InterpretableInstance {
            distinct_words,
            original_row,
            document,
        })
    }
}

/// One perturbed sample: which words were kept, the re-vectorized row, and
/// the cosine distance to the original row.
#[derive(Debug, Clone)]
pub struct Perturbation {
    pub mask: Vec<bool>,
    pub row: SparseVector,
    pub distance: f64,
}

/// Re-vectorizes the instance with only the masked-in words kept.
fn masked_row(instance: &InterpretableInstance, mask: &[bool], vocab: &Vocabulary) -> SparseVector {
    let kept: Vec<String> = instance
        .document
        .tokens
        .iter()
        .filter(|t| {
            instance
                .distinct_words
                .iter()
                .position(|w| w == *t)
                .map(|i| mask[i])
                .unwrap_or(false)
        })
        .cloned()
        .collect();
    vocab.transform(&TokenList::new(kept, instance.document.source_id.clone()))
}

/// Draws perturbed samples around an instance. Each distinct word is kept
/// independently with probability 0.5; the first sample is always the
/// all-ones mask (distance 0).
pub fn perturb(
    instance: &InterpretableInstance,
    vocab: &Vocabulary,
    n_samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Perturbation>, ExplainError> {
    if n_samples < 10 {
        return Err(ExplainError::TooFewSamples(n_samples));
    }
    let w = instance.distinct_words.len();
    let mut samples = Vec::with_capacity(n_samples);
    samples.push(Perturbation {
        mask: vec![true; w],
        row: instance.original_row.clone(),
        distance: 0.0,
    });
    for _ in 1..n_samples {
        let mask: Vec<bool> = (0..w).map(|_| rng.random::<bool>()).collect();
        let row = masked_row(instance, &mask, vocab);
        let distance = instance.original_row.cosine_distance(&row);
        samples.push(Perturbation { mask, row, distance });
    }
    Ok(samples)
}

/// Exponential proximity kernel: `exp(-distance^2 / width^2)`.
pub fn kernel_weight(distance: f64, width: f64) -> Result<f64, ExplainError> {
    if width <= 0.0 {
        return Err(ExplainError::BadKernelWidth(width));
    }
    Ok((-(distance * distance) / (width * width)).exp())
}

/// Explanation sampling and surrogate-fit settings.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExplainSettings {
    pub top_k: usize,
    pub n_samples: usize,
    pub kernel_width: f64,
    /// Ridge penalty on non-intercept coefficients.
    pub ridge: f64,
}

impl Default for ExplainSettings {
    fn default() -> ExplainSettings {
        ExplainSettings {
            top_k: 10,
            n_samples: 1000,
            kernel_width: 0.25,
            ridge: 1.0,
        }
    }
}

/// Per-instance attribution result.
#[derive(Debug, Clone, Serialize)]
pub struct Explanation {
    pub instance_id: String,
    pub target_class: usize,
    /// (word, signed coefficient), sorted by |coefficient| descending.
    pub weighted_words: Vec<(String, f64)>,
    /// Weighted R-squared of the surrogate in [0, 1].
    pub local_fit_quality: f64,
    pub n_samples: usize,
    pub kernel_width: f64,
}

impl Explanation {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("explanation serializes")
    }
}

/// Solves `(X^T W X + ridge * D) beta = X^T W y` by Cholesky, where X has an
/// intercept column, W holds the kernel weights and D zeroes the intercept
/// penalty. Returns (intercept, coefficients, weighted R^2).
fn weighted_ridge(
    masks: &[Vec<bool>],
    targets: &[f64],
    weights: &[f64],
    ridge: f64,
) -> (f64, Vec<f64>, f64) {
    let w = masks.first().map(|m| m.len()).unwrap_or(0);
    let p = w + 1; // intercept + one column per word
    let mut xtwx = vec![0.0f64; p * p];
    let mut xtwy = vec![0.0f64; p];

    let mut x = vec![0.0f64; p];
    for ((mask, &y), &wt) in masks.iter().zip(targets).zip(weights) {
        x[0] = 1.0;
        for (j, &m) in mask.iter().enumerate() {
            x[j + 1] = if m { 1.0 } else { 0.0 };
        }
        for i in 0..p {
            if x[i] == 0.0 {
                continue;
            }
            let wx = wt * x[i];
            for j in i..p {
                xtwx[i * p + j] += wx * x[j];
            }
            xtwy[i] += wx * y;
        }
    }
    // mirror the upper triangle and add the ridge to non-intercept diagonals
    for i in 0..p {
        for j in 0..i {
            xtwx[i * p + j] = xtwx[j * p + i];
        }
    }
    for j in 1..p {
        xtwx[j * p + j] += ridge;
    }

    let beta = cholesky_solve(&mut xtwx, &xtwy, p);

    // weighted R^2 against the weighted mean
    let total_weight: f64 = weights.iter().sum();
    let y_mean = targets
        .iter()
        .zip(weights)
        .map(|(&y, &wt)| y * wt)
        .sum::<f64>()
        / total_weight;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for ((mask, &y), &wt) in masks.iter().zip(targets).zip(weights) {
        let mut pred = beta[0];
        for (j, &m) in mask.iter().enumerate() {
            if m {
                pred += beta[j + 1];
            }
        }
        ss_res += wt * (y - pred) * (y - pred);
        ss_tot += wt * (y - y_mean) * (y - y_mean);
    }
    let r2 = if ss_tot <= 1e-18 {
        // zero-variance target: the intercept-only fit is exact
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    (beta[0], beta[1..].to_vec(), r2)
}

/// In-place Cholesky solve for a symmetric positive-definite system.
/// Positive-definiteness holds whenever any sample has positive weight and
/// the ridge penalty is positive.
fn cholesky_solve(a: &mut [f64], b: &[f64], n: usize) -> Vec<f64> {
    // factor A = L L^T, storing L in the lower triangle
    for j in 0..n {
        let mut diag = a[j * n + j];
        for k in 0..j {
            diag -= a[j * n + k] * a[j * n + k];
        }
        assert!(
            diag > 0.0,
            "normal equations lost positive-definiteness (ridge must be > 0)"
        );
        let diag = diag.sqrt();
        a[j * n + j] = diag;
        for i in (j + 1)..n {
            let mut v = a[i * n + j];
            for k in 0..j {
                v -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = v / diag;
        }
    }
    // forward solve L z = b
    let mut z = vec![0.0; n];
    for i in 0..n {
        let mut v = b[i];
        for k in 0..i {
            v -= a[i * n + k] * z[k];
        }
        z[i] = v / a[i * n + i];
    }
    // back solve L^T beta = z
    let mut beta = vec![0.0; n];
    for i in (0..n).rev() {
        let mut v = z[i];
        for k in (i + 1)..n {
            v -= a[k * n + i] * beta[k];
        }
        beta[i] = v / a[i * n + i];
    }
    beta
}

/// Explains one prediction: regresses the model's probability of
/// `target_class` on word-presence masks with kernel sample weights and an
/// unpenalized intercept, returning the top-k words by |coefficient|.
pub fn explain_instance<M: Classifier + ?Sized>(
    model: &M,
    instance: &InterpretableInstance,
    vocab: &Vocabulary,
    target_class: usize,
    settings: &ExplainSettings,
    rng: &mut ChaCha8Rng,
) -> Result<Explanation, ExplainError> {
    if target_class >= model.n_classes() {
        return Err(ExplainError::BadTargetClass {
            target: target_class,
            n_classes: model.n_classes(),
        });
    }
    // validates the width before any sampling work
    kernel_weight(0.0, settings.kernel_width)?;

    let samples = perturb(instance, vocab, settings.n_samples, rng)?;
    let mut masks = Vec::with_capacity(samples.len());
    let mut targets = Vec::with_capacity(samples.len());
    let mut weights = Vec::with_capacity(samples.len());
    for sample in &samples {
        let proba = model.predict_proba(&sample.row)?;
        targets.push(proba[target_class]);
        weights.push(kernel_weight(sample.distance, settings.kernel_width)?);
        masks.push(sample.mask.clone());
    }

    let (_, coefficients, r2) = weighted_ridge(&masks, &targets, &weights, settings.ridge);

    let mut weighted_words: Vec<(String, f64)> = instance
        .distinct_words
        .iter()
        .cloned()
        .zip(coefficients)
        .collect();
    // |coefficient| descending; ties keep first-occurrence order
    weighted_words.sort_by(|a, b| {
        b.1.abs()
            .partial_cmp(&a.1.abs())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    weighted_words.truncate(settings.top_k);

    Ok(Explanation {
        instance_id: instance.document.source_id.clone(),
        target_class,
        weighted_words,
        local_fit_quality: r2,
        n_samples: settings.n_samples,
        kernel_width: settings.kernel_width,
    })
}

/// Aggregated per-class importance profile.
#[derive(Debug, Clone, Serialize)]
pub struct ClassProfile {
    pub class_label: usize,
    /// (word, mean |coefficient| across instances), descending.
    pub entries: Vec<(String, f64)>,
    pub n_instances_aggregated: usize,
}

impl ClassProfile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes")
    }
}

/// Explains every instance against `class_label` and aggregates the mean
/// absolute coefficient per word (instances lacking a word contribute 0).
/// Each instance draws from its own stream derived from `base_seed`.
pub fn class_profile<M: Classifier + ?Sized>(
    model: &M,
    instances: &[InterpretableInstance],
    vocab: &Vocabulary,
    class_label: usize,
    settings: &ExplainSettings,
    base_seed: u64,
) -> Result<ClassProfile, ExplainError> {
    if instances.is_empty() {
        return Err(ExplainError::EmptySample);
    }
    // word -> (first-seen order, accumulated |coefficient|)
    let mut order: Vec<String> = Vec::new();
    let mut totals: std::collections::HashMap<String, f64> = std::collections::HashMap::new();
    for (i, instance) in instances.iter().enumerate() {
        let mut rng = rng_from(derived_seed(base_seed, &format!("profile-{i}")));
        // Profile aggregation uses every word's coefficient, not just the
        // instance's top-k.
        let full = ExplainSettings {
            top_k: usize::MAX,
            ..*settings
        };
        let explanation = explain_instance(model, instance, vocab, class_label, &full, &mut rng)?;
        for (word, coef) in explanation.weighted_words {
            if !totals.contains_key(&word) {
                order.push(word.clone());
            }
            *totals.entry(word).or_insert(0.0) += coef.abs();
        }
    }
    let n = instances.len();
    let mut entries: Vec<(String, f64)> = order
        .into_iter()
        .map(|word| {
            let mean = totals[&word] / n as f64;
            (word, mean)
        })
        .collect();
    entries.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.0.cmp(&b.0))
    });
    entries.truncate(settings.top_k);
    Ok(ClassProfile {
        class_label,
        entries,
        n_instances_aggregated: n,
    })
}
