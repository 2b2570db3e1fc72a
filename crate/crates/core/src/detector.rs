//! AI-text detection baseline and benchmarking.
//!
//! The built-in baseline scores text with a Laplace-smoothed bigram language
//! model (perplexity) and sentence-length variability (burstiness), maps a
//! calibrated AI-probability onto five verdict bands, and refuses texts
//! shorter than 250 characters. A pluggable client reaches an external
//! detector service over HTTP POST or replays recorded fixture responses.
//! `compare` assembles the per-detector contingency table against true
//! binary labels.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::preprocess::{tokenize, TokenList};

#[derive(Debug, Error)]
pub enum DetectorError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("document is empty")]
    EmptyDocument,
    #[error("text has no sentences")]
    NoSentences,
    #[error("calibration needs both classes present")]
    SingleClass,
    #[error("{count} verdicts for {labels} labels")]
    CountMismatch { count: usize, labels: usize },
    #[error("transport error talking to {endpoint}: {message}")]
    Transport { endpoint: String, message: String },
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("no fixture response for document {id} in {dir}")]
    MissingFixture { id: String, dir: String },
    #[error("failed to read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Inputs below this many Unicode scalars are never scored.
pub const MIN_RECOGNIZED_CHARS: usize = 250;

const BOS: &str = "<s>";
const EOS: &str = "</s>";

/// Laplace-smoothed bigram language model with sentence-boundary padding.
#[derive(Debug, Clone)]
pub struct NgramLm {
    bigram: HashMap<(String, String), u64>,
    /// Count of each token as bigram context (including the start marker).
    context: HashMap<String, u64>,
    vocab: std::collections::HashSet<String>,
    alpha: f64,
}

/// Trains the bigram model over token lists; each document is padded with
/// start/end markers.
pub fn train_lm(docs: &[TokenList], alpha: f64) -> Result<NgramLm, DetectorError> {
    let mut bigram: HashMap<(String, String), u64> = HashMap::new();
    let mut context: HashMap<String, u64> = HashMap::new();
    let mut vocab = std::collections::HashSet::new();
    let mut any = false;
    for doc in docs {
        if doc.is_empty() {
            continue;
        }
        any = true;
        let mut prev = BOS.to_string();
        for token in &doc.tokens {
            vocab.insert(token.clone());
            *bigram.entry((prev.clone(), token.clone())).or_insert(0) += 1;
            *context.entry(prev).or_insert(0) += 1;
            prev = token.clone();
        }
        *bigram.entry((prev.clone(), EOS.to_string())).or_insert(0) += 1;
        *context.entry(prev).or_insert(0) += 1;
    }
    if !any {
        return Err(DetectorError::EmptyCorpus);
    }
    Ok(NgramLm {
        bigram,
        context,
        vocab,
        alpha,
    })
}

impl NgramLm {
    /// Next-token alphabet size: every seen word plus the end marker.
    pub fn vocab_size(&self) -> usize {
        self.vocab.len() + 1
    }

    /// `P(next | prev) = (count(prev, next) + alpha) / (count(prev) + alpha V)`.
    pub fn prob(&self, prev: &str, next: &str) -> f64 {
        let pair = (prev.to_string(), next.to_string());
        let num = self.bigram.get(&pair).copied().unwrap_or(0) as f64 + self.alpha;
        let den =
            self.context.get(prev).copied().unwrap_or(0) as f64 + self.alpha * self.vocab_size() as f64;
        num / den
    }

    /// exp of the mean negative log bigram probability over the padded
    /// sequence. Always >= 1 for a proper model.
    pub fn perplexity(&self, doc: &TokenList) -> Result<f64, DetectorError> {
        if doc.is_empty() {
            return Err(DetectorError::EmptyDocument);
        }
        let mut neg_log = 0.0;
        let mut transitions = 0usize;
        let mut prev = BOS;
        for token in &doc.tokens {
            neg_log -= self.prob(prev, token).ln();
            transitions += 1;
            prev = token;
        }
        neg_log -= self.prob(prev, EOS).ln();
        transitions += 1;
        Ok((neg_log / transitions as f64).exp())
    }
}

/// Coefficient of variation of sentence token lengths (population standard
/// deviation over mean). Sentences split on `.`, `!`, `?`; a single sentence
/// scores 0.
pub fn burstiness(text: &str) -> Result<f64, DetectorError> {
    let lengths: Vec<f64> = text
        .split(['.', '!', '?'])
        .map(|s| tokenize(s).len())
        .filter(|&n| n > 0)
        .map(|n| n as f64)
        .collect();
    if lengths.is_empty() {
        return Err(DetectorError::NoSentences);
    }
    if lengths.len() == 1 {
        return Ok(0.0);
    }
    let mean = lengths.iter().sum::<f64>() / lengths.len() as f64;
    let var = lengths.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / lengths.len() as f64;
    Ok(var.sqrt() / mean)
}

/// Detector verdict band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Band {
    Human,
    DifferentResult,
    Mix,
    Ai,
    NotRecognized,
}

impl Band {
    /// Total mapping from an AI percentage to a band:
    /// 0-10 Human, 11-39 Different Result, 40-88 Mix, 89-100 AI.
    pub fn from_percentage(pct: u8) -> Band {
        debug_assert!(pct <= 100);
        match pct {
            0..=10 => Band::Human,
            11..=39 => Band::DifferentResult,
            40..=88 => Band::Mix,
            _ => Band::Ai,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Band::Human => "Human",
            Band::DifferentResult => "Different Result",
            Band::Mix => "Mix",
            Band::Ai => "AI",
            Band::NotRecognized => "Not Recognized",
        }
    }
}

/// The service's user-facing message for each band; also used to map
/// message-only responses back onto bands.
pub fn band_message(band: Band) -> &'static str {
    match band {
        Band::Human => "This text is most likely to be written by a human",
        Band::DifferentResult => {
            "Our ensemble of detectors predicts different results for this text. \
             Please enter more text for more precise predictions."
        }
        Band::Mix => "This text is likely to be a mix of human and AI text",
        Band::Ai => "This text is likely to be written by AI",
        Band::NotRecognized => {
            "Try typing in some more text (>250 characters) so we can give you accurate results"
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorVerdict {
    pub band: Band,
    /// Absent exactly when the text was not recognized.
    pub ai_percentage: Option<u8>,
    pub raw_message: String,
}

impl DetectorVerdict {
    pub fn from_percentage(pct: u8) -> DetectorVerdict {
        let band = Band::from_percentage(pct);
        DetectorVerdict {
            band,
            ai_percentage: Some(pct),
            raw_message: band_message(band).to_string(),
        }
    }

    pub fn not_recognized() -> DetectorVerdict {
        DetectorVerdict {
            band: Band::NotRecognized,
            ai_percentage: None,
            raw_message: band_message(Band::NotRecognized).to_string(),
        }
    }

    /// Verdict for an internal binary classifier, which always answers with
    /// Human or AI using the 0.5 decision rule (the percentage is recorded
    /// for transparency, not band mapping).
    pub fn from_internal_probability(p_ai: f64) -> DetectorVerdict {
        let pct = (p_ai * 100.0).round().clamp(0.0, 100.0) as u8;
        let band = if p_ai >= 0.5 { Band::Ai } else { Band::Human };
        DetectorVerdict {
            band,
            ai_percentage: Some(pct),
            raw_message: band_message(band).to_string(),
        }
    }
}

/// Standardized 2-feature logistic model over (perplexity, burstiness).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub weights: [f64; 2],
    pub bias: f64,
    pub feature_mean: [f64; 2],
    pub feature_std: [f64; 2],
}

impl Calibration {
    pub fn probability_ai(&self, perplexity: f64, burstiness: f64) -> f64 {
        let z0 = (perplexity - self.feature_mean[0]) / self.feature_std[0];
        let z1 = (burstiness - self.feature_mean[1]) / self.feature_std[1];
        let score = self.weights[0] * z0 + self.weights[1] * z1 + self.bias;
        1.0 / (1.0 + (-score).exp())
    }
}

/// Fits the calibration by full-batch gradient descent on logistic loss;
/// deterministic (no sampling).
pub fn fit_calibration(features: &[[f64; 2]], labels: &[usize]) -> Result<Calibration, DetectorError> {
    if features.is_empty() || features.len() != labels.len() {
        return Err(DetectorError::CountMismatch {
            count: features.len(),
            labels: labels.len(),
        });
    }
    if labels.iter().all(|&l| l == 0) || labels.iter().all(|&l| l == 1) {
        return Err(DetectorError::SingleClass);
    }
    let n = features.len() as f64;
    let mut mean = [0.0f64; 2];
    for f in features {
        mean[0] += f[0];
        mean[1] += f[1];
    }
    mean[0] /= n;
    mean[1] /= n;
    let mut var = [0.0f64; 2];
    for f in features {
        var[0] += (f[0] - mean[0]) * (f[0] - mean[0]);
        var[1] += (f[1] - mean[1]) * (f[1] - mean[1]);
    }
    let std = [
        (var[0] / n).sqrt().max(1e-12),
        (var[1] / n).sqrt().max(1e-12),
    ];

    let standardized: Vec<[f64; 2]> = features
        .iter()
        .map(|f| [(f[0] - mean[0]) / std[0], (f[1] - mean[1]) / std[1]])
        .collect();

    let mut w = [0.0f64; 2];
    let mut b = 0.0f64;
    let lr = 0.5;
    for _ in 0..500 {
        let mut gw = [0.0f64; 2];
        let mut gb = 0.0f64;
        for (z, &y) in standardized.iter().zip(labels) {
            let p = 1.0 / (1.0 + (-(w[0] * z[0] + w[1] * z[1] + b)).exp());
            let err = p - y as f64;
            gw[0] += err * z[0];
            gw[1] += err * z[1];
            gb += err;
        }
        w[0] -= lr * gw[0] / n;
        w[1] -= lr * gw[1] / n;
        b -= lr * gb / n;
    }
    Ok(Calibration {
        weights: w,
        bias: b,
        feature_mean: mean,
        feature_std: std,
    })
}

/// The built-in perplexity/burstiness detector: a transparent pedagogical
/// stand-in for commercial services, never claimed equivalent.
#[derive(Debug, Clone)]
pub struct BaselineDetector {
    pub lm: NgramLm,
    pub calibration: Calibration,
}

impl BaselineDetector {
    /// Scores raw text. Inputs under 250 Unicode scalars are never
    /// recognized, regardless of content.
    pub fn verdict(&self, text: &str) -> Result<DetectorVerdict, DetectorError> {
        if text.chars().count() < MIN_RECOGNIZED_CHARS {
            return Ok(DetectorVerdict::not_recognized());
        }
        let tokens = TokenList::new(tokenize(text), "detector-input");
        let perplexity = self.lm.perplexity(&tokens)?;
        let burst = burstiness(text)?;
        let p_ai = self.calibration.probability_ai(perplexity, burst);
        let pct = (p_ai * 100.0).round().clamp(0.0, 100.0) as u8;
        Ok(DetectorVerdict::from_percentage(pct))
    }
}

/// Maps a detector response body onto a verdict: either an integer
/// `ai_percentage` or a recognized `message`.
pub fn map_response(payload: &str) -> Result<DetectorVerdict, DetectorError> {
    let value: serde_json::Value = serde_json::from_str(payload)
        .map_err(|e| DetectorError::Protocol(format!("response is not JSON: {e}")))?;
    if let Some(pct) = value.get("ai_percentage") {
        let pct = pct
            .as_u64()
            .filter(|&p| p <= 100)
            .ok_or_else(|| DetectorError::Protocol(format!("bad ai_percentage: {pct}")))?;
        return Ok(DetectorVerdict::from_percentage(pct as u8));
    }
    if let Some(message) = value.get("message").and_then(|m| m.as_str()) {
        for band in [
            Band::NotRecognized,
            Band::Human,
            Band::DifferentResult,
            Band::Mix,
            Band::Ai,
        ] {
            let canonical = band_message(band);
            let prefix: String = canonical.chars().take(24).collect();
            if message.starts_with(&prefix) {
                return Ok(DetectorVerdict {
                    band,
                    ai_percentage: None,
                    raw_message: message.to_string(),
                });
            }
        }
        return Err(DetectorError::Protocol(format!(
            "unrecognized message {message:?}"
        )));
    }
    Err(DetectorError::Protocol(
        "response has neither ai_percentage nor message".to_string(),
    ))
}

/// A detector that can be queried per document.
pub trait DetectorClient {
    fn name(&self) -> &str;
    fn verdict(&self, doc_id: &str, text: &str) -> Result<DetectorVerdict, DetectorError>;
}

/// HTTP client for an external detector: POST `{"text": ...}` to the
/// endpoint, read `{"ai_percentage": ...}` or `{"message": ...}` back.
#[derive(Debug, Clone)]
pub struct HttpDetectorClient {
    pub endpoint: String,
    /// Sent as a bearer token; never logged.
    pub api_key: Option<String>,
    pub timeout: Duration,
    pub max_retries: u32,
}

impl HttpDetectorClient {
    pub fn new(endpoint: impl Into<String>) -> HttpDetectorClient {
        HttpDetectorClient {
            endpoint: endpoint.into(),
            api_key: None,
            timeout: Duration::from_secs(10),
            max_retries: 1,
        }
    }

    fn request_once(&self, text: &str) -> Result<DetectorVerdict, DetectorError> {
        let transport = |message: String| DetectorError::Transport {
            endpoint: self.endpoint.clone(),
            message,
        };
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(self.timeout))
            .http_status_as_error(false)
            .build();
        let agent: ureq::Agent = config.into();
        let body = serde_json::json!({ "text": text }).to_string();
        let mut request = agent
            .post(&self.endpoint)
            .header("content-type", "application/json");
        if let Some(key) = &self.api_key {
            request = request.header("authorization", format!("Bearer {key}"));
        }
        let mut response = request.send(&body).map_err(|e| transport(e.to_string()))?;
        let status = response.status().as_u16();
        if !(200..300).contains(&status) {
            return Err(transport(format!("HTTP status {status}")));
        }
        let payload = response
            .body_mut()
            .read_to_string()
            .map_err(|e| transport(format!("reading body: {e}")))?;
        map_response(&payload)
    }
}

impl DetectorClient for HttpDetectorClient {
    fn name(&self) -> &str {
        "external"
    }

    /// Transport failures are retried up to `max_retries` extra attempts;
    /// protocol errors are not.
    fn verdict(&self, _doc_id: &str, text: &str) -> Result<DetectorVerdict, DetectorError> {
        let mut last = None;
        for _ in 0..=self.max_retries {
            match self.request_once(text) {
                Ok(v) => return Ok(v),
                Err(e @ DetectorError::Transport { .. }) => last = Some(e),
                Err(other) => return Err(other),
            }
        }
        Err(last.expect("at least one attempt"))
    }
}

/// Replays canned responses from `<dir>/<doc_id>.json`, each file holding
/// the same payload schema the HTTP endpoint returns.
#[derive(Debug, Clone)]
pub struct FixtureDetectorClient {
    pub dir: PathBuf,
}

impl DetectorClient for FixtureDetectorClient {
    fn name(&self) -> &str {
        "external-fixture"
    }

    fn verdict(&self, doc_id: &str, _text: &str) -> Result<DetectorVerdict, DetectorError> {
        let path = self.dir.join(format!("{doc_id}.json"));
        if !path.exists() {
            return Err(DetectorError::MissingFixture {
                id: doc_id.to_string(),
                dir: self.dir.display().to_string(),
            });
        }
        let payload = std::fs::read_to_string(&path).map_err(|e| DetectorError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        map_response(&payload)
    }
}

/// Table 6-shaped contingency columns, in report order.
pub const BAND_COLUMNS: [Band; 5] = [
    Band::Human,
    Band::Ai,
    Band::Mix,
    Band::DifferentResult,
    Band::NotRecognized,
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectorRow {
    pub detector: String,
    /// Verdict counts for truly-human documents, in [`BAND_COLUMNS`] order.
    pub human_row: [u64; 5],
    /// Verdict counts for truly-LLM documents, in [`BAND_COLUMNS`] order.
    pub llm_row: [u64; 5],
    pub accuracy: f64,
}

/// Per-detector verdict contingency against true binary labels (0 = human,
/// 1 = LLM) plus binary accuracy: only Human verdicts on human documents
/// and AI verdicts on LLM documents count as correct; Mix, Different Result
/// and Not Recognized all count as errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub rows: Vec<DetectorRow>,
    pub n_human: u64,
    pub n_llm: u64,
}

pub fn compare(
    verdicts_by_detector: &[(String, Vec<DetectorVerdict>)],
    true_labels: &[usize],
) -> Result<ComparisonReport, DetectorError> {
    let mut rows = Vec::with_capacity(verdicts_by_detector.len());
    let n_human = true_labels.iter().filter(|&&l| l == 0).count() as u64;
    let n_llm = true_labels.len() as u64 - n_human;
    for (name, verdicts) in verdicts_by_detector {
        if verdicts.len() != true_labels.len() {
            return Err(DetectorError::CountMismatch {
                count: verdicts.len(),
                labels: true_labels.len(),
            });
        }
        let mut human_row = [0u64; 5];
        let mut llm_row = [0u64; 5];
        let mut correct = 0u64;
        for (verdict, &label) in verdicts.iter().zip(true_labels) {
            let col = BAND_COLUMNS
                .iter()
                .position(|b| *b == verdict.band)
                .expect("band is always a column");
            if label == 0 {
                human_row[col] += 1;
                if verdict.band == Band::Human {
                    correct += 1;
                }
            } else {
                llm_row[col] += 1;
                if verdict.band == Band::Ai {
                    correct += 1;
                }
            }
        }
        rows.push(DetectorRow {
            detector: name.clone(),
            human_row,
            llm_row,
            accuracy: correct as f64 / true_labels.len() as f64,
        });
    }
    Ok(ComparisonReport {
        rows,
        n_human,
        n_llm,
    })
}

impl ComparisonReport {
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "| Detector | Class | Human | AI | Mix | Different Result | Not Recognized | Accuracy |"
        )
        .unwrap();
        writeln!(out, "|---|---|---|---|---|---|---|---|").unwrap();
        for row in &self.rows {
            writeln!(
                out,
                "| {} | Human | {} | {} | {} | {} | {} | {:.1}% |",
                row.detector,
                row.human_row[0],
                row.human_row[1],
                row.human_row[2],
                row.human_row[3],
                row.human_row[4],
                row.accuracy * 100.0
            )
            .unwrap();
            writeln!(
                out,
                "|  | LLMs | {} | {} | {} | {} | {} |  |",
                row.llm_row[0], row.llm_row[1], row.llm_row[2], row.llm_row[3], row.llm_row[4]
            )
            .unwrap();
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "detector,class,human,ai,mix,different_result,not_recognized,accuracy\n",
        );
        for row in &self.rows {
            writeln!(
                out,
                "{},human,{},{},{},{},{},{:.6}",
                row.detector,
                row.human_row[0],
                row.human_row[1],
                row.human_row[2],
                row.human_row[3],
                row.human_row[4],
                row.accuracy
            )
            .unwrap();
            writeln!(
                out,
                "{},llms,{},{},{},{},{},{:.6}",
                row.detector,
                row.llm_row[0],
                row.llm_row[1],
                row.llm_row[2],
                row.llm_row[3],
                row.llm_row[4],
                row.accuracy
            )
            .unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from;
    use rand::Rng;
    use std::io::{Read as _, Write as _};
    use std::net::TcpListener;

    fn tokens(words: &[&str]) -> TokenList {
        TokenList::new(words.iter().map(|w| w.to_string()).collect(), "t")
    }

    #[test]
    fn laplace_smoothing_identities() {
        // single doc "a b a b": V = |{a, b}| + 1 = 3
        let lm = train_lm(&[tokens(&["a", "b", "a", "b"])], 1.0).unwrap();
        assert_eq!(lm.vocab_size(), 3);
        // P(b | a) = (2 + 1) / (2 + 1 * 3)
        assert!((lm.prob("a", "b") - 3.0 / 5.0).abs() < 1e-12);
        // unseen pair: alpha / (count(v) + alpha V)
        assert!((lm.prob("b", "b") - 1.0 / 5.0).abs() < 1e-12);
        // unseen context: uniform 1/V
        assert!((lm.prob("zzz", "a") - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn next_word_distribution_sums_to_one() {
        let lm = train_lm(
            &[
                tokens(&["a", "b", "c", "a", "b"]),
                tokens(&["c", "c", "b", "a"]),
            ],
            1.0,
        )
        .unwrap();
        for prev in ["a", "b", "c", BOS, "unseen"] {
            let mut sum = 0.0;
            for next in ["a", "b", "c", EOS] {
                sum += lm.prob(prev, next);
            }
            assert!((sum - 1.0).abs() < 1e-9, "sum for {prev}: {sum}");
        }
    }

    #[test]
    fn perplexity_limits() {
        // deterministic chain, vanishing smoothing: perplexity -> 1
        let chain = tokens(&["a", "b", "c", "d"]);
        let lm = train_lm(&[chain.clone()], 1e-6).unwrap();
        let perplexity = lm.perplexity(&chain).unwrap();
        assert!(perplexity < 1.001, "deterministic chain perplexity {perplexity}");
        assert!(perplexity >= 1.0);

        // uniform random docs over V words: perplexity near V
        let vocab_n = 50usize;
        let words: Vec<String> = (0..vocab_n).map(|i| format!("t{i}")).collect();
        let mut rng = rng_from(42);
        let mut docs = Vec::new();
        for d in 0..40 {
            let toks: Vec<String> = (0..400)
                .map(|_| words[rng.random_range(0..vocab_n)].clone())
                .collect();
            docs.push(TokenList::new(toks, format!("d{d}")));
        }
        let lm = train_lm(&docs, 1.0).unwrap();
        let probe: Vec<String> = (0..400)
            .map(|_| words[rng.random_range(0..vocab_n)].clone())
            .collect();
        let perplexity = lm.perplexity(&TokenList::new(probe, "probe")).unwrap();
        let v = vocab_n as f64;
        assert!(
            (perplexity - v).abs() / v < 0.2,
            "perplexity {perplexity} should be near {v}"
        );
    }

    #[test]
    fn perplexity_is_at_least_one() {
        let lm = train_lm(&[tokens(&["x", "y", "x"])], 1.0).unwrap();
        for probe in [tokens(&["x"]), tokens(&["y", "y", "y"]), tokens(&["zzz"])] {
            assert!(lm.perplexity(&probe).unwrap() >= 1.0);
        }
        assert!(matches!(
            lm.perplexity(&tokens(&[])),
            Err(DetectorError::EmptyDocument)
        ));
    }

    #[test]
    fn burstiness_arithmetic() {
        let uniform = "one two three four five six seven eight nine ten. \
                       one two three four five six seven eight nine ten. \
                       one two three four five six seven eight nine ten.";
        assert_eq!(burstiness(uniform).unwrap(), 0.0);

        // lengths [5, 15]: std 5, mean 10
        let two = "a b c d e. a b c d e f g h i j k l m n o.";
        assert!((burstiness(two).unwrap() - 0.5).abs() < 1e-12);

        assert_eq!(burstiness("only one sentence here").unwrap(), 0.0);
        assert!(matches!(burstiness("..."), Err(DetectorError::NoSentences)));

        // planted variance scores higher than uniform lengths
        let bursty = "a. a b c d e f g h i j k l m. ab. a b c d e f g.";
        assert!(burstiness(bursty).unwrap() > burstiness(uniform).unwrap());
    }

    #[test]
    fn band_mapping_is_total_and_matches_ranges() {
        for pct in 0u8..=100 {
            let band = Band::from_percentage(pct);
            let expected = match pct {
                0..=10 => Band::Human,
                11..=39 => Band::DifferentResult,
                40..=88 => Band::Mix,
                _ => Band::Ai,
            };
            assert_eq!(band, expected, "pct {pct}");
        }
    }

    #[test]
    fn baseline_refuses_short_text() {
        let lm = train_lm(&[tokens(&["a", "b"])], 1.0).unwrap();
        let calibration = Calibration {
            weights: [1.0, -1.0],
            bias: 0.0,
            feature_mean: [10.0, 0.5],
            feature_std: [5.0, 0.2],
        };
        let detector = BaselineDetector { lm, calibration };
        let short = "one hundred characters or fewer";
        let verdict = detector.verdict(short).unwrap();
        assert_eq!(verdict.band, Band::NotRecognized);
        assert_eq!(verdict.ai_percentage, None);

        let long = "word ".repeat(60) + ". another sentence of words here.";
        let verdict = detector.verdict(&long).unwrap();
        assert_ne!(verdict.band, Band::NotRecognized);
        assert!(verdict.ai_percentage.is_some());
    }

    #[test]
    fn calibration_separates_planted_classes() {
        // class 1 has high perplexity and low burstiness
        let mut features = Vec::new();
        let mut labels = Vec::new();
        let mut rng = rng_from(3);
        for i in 0..60 {
            let y = i % 2;
            let ppl = if y == 1 { 80.0 } else { 20.0 } + rng.random::<f64>() * 5.0;
            let burst = if y == 1 { 0.2 } else { 0.8 } + rng.random::<f64>() * 0.05;
            features.push([ppl, burst]);
            labels.push(y);
        }
        let calibration = fit_calibration(&features, &labels).unwrap();
        let p_ai_like = calibration.probability_ai(82.0, 0.21);
        let p_human_like = calibration.probability_ai(19.0, 0.79);
        assert!(p_ai_like > 0.9, "{p_ai_like}");
        assert!(p_human_like < 0.1, "{p_human_like}");

        assert!(matches!(
            fit_calibration(&features, &vec![0; 60]),
            Err(DetectorError::SingleClass)
        ));
    }

    #[test]
    fn response_mapping_handles_percentages_and_messages() {
        let verdict = map_response(r#"{"ai_percentage": 95}"#).unwrap();
        assert_eq!(verdict.band, Band::Ai);
        assert_eq!(verdict.ai_percentage, Some(95));

        let verdict = map_response(r#"{"ai_percentage": 5}"#).unwrap();
        assert_eq!(verdict.band, Band::Human);

        let verdict = map_response(
            r#"{"message": "Try typing in some more text (>250 characters) so we can give you accurate results"}"#,
        )
        .unwrap();
        assert_eq!(verdict.band, Band::NotRecognized);

        let verdict = map_response(
            r#"{"message": "This text is likely to be a mix of human and AI text"}"#,
        )
        .unwrap();
        assert_eq!(verdict.band, Band::Mix);

        assert!(matches!(
            map_response(r#"{"message": "no idea"}"#),
            Err(DetectorError::Protocol(_))
        ));
        assert!(matches!(
            map_response(r#"{"ai_percentage": 150}"#),
            Err(DetectorError::Protocol(_))
        ));
        assert!(matches!(
            map_response("not json"),
            Err(DetectorError::Protocol(_))
        ));
    }

    #[test]
    fn fixture_client_reads_by_document_id() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("doc-1.json"), r#"{"ai_percentage": 92}"#).unwrap();
        std::fs::write(
            dir.path().join("doc-2.json"),
            r#"{"message": "This text is most likely to be written by a human"}"#,
        )
        .unwrap();
        let client = FixtureDetectorClient {
            dir: dir.path().to_path_buf(),
        };
        assert_eq!(client.verdict("doc-1", "x").unwrap().band, Band::Ai);
        assert_eq!(client.verdict("doc-2", "x").unwrap().band, Band::Human);
        assert!(matches!(
            client.verdict("doc-3", "x"),
            Err(DetectorError::MissingFixture { .. })
        ));
    }

    /// One-shot HTTP server on a local port for client tests.
    fn serve_once(response: &'static str) -> String {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        std::thread::spawn(move || {
            let (mut stream, _) = listener.accept().unwrap();
            let mut buf = [0u8; 4096];
            let mut request = Vec::new();
            loop {
                let n = stream.read(&mut buf).unwrap();
                request.extend_from_slice(&buf[..n]);
                if request.windows(4).any(|w| w == b"\r\n\r\n") {
                    // read body up to content-length
                    let text = String::from_utf8_lossy(&request);
                    let content_length = text
                        .lines()
                        .find_map(|l| l.to_lowercase().strip_prefix("content-length:").map(|v| v.trim().parse::<usize>().unwrap()))
                        .unwrap_or(0);
                    let body_start = request.windows(4).position(|w| w == b"\r\n\r\n").unwrap() + 4;
                    while request.len() < body_start + content_length {
                        let n = stream.read(&mut buf).unwrap();
                        request.extend_from_slice(&buf[..n]);
                    }
                    break;
                }
            }
            let text = String::from_utf8_lossy(&request);
            assert!(text.contains("\"text\""), "request carries the text field");
            stream.write_all(response.as_bytes()).unwrap();
        });
        format!("http://{addr}")
    }

    #[test]
    fn http_client_maps_success_responses() {
        let body = r#"{"ai_percentage": 91}"#;
        let endpoint = serve_once(
            "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: 21\r\n\r\n{\"ai_percentage\": 91}",
        );
        assert_eq!(body.len(), 21);
        let client = HttpDetectorClient::new(endpoint);
        let verdict = client.verdict("d1", "some text").unwrap();
        assert_eq!(verdict.band, Band::Ai);
        assert_eq!(verdict.ai_percentage, Some(91));
    }

    #[test]
    fn http_client_surfaces_non_2xx_as_transport() {
        let endpoint = serve_once("HTTP/1.1 500 Internal Server Error\r\ncontent-length: 0\r\n\r\n");
        let client = HttpDetectorClient {
            max_retries: 0,
            ..HttpDetectorClient::new(endpoint)
        };
        assert!(matches!(
            client.verdict("d1", "text"),
            Err(DetectorError::Transport { .. })
        ));
    }

    #[test]
    fn http_client_connection_refused_is_transport() {
        let client = HttpDetectorClient {
            max_retries: 1,
            timeout: Duration::from_millis(300),
            ..HttpDetectorClient::new("http://127.0.0.1:9")
        };
        assert!(matches!(
            client.verdict("d1", "text"),
            Err(DetectorError::Transport { .. })
        ));
    }

    fn verdicts_from_cells(human: [u64; 5], llm: [u64; 5], labels: &mut Vec<usize>) -> Vec<DetectorVerdict> {
        let mut verdicts = Vec::new();
        for (col, &count) in human.iter().enumerate() {
            for _ in 0..count {
                verdicts.push(DetectorVerdict {
                    band: BAND_COLUMNS[col],
                    ai_percentage: None,
                    raw_message: String::new(),
                });
                labels.push(0);
            }
        }
        for (col, &count) in llm.iter().enumerate() {
            for _ in 0..count {
                verdicts.push(DetectorVerdict {
                    band: BAND_COLUMNS[col],
                    ai_percentage: None,
                    raw_message: String::new(),
                });
                labels.push(1);
            }
        }
        verdicts
    }

    #[test]
    fn comparison_reproduces_published_accuracies() {
        // external detector: human (59, 1, 0, 8, 0), llm (5, 35, 7, 0, 5)
        let mut labels = Vec::new();
        let external = verdicts_from_cells([59, 1, 0, 8, 0], [5, 35, 7, 0, 5], &mut labels);
        let report = compare(&[("external".to_string(), external)], &labels).unwrap();
        let row = &report.rows[0];
        assert_eq!(labels.len(), 120);
        assert_eq!(report.n_human, 68);
        assert_eq!(report.n_llm, 52);
        assert_eq!(row.human_row, [59, 1, 0, 8, 0]);
        assert_eq!(row.llm_row, [5, 35, 7, 0, 5]);
        assert!((row.accuracy - 94.0 / 120.0).abs() < 1e-12);
        assert_eq!(format!("{:.1}%", row.accuracy * 100.0), "78.3%");

        // internal model: human (66, 2, 0, 0, 0), llm (1, 51, 0, 0, 0)
        let mut labels = Vec::new();
        let internal = verdicts_from_cells([66, 2, 0, 0, 0], [1, 51, 0, 0, 0], &mut labels);
        let report = compare(&[("internal".to_string(), internal)], &labels).unwrap();
        let row = &report.rows[0];
        assert!((row.accuracy - 117.0 / 120.0).abs() < 1e-12);
        assert_eq!(format!("{:.1}%", row.accuracy * 100.0), "97.5%");
    }

    #[test]
    fn comparison_counts_and_errors() {
        let all_correct = vec![
            DetectorVerdict::from_percentage(5),
            DetectorVerdict::from_percentage(95),
        ];
        let report = compare(&[("d".to_string(), all_correct)], &[0, 1]).unwrap();
        assert_eq!(report.rows[0].accuracy, 1.0);

        let mismatched = vec![DetectorVerdict::from_percentage(5)];
        assert!(matches!(
            compare(&[("d".to_string(), mismatched)], &[0, 1]),
            Err(DetectorError::CountMismatch { .. })
        ));
    }

    #[test]
    fn internal_verdicts_use_decision_rule() {
        let v = DetectorVerdict::from_internal_probability(0.47);
        assert_eq!(v.band, Band::Human);
        assert_eq!(v.ai_percentage, Some(47));
        let v = DetectorVerdict::from_internal_probability(0.5);
        assert_eq!(v.band, Band::Ai);
        let v = DetectorVerdict::from_internal_probability(0.97);
        assert_eq!(v.band, Band::Ai);
        assert_eq!(v.ai_percentage, Some(97));
    }

    #[test]
    fn table_layout_rendering() {
        let mut labels = Vec::new();
        let verdicts = verdicts_from_cells([2, 0, 0, 0, 0], [0, 2, 0, 0, 0], &mut labels);
        let report = compare(&[("baseline".to_string(), verdicts)], &labels).unwrap();
        let md = report.to_markdown();
        assert!(md.contains("| Detector | Class | Human | AI | Mix | Different Result | Not Recognized | Accuracy |"));
        assert!(md.contains("100.0%"));
        let csv = report.to_csv();
        assert!(csv.starts_with("detector,class,human,ai,mix,different_result,not_recognized,accuracy"));
    }
}
