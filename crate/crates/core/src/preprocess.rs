//! Text normalization: tokenization, stopword removal, rule-based
//! lemmatization, and per-class word statistics.
//!
//! The pipeline is deterministic by construction. The stopword list and the
//! lemmatizer's exception table are fixed, versioned artifacts whose hashes
//! travel with persisted models, so inference can refuse to run against a
//! different preprocessing configuration.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::{Corpus, Document};

/// Version tags recorded in model metadata.
pub const TOKENIZER_VERSION: &str = "tokenize-v1";
pub const LEMMATIZER_VERSION: &str = "lemma-v1";
pub const STOPLIST_VERSION: &str = "stoplist-v1";

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords_v1.txt");

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("failed to read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("no documents match the class selector")]
    NoMatchingDocuments,
}

/// Fully normalized token stream for one document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenList {
    pub tokens: Vec<String>,
    pub source_id: String,
}

impl TokenList {
    pub fn new(tokens: Vec<String>, source_id: impl Into<String>) -> TokenList {
        TokenList {
            tokens,
            source_id: source_id.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Splits text into lowercase word tokens.
///
/// A token is a maximal run of Unicode letters/digits; apostrophes bind a
/// run together but are stripped from the output ("don't" becomes "dont").
/// Punctuation-only runs are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            for lower in ch.to_lowercase() {
                current.push(lower);
            }
        } else if ch == '\'' || ch == '\u{2019}' {
            // apostrophe joins the run but is not emitted
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// A fixed stopword set plus the raw file contents and their hash.
#[derive(Debug, Clone)]
pub struct StopwordSet {
    words: HashSet<String>,
    contents: String,
    hash: String,
}

impl StopwordSet {
    /// The shipped default list (`stoplist-v1`).
    pub fn default_list() -> StopwordSet {
        StopwordSet::from_contents(DEFAULT_STOPWORDS)
    }

    /// An empty set; `remove_stopwords` becomes the identity.
    pub fn empty() -> StopwordSet {
        StopwordSet::from_contents("")
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<StopwordSet, PreprocessError> {
        let path = path.as_ref();
        let contents = std::fs::read_to_string(path).map_err(|e| PreprocessError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Ok(StopwordSet::from_contents(&contents))
    }

    /// Parses a plain-text list: one word per line, `#` starts a comment.
    /// The hash covers the raw bytes, so any edit to the file counts as a
    /// different list.
    pub fn from_contents(contents: &str) -> StopwordSet {
        let words = contents
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.to_lowercase())
            .collect();
        let mut hasher = Sha256::new();
        hasher.update(contents.as_bytes());
        let hash = hex_digest(hasher);
        StopwordSet {
            words,
            contents: contents.to_string(),
            hash,
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    /// SHA-256 of the source file bytes, recorded in model metadata.
    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// The raw list contents: exactly the bytes the hash covers.
    pub fn contents(&self) -> &str {
        &self.contents
    }

    /// The raw default list contents, for writing alongside saved models.
    pub fn default_contents() -> &'static str {
        DEFAULT_STOPWORDS
    }
}

fn hex_digest(hasher: Sha256) -> String {
    let bytes = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in bytes {
        write!(out, "{b:02x}").expect("writing to String cannot fail");
    }
    out
}

/// Order-preserving stopword filter.
pub fn remove_stopwords(tokens: Vec<String>, stopset: &StopwordSet) -> Vec<String> {
    tokens
        .into_iter()
        .filter(|t| !stopset.contains(t))
        .collect()
}

/// Irregular forms and words the suffix rules would mangle (`lemma-v1`).
/// Targets are fixed points of the lemmatizer so the pipeline is idempotent.
static LEMMA_EXCEPTIONS: &[(&str, &str)] = &[
    ("agreed", "agree"),
    ("analyses", "analysis"),
    ("argued", "argue"),
    ("arguing", "argue"),
    ("ate", "eat"),
    ("became", "become"),
    ("began", "begin"),
    ("begun", "begin"),
    ("believed", "believe"),
    ("believing", "believe"),
    ("bought", "buy"),
    ("brought", "bring"),
    ("built", "build"),
    ("came", "come"),
    ("children", "child"),
    ("chose", "choose"),
    ("chosen", "choose"),
    ("created", "create"),
    ("creating", "create"),
    ("crises", "crisis"),
    ("criteria", "criterion"),
    ("decided", "decide"),
    ("deciding", "decide"),
    ("did", "do"),
    ("died", "die"),
    ("does", "do"),
    ("doing", "do"),
    ("done", "do"),
    ("drove", "drive"),
    ("driven", "drive"),
    ("eaten", "eat"),
    ("encouraged", "encourage"),
    ("encouraging", "encourage"),
    ("ensured", "ensure"),
    ("ensuring", "ensure"),
    ("feet", "foot"),
    ("fell", "fall"),
    ("fallen", "fall"),
    ("felt", "feel"),
    ("found", "find"),
    ("gave", "give"),
    ("geese", "goose"),
    ("given", "give"),
    ("goes", "go"),
    ("going", "go"),
    ("gone", "go"),
    ("got", "get"),
    ("gotten", "get"),
    ("grew", "grow"),
    ("grown", "grow"),
    ("had", "have"),
    ("has", "have"),
    ("heard", "hear"),
    ("held", "hold"),
    ("hypotheses", "hypothesis"),
    ("improved", "improve"),
    ("improving", "improve"),
    ("included", "include"),
    ("including", "include"),
    ("increased", "increase"),
    ("increasing", "increase"),
    ("kept", "keep"),
    ("knew", "know"),
    ("known", "know"),
    ("led", "lead"),
    ("lost", "lose"),
    ("made", "make"),
    ("meant", "mean"),
    ("men", "man"),
    ("met", "meet"),
    ("mice", "mouse"),
    ("movies", "movie"),
    ("news", "news"),
    ("paid", "pay"),
    ("phenomena", "phenomenon"),
    ("produced", "produce"),
    ("producing", "produce"),
    ("provided", "provide"),
    ("providing", "provide"),
    ("ran", "run"),
    ("received", "receive"),
    ("receiving", "receive"),
    ("reduced", "reduce"),
    ("reducing", "reduce"),
    ("required", "require"),
    ("requiring", "require"),
    ("said", "say"),
    ("sat", "sit"),
    ("saw", "see"),
    ("seen", "see"),
    ("sent", "send"),
    ("series", "series"),
    ("species", "species"),
    ("spent", "spend"),
    ("spoke", "speak"),
    ("spoken", "speak"),
    ("stood", "stand"),
    ("teeth", "tooth"),
    ("thought", "think"),
    ("told", "tell"),
    ("took", "take"),
    ("taken", "take"),
    ("understood", "understand"),
    ("used", "use"),
    ("uses", "use"),
    ("using", "use"),
    ("went", "go"),
    ("women", "woman"),
    ("wrote", "write"),
    ("written", "write"),
];

fn exception_table() -> &'static HashMap<&'static str, &'static str> {
    static TABLE: OnceLock<HashMap<&'static str, &'static str>> = OnceLock::new();
    TABLE.get_or_init(|| LEMMA_EXCEPTIONS.iter().copied().collect())
}

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u' | b'y')
}

fn has_vowel(s: &str) -> bool {
    s.bytes().any(is_vowel)
}

/// True for stems like "vot" or "driv": a single vowel group wedged between
/// consonants, where the dropped final "e" should be restored.
fn short_cvc(stem: &str) -> bool {
    let b = stem.as_bytes();
    let n = b.len();
    if n < 3 {
        return false;
    }
    let (c1, v, c2) = (b[n - 3], b[n - 2], b[n - 1]);
    if is_vowel(c1) || !is_vowel(v) || is_vowel(c2) || matches!(c2, b'w' | b'x' | b'y') {
        return false;
    }
    !has_vowel(&stem[..n - 3])
}

/// Restores a stem after stripping "ed"/"ing".
fn restore(stem: &str) -> String {
    let b = stem.as_bytes();
    let n = b.len();
    if n >= 4 && b[n - 1] == b[n - 2] && !is_vowel(b[n - 1]) && !matches!(b[n - 1], b'l' | b's' | b'z')
    {
        return stem[..n - 1].to_string(); // stopped -> stop, planned -> plan
    }
    if n >= 4 && stem.ends_with("at") && !is_vowel(b[n - 3]) {
        return format!("{stem}e"); // stat -> state, debat -> debate; "treat" is left alone
    }
    if n >= 4 && stem.ends_with("iz") && !is_vowel(b[n - 3]) {
        return format!("{stem}e"); // organiz -> organize
    }
    if stem.ends_with("bl") {
        return format!("{stem}e"); // enabl -> enable
    }
    if short_cvc(stem) {
        return format!("{stem}e"); // vot -> vote, driv -> drive
    }
    stem.to_string()
}

/// One pass of the suffix rules; `lemmatize_word` iterates this to a fixed
/// point so that e.g. "buildings" -> "building" -> "build" is stable.
fn lemma_step(word: &str) -> String {
    if let Some(target) = exception_table().get(word) {
        return (*target).to_string();
    }
    // Rules are ASCII-alphabetic only; anything else passes through.
    if word.len() < 3 || !word.bytes().all(|b| b.is_ascii_lowercase()) {
        return word.to_string();
    }
    let n = word.len();

    if n >= 5 && word.ends_with("ies") {
        return format!("{}y", &word[..n - 3]); // cities -> city
    }
    if n >= 5 && word.ends_with("sses") {
        return word[..n - 2].to_string(); // classes -> class
    }
    if n >= 5 && (word.ends_with("ches") || word.ends_with("shes")) {
        return word[..n - 2].to_string(); // churches -> church
    }
    if n >= 4 && (word.ends_with("xes") || word.ends_with("zes") || word.ends_with("oes")) {
        return word[..n - 2].to_string(); // boxes -> box, heroes -> hero
    }
    if n >= 4
        && word.ends_with('s')
        && !word.ends_with("ss")
        && !word.ends_with("us")
        && !word.ends_with("is")
    {
        return word[..n - 1].to_string(); // votes -> vote, cars -> car
    }
    if n >= 5 && word.ends_with("ied") {
        return format!("{}y", &word[..n - 3]); // studied -> study
    }
    if n >= 5 && word.ends_with("ed") {
        let stem = &word[..n - 2];
        // Skip stems ending in 'e' ("speed", "freed"): stripping would
        // fabricate a bogus stem and break idempotence.
        if stem.len() >= 3 && has_vowel(stem) && !stem.ends_with('e') {
            return restore(stem);
        }
        return word.to_string();
    }
    if n >= 5 && word.ends_with("ing") {
        let stem = &word[..n - 3];
        if stem.len() >= 2 && has_vowel(stem) {
            return restore(stem);
        }
        return word.to_string();
    }
    word.to_string()
}

/// Lemmatizes one lowercase word: exception table first, then suffix rules,
/// iterated to a fixed point. Out-of-rule words pass through unchanged.
pub fn lemmatize_word(word: &str) -> String {
    let mut current = word.to_string();
    for _ in 0..8 {
        let next = lemma_step(&current);
        if next == current {
            return current;
        }
        current = next;
    }
    current
}

/// Lemmatizes a token sequence, preserving order.
pub fn lemmatize(tokens: &[String]) -> Vec<String> {
    tokens.iter().map(|t| lemmatize_word(t)).collect()
}

/// The full normalization pipeline with a fixed stopword set.
#[derive(Debug, Clone)]
pub struct Preprocessor {
    stopwords: StopwordSet,
}

impl Preprocessor {
    pub fn new(stopwords: StopwordSet) -> Preprocessor {
        Preprocessor { stopwords }
    }

    pub fn with_default_stopwords() -> Preprocessor {
        Preprocessor::new(StopwordSet::default_list())
    }

    pub fn stopwords(&self) -> &StopwordSet {
        &self.stopwords
    }

    /// tokenize -> stopword filter -> lemmatize -> stopword filter.
    ///
    /// The second filter upholds the invariant that no output token is in
    /// the stopword set even when lemmatization maps onto one.
    pub fn process_text(&self, source_id: &str, text: &str) -> TokenList {
        let tokens = remove_stopwords(tokenize(text), &self.stopwords);
        let lemmas = remove_stopwords(lemmatize(&tokens), &self.stopwords);
        TokenList::new(lemmas, source_id)
    }

    pub fn process(&self, doc: &Document) -> TokenList {
        self.process_text(&doc.id, &doc.text)
    }

    pub fn process_corpus(&self, corpus: &Corpus) -> Vec<TokenList> {
        corpus.iter().map(|d| self.process(d)).collect()
    }
}

/// Word counts and shares for one class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyEntry {
    pub word: String,
    pub count: u64,
    /// Percentage of all tokens in the class (0..=100).
    pub percentage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyTable {
    pub entries: Vec<FrequencyEntry>,
    /// Token total for the class; percentages are counts / this * 100.
    pub total_tokens: u64,
}

impl FrequencyTable {
    /// Top-k counter over already-normalized token lists: descending by
    /// count, ties broken lexicographically.
    pub fn from_token_lists<'a, I>(lists: I, top_k: usize) -> Result<FrequencyTable, PreprocessError>
    where
        I: IntoIterator<Item = &'a TokenList>,
    {
        let mut counts: HashMap<&str, u64> = HashMap::new();
        let mut total: u64 = 0;
        let mut any = false;
        for list in lists {
            any = true;
            for token in &list.tokens {
                *counts.entry(token.as_str()).or_insert(0) += 1;
                total += 1;
            }
        }
        if !any {
            return Err(PreprocessError::NoMatchingDocuments);
        }
        let mut pairs: Vec<(&str, u64)> = counts.into_iter().collect();
        pairs.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        pairs.truncate(top_k);
        let entries = pairs
            .into_iter()
            .map(|(word, count)| FrequencyEntry {
                word: word.to_string(),
                count,
                percentage: if total == 0 {
                    0.0
                } else {
                    count as f64 / total as f64 * 100.0
                },
            })
            .collect();
        Ok(FrequencyTable {
            entries,
            total_tokens: total,
        })
    }

    /// CSV export: `word,count,percentage` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("word,count,percentage\n");
        for e in &self.entries {
            writeln!(out, "{},{},{:.4}", e.word, e.count, e.percentage)
                .expect("writing to String cannot fail");
        }
        out
    }
}

/// Runs the pipeline over all documents matching `select` and returns the
/// top-k frequency table for that class.
pub fn class_frequencies<F>(
    corpus: &Corpus,
    pre: &Preprocessor,
    select: F,
    top_k: usize,
) -> Result<FrequencyTable, PreprocessError>
where
    F: Fn(&Document) -> bool,
{
    let lists: Vec<TokenList> = corpus
        .iter()
        .filter(|d| select(d))
        .map(|d| pre.process(d))
        .collect();
    if lists.is_empty() {
        return Err(PreprocessError::NoMatchingDocuments);
    }
    FrequencyTable::from_token_lists(lists.iter(), top_k)
}

/// Relative weights for word-cloud rendering: count / max count, in table
/// order (non-increasing). Empty tables yield an empty list.
pub fn wordcloud_data(table: &FrequencyTable) -> Vec<(String, f64)> {
    let max = table.entries.first().map(|e| e.count).unwrap_or(0);
    if max == 0 {
        return Vec::new();
    }
    table
        .entries
        .iter()
        .map(|e| (e.word.clone(), e.count as f64 / max as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Category, Subcategory};
    use proptest::prelude::*;

    #[test]
    fn tokenize_segments_and_lowercases() {
        assert_eq!(tokenize("Car-free cities!"), ["car", "free", "cities"]);
        assert_eq!(tokenize(""), Vec::<String>::new());
        assert_eq!(
            tokenize("dear Senator write express"),
            ["dear", "senator", "write", "express"]
        );
        assert_eq!(tokenize("don't stop—can't!"), ["dont", "stop", "cant"]);
        assert_eq!(tokenize("...!!!"), Vec::<String>::new());
        assert_eq!(tokenize("rated 5of10"), ["rated", "5of10"]);
    }

    #[test]
    fn stopwords_filter_preserves_order() {
        let stopset = StopwordSet::default_list();
        let tokens = vec!["the", "car", "is", "fast"]
            .into_iter()
            .map(String::from)
            .collect();
        assert_eq!(remove_stopwords(tokens, &stopset), ["car", "fast"]);

        let empty = StopwordSet::empty();
        let tokens: Vec<String> = vec!["the".into(), "car".into()];
        assert_eq!(remove_stopwords(tokens.clone(), &empty), tokens);
    }

    #[test]
    fn default_stoplist_retains_signal_words() {
        let stopset = StopwordSet::default_list();
        for kept in ["not", "would", "do", "say", "much", "many", "also", "less"] {
            assert!(!stopset.contains(kept), "{kept:?} must survive the stoplist");
        }
        assert!(stopset.contains("the"));
        assert!(stopset.contains("is"));
        let n = stopset.len();
        assert!((130..=180).contains(&n), "list size drifted: {n}");
    }

    #[test]
    fn lemmatizer_pinned_pairs() {
        assert_eq!(lemmatize_word("cities"), "city");
        assert_eq!(lemmatize_word("voted"), "vote");
        assert_eq!(lemmatize_word("votes"), "vote");
        assert_eq!(lemmatize_word("car"), "car");
        assert_eq!(lemmatize_word("running"), "run");
        assert_eq!(lemmatize_word("stopped"), "stop");
        assert_eq!(lemmatize_word("studied"), "study");
        assert_eq!(lemmatize_word("classes"), "class");
        assert_eq!(lemmatize_word("going"), "go");
        assert_eq!(lemmatize_word("said"), "say");
        assert_eq!(lemmatize_word("using"), "use");
        assert_eq!(lemmatize_word("thing"), "thing");
        assert_eq!(lemmatize_word("created"), "create");
        assert_eq!(lemmatize_word("treated"), "treat");
        assert_eq!(lemmatize_word("speed"), "speed");
        assert_eq!(lemmatize_word("w003"), "w003");
    }

    #[test]
    fn lemma_exception_targets_are_fixed_points() {
        for (_, target) in LEMMA_EXCEPTIONS {
            assert_eq!(
                lemmatize_word(target),
                *target,
                "exception target {target:?} is not stable"
            );
        }
    }

    #[test]
    fn class_frequencies_small_arithmetic() {
        let lists = vec![TokenList::new(
            vec!["a".into(), "a".into(), "b".into()],
            "d1",
        )];
        let table = FrequencyTable::from_token_lists(lists.iter(), 2).unwrap();
        assert_eq!(table.entries.len(), 2);
        assert_eq!(table.entries[0].word, "a");
        assert_eq!(table.entries[0].count, 2);
        assert!((table.entries[0].percentage - 200.0 / 3.0).abs() < 1e-9);
        assert_eq!(table.entries[1].word, "b");
        assert!((table.entries[1].percentage - 100.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn class_frequencies_match_brute_force_counter() {
        let pre = Preprocessor::with_default_stopwords();
        let mut docs = Vec::new();
        for i in 0..20 {
            let cat = if i % 2 == 0 { Category::Human } else { Category::Llms };
            let sub = if i % 2 == 0 {
                Some(Subcategory::Human)
            } else {
                Some(Subcategory::Bard)
            };
            let text = format!(
                "The voters voted in cities. Cars and car number {i} moved fast; people vote."
            );
            docs.push(Document::new(format!("d{i}"), 0, text, cat, sub).unwrap());
        }
        let corpus = Corpus::from_documents(docs, "test").unwrap();
        let table =
            class_frequencies(&corpus, &pre, |d| d.category == Category::Human, 100).unwrap();

        // Independent counter over the same pipeline output.
        let mut brute: HashMap<String, u64> = HashMap::new();
        let mut total = 0u64;
        for d in corpus.iter().filter(|d| d.category == Category::Human) {
            for t in pre.process(d).tokens {
                *brute.entry(t).or_insert(0) += 1;
                total += 1;
            }
        }
        assert_eq!(table.total_tokens, total);
        for e in &table.entries {
            assert_eq!(brute[&e.word], e.count);
            let recomputed = e.percentage / 100.0 * total as f64;
            assert!((recomputed - e.count as f64).abs() < 1e-9 * e.count as f64 + 1e-12);
        }
    }

    #[test]
    fn class_frequencies_empty_class_errors() {
        let corpus = Corpus::from_documents(
            vec![Document::new("a", 0, "some text", Category::Human, Some(Subcategory::Human))
                .unwrap()],
            "t",
        )
        .unwrap();
        let pre = Preprocessor::with_default_stopwords();
        let err = class_frequencies(&corpus, &pre, |d| d.category == Category::Llms, 5);
        assert!(matches!(err, Err(PreprocessError::NoMatchingDocuments)));
    }

    #[test]
    fn wordcloud_weights_scale_by_max() {
        let table = FrequencyTable {
            entries: vec![
                FrequencyEntry {
                    word: "car".into(),
                    count: 2464,
                    percentage: 2.72,
                },
                FrequencyEntry {
                    word: "vote".into(),
                    count: 2163,
                    percentage: 2.39,
                },
            ],
            total_tokens: 90588,
        };
        let data = wordcloud_data(&table);
        assert_eq!(data[0].1, 1.0);
        assert!((data[1].1 - 2163.0 / 2464.0).abs() < 1e-12);
        assert!(data[0].1 >= data[1].1);

        let single = FrequencyTable {
            entries: vec![FrequencyEntry {
                word: "one".into(),
                count: 7,
                percentage: 100.0,
            }],
            total_tokens: 7,
        };
        assert_eq!(wordcloud_data(&single), vec![("one".to_string(), 1.0)]);
    }

    #[test]
    fn pipeline_keeps_tokens_out_of_stopset() {
        let pre = Preprocessor::with_default_stopwords();
        // "having" lemmatizes to "have", which is a stopword; the second
        // filter must drop it.
        let list = pre.process_text("x", "Having cars having traffic");
        assert_eq!(list.tokens, ["car", "traffic"]);
    }

    proptest! {
        #[test]
        fn pipeline_is_idempotent(text in "[a-zA-Z ,.'!?-]{0,200}") {
            let pre = Preprocessor::with_default_stopwords();
            let once = pre.process_text("p", &text);
            let rejoined = once.tokens.join(" ");
            let twice = pre.process_text("p", &rejoined);
            prop_assert_eq!(once.tokens, twice.tokens);
        }

        #[test]
        fn stopword_filter_is_a_sub_multiset(tokens in proptest::collection::vec("[a-z]{1,8}", 0..40)) {
            let stopset = StopwordSet::default_list();
            let filtered = remove_stopwords(tokens.clone(), &stopset);
            // order-preserving subsequence check
            let mut it = tokens.iter();
            for kept in &filtered {
                prop_assert!(it.any(|t| t == kept));
            }
        }
    }
}
