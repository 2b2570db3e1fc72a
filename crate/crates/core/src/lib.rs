//! Attribution toolkit for telling human-written text apart from text produced
//! by LLM tools, and for attributing LLM text to the tool that generated it.
//!
//! The pipeline runs corpus ingestion ([`corpus`]), text normalization
//! ([`preprocess`]), TF-IDF featurization ([`features`]), tree-ensemble and
//! linear classification ([`models`]), local surrogate explanations
//! ([`explain`]), evaluation and synthetic corpora ([`eval`]), and a
//! perplexity/burstiness detector with an external-service client
//! ([`detector`]).

pub mod corpus;
pub mod detector;
pub mod eval;
pub mod explain;
pub mod features;
pub mod models;
pub mod preprocess;
pub mod seed;
