//! Core library for measuring human involvement in machine-assisted
//! academic writing.
//!
//! The crate is organized as a pipeline:
//!
//! - [`textprep`]: deterministic text normalization, sentence splitting,
//!   tokenization, lemmas, and stop words.
//! - [`similarity`]: embedding-based greedy token matching that turns a
//!   (prompt, generation) pair into a normalized involvement score.
//! - [`labeling`]: per-token ground-truth vectors marking which generated
//!   tokens were carried over from the prompt.
//! - [`forge`]: prompt sampling, LLM clients, and dataset construction
//!   for continuous and polarized training corpora.
//! - [`model`]: a dual-head transformer detector (scalar involvement
//!   regression plus per-token origin classification) with training and
//!   checkpointing.
//! - [`eval`]: regression, classification, and token-level metrics,
//!   threshold sweeps, and rank-correlation analysis.
//! - [`report`]: per-document analysis results rendered as static HTML.

pub mod eval;
pub mod forge;
pub mod labeling;
pub mod model;
pub mod report;
pub mod similarity;
pub mod textprep;
