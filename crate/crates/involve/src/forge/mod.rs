//! Dataset construction: prompt sampling, text generation, labeling,
//! and persistence.
//!
//! The continuous pipeline samples Z random sentences from a source
//! abstract, wraps them in a prompt template, requests a generation,
//! and labels the pair with a normalized involvement score plus
//! per-token overlap labels. The polarized pipeline pairs
//! minimal-involvement generations with verbatim human abstracts for
//! binary training.

mod client;
mod corpus;
mod dataset;
mod prompt;
mod template;

pub use client::{
    generate_pair, ClientError, DecodingParams, GeneratedPair, HttpLlmClient, LlmClient,
    MockLlmClient, RetryPolicy,
};
pub use corpus::{load_corpus, AbstractDoc};
pub use dataset::{
    build_continuous_dataset, build_polarized_dataset, polarize_dataset, Dataset, DatasetKind,
    DatasetMetadata, ForgeOptions, LabeledPair, HUMAN_MODEL_ID,
};
pub use prompt::{sample_prompt, PromptSpec};
pub use template::TemplateVariant;

use thiserror::Error;

use crate::labeling::LabelingError;
use crate::similarity::SimilarityError;
use crate::textprep::TextPrepError;

/// Errors from dataset construction and persistence.
#[derive(Debug, Error)]
pub enum ForgeError {
    /// A source abstract had no sentences.
    #[error("source document contains no sentences")]
    EmptyDocument,
    /// The corpus file contained no abstracts.
    #[error("corpus contains no abstracts")]
    EmptyCorpus,
    /// A corpus line could not be parsed.
    #[error("corpus line {line}: {message}")]
    CorpusParse { line: usize, message: String },
    /// Generation failed after all retries (or a permanent failure).
    #[error("generation failed after {attempts} attempt(s)")]
    GenerationFailed {
        attempts: u32,
        #[source]
        cause: ClientError,
    },
    /// The client returned a blank completion.
    #[error("generator returned an empty text")]
    EmptyGeneration,
    /// More than 10% of planned records failed; the batch is unusable.
    #[error("{failed} of {attempted} records failed; aborting build")]
    TooManyFailures { failed: usize, attempted: usize },
    /// Binarization left one class empty.
    #[error("threshold {threshold} puts every record in one class")]
    PartitionDegenerate { threshold: f64 },
    /// Binarization thresholds must lie strictly inside (0, 1).
    #[error("binarization threshold {0} outside (0, 1)")]
    InvalidThreshold(f64),
    /// The requested record count cannot be built.
    #[error("invalid record count {count}: {reason}")]
    InvalidCount { count: usize, reason: &'static str },
    /// A dataset file violated schema or invariants.
    #[error("dataset record at line {line}: {message}")]
    DatasetInvalid { line: usize, message: String },
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
    #[error(transparent)]
    Labeling(#[from] LabelingError),
    #[error(transparent)]
    TextPrep(#[from] TextPrepError),
    #[error("I/O failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON serialization failure: {0}")]
    Json(#[from] serde_json::Error),
}
