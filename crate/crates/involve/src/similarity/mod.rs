//! Embedding-based similarity between a prompt and a generated text.
//!
//! Both texts are tokenized and embedded, then scored by greedy token
//! matching: every reference token is matched to its best candidate token
//! by inner product. Recall (reference = prompt) measures how much of the
//! prompt survives in the generation; precision swaps the roles; F1 is
//! their harmonic mean. Raw recall is mapped to a `[0, 1]` involvement
//! score by min-max normalization with constants fitted on a batch and
//! persisted next to the dataset.

mod embedder;
mod kernel;
mod normalize;

pub use embedder::{ContextualEmbedder, EmbedderError, NgramHashEmbedder};
pub use kernel::{greedy_match_scores, EmbeddingMatrix, RawScores};
pub use normalize::{fit_normalization, normalize_scores, InvolvementScores, NormalizationConstants};

use thiserror::Error;

use crate::textprep::word_tokens;

/// Errors from similarity scoring and normalization.
#[derive(Debug, Error)]
pub enum SimilarityError {
    /// A matrix or token sequence had no entries.
    #[error("input must contain at least one token")]
    EmptyInput,
    /// Reference and candidate embedding dimensions differ.
    #[error("embedding dimension mismatch: reference {reference}, candidate {candidate}")]
    DimensionMismatch { reference: usize, candidate: usize },
    /// Matching requires unit-normalized rows; call `unit_normalized` first.
    #[error("embedding matrix rows are not unit-normalized")]
    NotUnitNormalized,
    /// An embedding value was NaN or infinite.
    #[error("embedding contains a non-finite value")]
    NonFinite,
    /// A row with zero norm cannot be unit-normalized.
    #[error("embedding row {row} has zero norm")]
    ZeroRow { row: usize },
    /// Min-max normalization needs at least two distinct raw scores.
    #[error("normalization batch has no spread: min equals max")]
    DegenerateRange,
    /// The embedder backend failed.
    #[error(transparent)]
    Embedder(#[from] EmbedderError),
}

/// Scores a (prompt, generated) pair with the given embedder.
///
/// The prompt is the reference and the generation the candidate, so
/// `recall` reads as "how much of the prompt is reused". Rows are
/// unit-normalized before matching. Empty texts are rejected.
pub fn score_pair(
    prompt: &str,
    generated: &str,
    embedder: &dyn ContextualEmbedder,
) -> Result<RawScores, SimilarityError> {
    let prompt_tokens: Vec<String> =
        word_tokens(prompt).into_iter().map(|(surface, _)| surface).collect();
    let generated_tokens: Vec<String> =
        word_tokens(generated).into_iter().map(|(surface, _)| surface).collect();
    if prompt_tokens.is_empty() || generated_tokens.is_empty() {
        return Err(SimilarityError::EmptyInput);
    }
    let reference = embedder.embed(&prompt_tokens)?.unit_normalized()?;
    let candidate = embedder.embed(&generated_tokens)?.unit_normalized()?;
    greedy_match_scores(&reference, &candidate)
}
