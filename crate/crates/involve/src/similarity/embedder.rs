//! Token embedding backends for the matching kernel.

use ndarray::Array2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use super::kernel::EmbeddingMatrix;

/// Errors raised by embedding backends.
#[derive(Debug, Error)]
pub enum EmbedderError {
    /// The token sequence was empty.
    #[error("cannot embed an empty token sequence")]
    EmptyInput,
    /// The backend failed for a reason outside this crate's control.
    #[error("embedding backend failure: {0}")]
    Backend(String),
}

/// A deterministic token embedder.
///
/// Implementations must return the same matrix for the same token
/// sequence, every time, on every platform — dataset labels and scores
/// are reproduced from the embedder identifier alone.
pub trait ContextualEmbedder: Send + Sync {
    /// Stable identifier recorded in dataset metadata.
    fn id(&self) -> &str;

    /// Embedding dimension (columns of the returned matrix).
    fn dim(&self) -> usize;

    /// Whether concurrent `embed` calls are permitted. Batch scoring
    /// serializes calls unless this returns true.
    fn concurrent_safe(&self) -> bool;

    /// Embeds a token sequence, one matrix row per token, in order.
    fn embed(&self, tokens: &[String]) -> Result<EmbeddingMatrix, EmbedderError>;
}

/// Character n-gram hash embedder.
///
/// Each token is lowercased and decomposed into character trigrams of
/// `<token>` (with boundary markers) plus a whole-token feature. Every
/// feature seeds a counter-based RNG that emits a fixed Gaussian vector;
/// the token embedding is the feature sum. Tokens sharing morphology get
/// correlated vectors, unrelated tokens are near-orthogonal in high
/// dimension, and the construction needs no model files. Stateless, so
/// concurrent use is safe.
#[derive(Debug, Clone)]
pub struct NgramHashEmbedder {
    id: String,
    dim: usize,
}

impl NgramHashEmbedder {
    /// Creates an embedder with the given dimension.
    pub fn new(dim: usize) -> Self {
        Self { id: format!("ngram-hash-v1-d{dim}"), dim }
    }

    fn feature_vector(&self, feature: &str) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(fnv1a(feature.as_bytes()));
        (0..self.dim).map(|_| rng.sample(StandardNormal)).collect()
    }
}

impl Default for NgramHashEmbedder {
    fn default() -> Self {
        Self::new(64)
    }
}

/// FNV-1a 64-bit hash. Implemented inline because the standard library
/// hasher is not stable across releases, and embeddings must never drift.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Boundary-marked character trigrams plus the whole token.
fn features(token: &str) -> Vec<String> {
    let marked: Vec<char> = std::iter::once('<')
        .chain(token.chars())
        .chain(std::iter::once('>'))
        .collect();
    let mut feats = Vec::new();
    for window in marked.windows(3) {
        feats.push(window.iter().collect());
    }
    feats.push(format!("={token}"));
    feats
}

impl ContextualEmbedder for NgramHashEmbedder {
    fn id(&self) -> &str {
        &self.id
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn concurrent_safe(&self) -> bool {
        true
    }

    fn embed(&self, tokens: &[String]) -> Result<EmbeddingMatrix, EmbedderError> {
        if tokens.is_empty() {
            return Err(EmbedderError::EmptyInput);
        }
        let mut data = Array2::zeros((tokens.len(), self.dim));
        for (row, token) in tokens.iter().enumerate() {
            let folded = token.to_lowercase();
            for feature in features(&folded) {
                let vec = self.feature_vector(&feature);
                for (col, v) in vec.iter().enumerate() {
                    data[[row, col]] += v;
                }
            }
        }
        EmbeddingMatrix::new(data)
            .map_err(|e| EmbedderError::Backend(format!("embedding construction failed: {e}")))
    }
}
