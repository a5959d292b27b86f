//! Greedy token-matching kernel over embedding matrices.

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use super::SimilarityError;

/// A matrix of token embeddings: one row per token.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    data: Array2<f64>,
    unit_normalized: bool,
}

impl EmbeddingMatrix {
    /// Wraps raw embeddings, rejecting empty or non-finite input.
    pub fn new(data: Array2<f64>) -> Result<Self, SimilarityError> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(SimilarityError::EmptyInput);
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(SimilarityError::NonFinite);
        }
        Ok(Self { data, unit_normalized: false })
    }

    /// Number of token rows.
    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    /// Embedding dimension.
    pub fn dim(&self) -> usize {
        self.data.ncols()
    }

    /// Whether every row has unit L2 norm.
    pub fn is_unit_normalized(&self) -> bool {
        self.unit_normalized
    }

    /// One token row.
    pub fn row(&self, index: usize) -> ArrayView1<'_, f64> {
        self.data.row(index)
    }

    /// Scales every row to unit L2 norm so inner products are cosines.
    pub fn unit_normalized(mut self) -> Result<Self, SimilarityError> {
        for (index, mut row) in self.data.rows_mut().into_iter().enumerate() {
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(SimilarityError::ZeroRow { row: index });
            }
            row.mapv_inplace(|v| v / norm);
        }
        self.unit_normalized = true;
        Ok(self)
    }
}

/// Raw matching scores before normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawScores {
    /// Mean best-match score over reference tokens.
    pub recall: f64,
    /// Mean best-match score over candidate tokens.
    pub precision: f64,
    /// Harmonic mean of precision and recall; 0 when their sum is 0.
    pub f1: f64,
}

/// Inner product with a fixed accumulation order.
///
/// Kept as a plain sequential loop (rather than a BLAS call) so that
/// swapping the reference and candidate matrices reproduces bit-identical
/// precision/recall values: multiplication commutes exactly in IEEE 754
/// and the summation order is the same on both paths.
fn dot(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x * y;
    }
    acc
}

/// Mean over `outer` rows of the maximum inner product against `inner` rows.
fn mean_best_match(outer: &EmbeddingMatrix, inner: &EmbeddingMatrix) -> f64 {
    let mut total = 0.0;
    for i in 0..outer.rows() {
        let mut best = f64::NEG_INFINITY;
        for j in 0..inner.rows() {
            let score = dot(outer.row(i), inner.row(j));
            if score > best {
                best = score;
            }
        }
        total += best;
    }
    total / outer.rows() as f64
}

/// Computes recall, precision, and F1 by greedy token matching.
///
/// Recall averages, over reference tokens, the best inner product against
/// any candidate token; precision swaps the roles; F1 is the harmonic
/// mean, defined as 0 when `precision + recall == 0`. Both matrices must
/// be non-empty, unit-normalized, and share an embedding dimension.
pub fn greedy_match_scores(
    reference: &EmbeddingMatrix,
    candidate: &EmbeddingMatrix,
) -> Result<RawScores, SimilarityError> {
    if reference.dim() != candidate.dim() {
        return Err(SimilarityError::DimensionMismatch {
            reference: reference.dim(),
            candidate: candidate.dim(),
        });
    }
    if !reference.is_unit_normalized() || !candidate.is_unit_normalized() {
        return Err(SimilarityError::NotUnitNormalized);
    }
    let recall = mean_best_match(reference, candidate);
    let precision = mean_best_match(candidate, reference);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        (2.0 * precision * recall / (precision + recall)).clamp(-1.0, 1.0)
    };
    Ok(RawScores { recall, precision, f1 })
}
