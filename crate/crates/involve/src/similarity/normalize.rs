//! Min-max normalization of raw matching scores.

use serde::{Deserialize, Serialize};

use super::kernel::RawScores;
use super::SimilarityError;

/// Provenance tag for the paper-motivated fixed constants used when no
/// fitted batch is available (single-pair scoring).
pub const FALLBACK_PROVENANCE: &str = "fixed-fallback";

/// Batch minimum and maximum used to map raw scores onto `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationConstants {
    /// Smallest raw score observed in the fitting batch.
    pub score_min: f64,
    /// Largest raw score observed in the fitting batch.
    pub score_max: f64,
    /// Identifier of the fitting batch, or a fixed-constant tag.
    pub provenance: String,
}

impl NormalizationConstants {
    /// Fixed constants for scoring outside a fitted batch. Raw recalls for
    /// topically related pairs typically range between 0.3 and 1.
    pub fn fallback() -> Self {
        Self { score_min: 0.3, score_max: 1.0, provenance: FALLBACK_PROVENANCE.to_string() }
    }

    /// Maps one raw score onto `[0, 1]`, clamping out-of-range input.
    pub fn apply(&self, raw: f64) -> f64 {
        ((raw - self.score_min) / (self.score_max - self.score_min)).clamp(0.0, 1.0)
    }
}

/// Raw scores together with their normalized readings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvolvementScores {
    /// The unnormalized kernel output.
    pub raw: RawScores,
    /// Normalized recall: how much of the prompt persists in the output.
    pub involvement: f64,
    /// Normalized precision: how much of the output comes from the prompt.
    pub utilization: f64,
    /// Normalized F1: balanced overlap of prompt and output.
    pub similarity: f64,
}

/// Fits normalization constants on a batch of raw recall scores.
///
/// Requires at least two values with distinct minimum and maximum;
/// constant batches cannot define a range. Non-finite scores are
/// rejected. `provenance` names the batch so persisted constants can be
/// traced back to the dataset that produced them.
pub fn fit_normalization(
    raw_recalls: &[f64],
    provenance: impl Into<String>,
) -> Result<NormalizationConstants, SimilarityError> {
    if raw_recalls.len() < 2 {
        return Err(SimilarityError::DegenerateRange);
    }
    if raw_recalls.iter().any(|v| !v.is_finite()) {
        return Err(SimilarityError::NonFinite);
    }
    let score_min = raw_recalls.iter().cloned().fold(f64::INFINITY, f64::min);
    let score_max = raw_recalls.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if score_min >= score_max {
        return Err(SimilarityError::DegenerateRange);
    }
    Ok(NormalizationConstants { score_min, score_max, provenance: provenance.into() })
}

/// Normalizes all three raw scores with the same constants, clamped to
/// `[0, 1]`.
pub fn normalize_scores(raw: RawScores, constants: &NormalizationConstants) -> InvolvementScores {
    InvolvementScores {
        raw,
        involvement: constants.apply(raw.recall),
        utilization: constants.apply(raw.precision),
        similarity: constants.apply(raw.f1),
    }
}
