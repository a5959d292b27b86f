//! Evaluation protocols for involvement detectors: threshold binarization,
//! regression / classification / token metrics, threshold sweeps,
//! cross-generator tables, least-squares fit summaries, and a
//! rank-correlation tool with residual-based outlier removal.

mod adapters;
mod analysis;
mod metrics;
mod report;

pub use adapters::{ConstantAdapter, DetectorAdapter, LabelOracleAdapter, ModelAdapter};
pub use analysis::{fitted_line, spearman_denoised, SpearmanReport};
pub use metrics::{
    auc, binarize_all, classification_metrics, regression_metrics, token_metrics,
    token_metrics_micro, ClassificationMetrics, RegressionMetrics, TokenMetrics,
};
pub use report::{
    bst_sweep, cross_model_report, evaluate_model, scatter_csv, CrossModelRow, EvalReport,
    SweepRow,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from evaluation operations.
#[derive(Debug, Error)]
pub enum EvalError {
    #[error("length mismatch: {left} vs {right}")]
    ShapeError { left: usize, right: usize },
    #[error("inputs are empty")]
    EmptyInput,
    #[error("AUC is undefined when the gold labels contain a single class")]
    AUCUndefined,
    #[error("binarization threshold {0} is outside (0, 1)")]
    InvalidThreshold(f64),
    #[error("labels have fewer than two distinct values; no line can be fitted")]
    DegenerateRange,
    #[error("fewer than 3 points available after filtering ({survivors} left)")]
    InsufficientData { survivors: usize },
    #[error("record {0} has no class label; polarize the dataset first")]
    MissingClassLabel(String),
    #[error("adapter has no score for text of record {0}")]
    UnknownText(String),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

/// Binary verdict for a text. The ordering `AiGeneration < HumanContribution`
/// matches the numeric classes 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    AiGeneration,
    HumanContribution,
}

impl Verdict {
    pub fn as_class(self) -> u8 {
        match self {
            Verdict::AiGeneration => 0,
            Verdict::HumanContribution => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::AiGeneration => "AI generation",
            Verdict::HumanContribution => "Human contribution",
        }
    }
}

/// A validated binarization threshold strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BSTConfig {
    threshold: f64,
}

impl BSTConfig {
    pub fn new(threshold: f64) -> Result<Self, EvalError> {
        if !threshold.is_finite() || threshold <= 0.0 || threshold >= 1.0 {
            return Err(EvalError::InvalidThreshold(threshold));
        }
        Ok(Self { threshold })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

/// Maps a continuous involvement value to a verdict: strictly above the
/// threshold is human contribution, at or below is AI generation.
pub fn binarize(y: f64, bst: BSTConfig) -> Verdict {
    if y > bst.threshold {
        Verdict::HumanContribution
    } else {
        Verdict::AiGeneration
    }
}
