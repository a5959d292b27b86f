//! Dual-head detector: a small transformer encoder shared by a scalar
//! regression head (document-level involvement) and a per-token two-class
//! head (token-level contribution labels).
//!
//! The model trains by minimizing the sum of a squared-error term on the
//! scalar head and a class-weighted cross-entropy term on the token head.
//! All arithmetic is `f64`, initialization and shuffling come from a
//! seeded generator, and sequences are processed one at a time, so
//! training and inference are bit-reproducible for a given config.

mod checkpoint;
mod dual_head;
mod loss;
mod nn;
mod train;

pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use dual_head::{DetectorConfig, DualHeadModel, DualHeadOutput, Prediction};
pub use loss::{combined_loss, loss_gradients, LossParts};
pub use train::{
    train, train_binary_classifier, train_single_head, BinaryClassifier, EpochStats, HeadKind,
    TrainOptions, TrainingState,
};

use thiserror::Error;

/// Errors from model construction, training, inference, and persistence.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("input text produced no tokens")]
    EmptyInput,
    #[error("dataset has no records")]
    EmptyDataset,
    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),
    #[error("non-finite value in {0}")]
    NumericalError(String),
    #[error("training diverged at epoch {epoch}: {message}")]
    Diverged { epoch: usize, message: String },
    #[error("class labels are one-sided; binary training needs both classes")]
    PartitionDegenerate,
    #[error("label vector mismatch: {0}")]
    LabelMismatch(String),
    #[error("cannot load model: {0}")]
    ModelLoad(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
