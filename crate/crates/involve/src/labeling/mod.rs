//! Per-token ground truth: which generated tokens came from the prompt.
//!
//! A generated text G is labeled against a prompt P by lemma overlap:
//! a subword token of G gets label 1 when its parent word is a content
//! word (neither stop word nor punctuation) whose lemma appears among
//! P's content-word lemmas. Everything else — non-overlapping words,
//! stop words, punctuation, padding — is 0. The result is a fixed-length
//! binary vector sized for the detector input window.

mod tokenizer;

pub use tokenizer::{DetectorTokenizer, HashSubwordTokenizer, SubwordToken};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textprep::analyze_tokens;

/// Default label vector length, matching the detector sequence capacity.
pub const LABEL_LEN: usize = 368;

/// Errors from label-vector construction and diagnostics.
#[derive(Debug, Error)]
pub enum LabelingError {
    /// Coverage is undefined for a vector with no real positions.
    #[error("label vector has no real token positions")]
    EmptyVector,
    /// A deserialized vector violated the shape or padding invariants.
    #[error("invalid label vector: {0}")]
    Invalid(String),
}

/// Fixed-length binary token labels with an attention length.
///
/// `labels[i] = 1` marks a token carried over from the prompt. Positions
/// at or beyond `attention_len` are padding and always 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenLabelVector {
    labels: Vec<u8>,
    attention_len: usize,
}

impl TokenLabelVector {
    /// An all-zero vector of the default length.
    pub fn zeros(attention_len: usize) -> Self {
        Self::zeros_with_len(LABEL_LEN, attention_len)
    }

    /// An all-zero vector of a custom length (the length is configurable
    /// even though the shipped detector uses [`LABEL_LEN`]).
    pub fn zeros_with_len(len: usize, attention_len: usize) -> Self {
        Self { labels: vec![0; len], attention_len: attention_len.min(len) }
    }

    /// Full label sequence including padding.
    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Number of real (non-padding) positions.
    pub fn attention_len(&self) -> usize {
        self.attention_len
    }

    /// Total length including padding.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// True when the vector has no real positions.
    pub fn is_empty(&self) -> bool {
        self.attention_len == 0
    }

    /// Sets a real position to 1. Positions in the padding region are
    /// ignored, preserving the padding invariant.
    pub fn mark(&mut self, position: usize) {
        if position < self.attention_len {
            self.labels[position] = 1;
        }
    }

    /// Checks shape and padding invariants; used when loading datasets.
    pub fn validate(&self) -> Result<(), LabelingError> {
        if self.attention_len > self.labels.len() {
            return Err(LabelingError::Invalid(format!(
                "attention_len {} exceeds vector length {}",
                self.attention_len,
                self.labels.len()
            )));
        }
        if let Some(bad) = self.labels.iter().find(|&&v| v > 1) {
            return Err(LabelingError::Invalid(format!("label value {bad} outside {{0,1}}")));
        }
        if self.labels[self.attention_len..].iter().any(|&v| v != 0) {
            return Err(LabelingError::Invalid("non-zero label in padding region".into()));
        }
        Ok(())
    }
}

/// Fraction of real positions labeled 1.
pub fn label_coverage(v: &TokenLabelVector) -> Result<f64, LabelingError> {
    if v.attention_len == 0 {
        return Err(LabelingError::EmptyVector);
    }
    let ones = v.labels[..v.attention_len].iter().filter(|&&l| l == 1).count();
    Ok(ones as f64 / v.attention_len as f64)
}

/// Lemmas of the content words (not stop, not punctuation) of a text.
fn content_lemmas(text: &str) -> BTreeSet<String> {
    analyze_tokens(text)
        .into_iter()
        .filter(|t| !t.is_stop && !t.is_punct)
        .map(|t| t.lemma)
        .collect()
}

/// Labels the generated text against the prompt by content-lemma overlap.
///
/// A subword token is labeled 1 iff its parent word is a content word
/// whose lemma occurs among the prompt's content-word lemmas. Stop words
/// and punctuation are always 0, even when they occur in the prompt. The
/// generated text is truncated at the tokenizer's maximum length; an
/// empty prompt yields the all-zero vector. Total: no error cases.
pub fn common_token_labels(
    prompt: &str,
    generated: &str,
    tokenizer: &dyn DetectorTokenizer,
) -> TokenLabelVector {
    let prompt_lemmas = content_lemmas(prompt);
    let subwords = tokenizer.tokenize(generated);
    let words = analyze_tokens(generated);
    let mut vector =
        TokenLabelVector::zeros_with_len(tokenizer.max_len(), subwords.len());
    if prompt_lemmas.is_empty() {
        return vector;
    }
    for (position, subword) in subwords.iter().enumerate() {
        let parent = &words[subword.word_index];
        if !parent.is_stop && !parent.is_punct && prompt_lemmas.contains(&parent.lemma) {
            vector.mark(position);
        }
    }
    vector
}
