//! Deterministic text preprocessing shared by labeling and dataset construction.
//!
//! Everything here is rule-based and versioned: the sentence splitter, the
//! lemmatizer, and the stop-word list are identified by name in
//! [`PreprocConfig`], which is embedded in dataset metadata so that labels
//! stay reproducible across runs and machines.

mod lemma;
mod sentences;
mod stopwords;
mod tokens;

pub use lemma::{lemmatize, LEMMATIZER_ID};
pub use sentences::split_sentences;
pub use stopwords::{is_stop_word, STOPWORD_LIST_ID};
pub use tokens::{analyze_tokens, analyze_word, word_tokens};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

/// Identifier of the rule-based sentence splitter.
pub const SENTENCE_SPLITTER_ID: &str = "rule-en-v1";
/// Identifier of the Unicode normalization form applied before tokenization.
pub const UNICODE_NORMALIZATION_ID: &str = "nfc";

#[derive(Debug, Error)]
pub enum TextPrepError {
    #[error("document is empty or whitespace-only")]
    EmptyDocument,
}

/// Byte-offset span into a source string. `end` is exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn slice<'a>(&self, text: &'a str) -> &'a str {
        &text[self.start..self.end]
    }
}

/// One sentence of a source document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub text: String,
    /// 0-based position in the source document.
    pub index: usize,
}

/// A word-level token with its lemma and stop/punctuation flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalyzedToken {
    pub surface: String,
    /// Lowercase lemma produced by the pinned dictionary lemmatizer.
    pub lemma: String,
    pub is_stop: bool,
    pub is_punct: bool,
    pub span: Span,
}

/// Identifiers of the preprocessing resources used to produce a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocConfig {
    pub sentence_splitter: String,
    pub lemmatizer: String,
    pub stopword_list: String,
    pub unicode_normalization: String,
}

impl Default for PreprocConfig {
    fn default() -> Self {
        Self {
            sentence_splitter: SENTENCE_SPLITTER_ID.to_string(),
            lemmatizer: LEMMATIZER_ID.to_string(),
            stopword_list: STOPWORD_LIST_ID.to_string(),
            unicode_normalization: UNICODE_NORMALIZATION_ID.to_string(),
        }
    }
}

/// Canonical composed form (NFC). LLM outputs mix typographic variants;
/// every pipeline entry point normalizes before tokenization so spans and
/// lemmas are computed against one canonical string.
pub fn normalize(text: &str) -> String {
    text.nfc().collect()
}
