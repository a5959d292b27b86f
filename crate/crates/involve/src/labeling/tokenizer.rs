//! Subword tokenization for the detector input layer.

use crate::textprep::{word_tokens, Span};

/// One subword piece, traceable to its source span and parent word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubwordToken {
    /// Surface text of the piece (original casing).
    pub piece: String,
    /// Vocabulary id; 0 is reserved for padding.
    pub id: u32,
    /// Byte span of the piece in the source text.
    pub span: Span,
    /// Index of the parent word among the word-level tokens.
    pub word_index: usize,
}

/// Tokenizer feeding the detector: subword pieces with stable ids.
pub trait DetectorTokenizer: Send + Sync {
    /// Stable vocabulary identifier recorded in dataset metadata.
    fn vocab_id(&self) -> &str;

    /// Number of distinct ids, including the padding id 0.
    fn vocab_size(&self) -> usize;

    /// Maximum sequence length; longer texts are truncated.
    fn max_len(&self) -> usize;

    /// Splits text into at most `max_len` subword tokens.
    fn tokenize(&self, text: &str) -> Vec<SubwordToken>;
}

/// Hash-based subword tokenizer.
///
/// Words are split into consecutive chunks of at most four characters;
/// each chunk's lowercased form is hashed into a fixed vocabulary. No
/// vocabulary files are needed and ids never drift. Chunks align exactly
/// with the word tokenizer in [`crate::textprep`], so `word_index` can be
/// joined against word-level analyses.
#[derive(Debug, Clone)]
pub struct HashSubwordTokenizer {
    id: String,
    vocab_size: usize,
    max_len: usize,
    piece_len: usize,
}

impl HashSubwordTokenizer {
    /// Creates a tokenizer with the given sequence capacity.
    pub fn new(max_len: usize) -> Self {
        Self {
            id: format!("hash-subword-v1-n{max_len}"),
            vocab_size: 8192,
            max_len,
            piece_len: 4,
        }
    }

    fn piece_id(&self, piece: &str) -> u32 {
        let folded = piece.to_lowercase();
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for &b in folded.as_bytes() {
            hash ^= u64::from(b);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
        // Reserve id 0 for padding.
        1 + (hash % (self.vocab_size as u64 - 1)) as u32
    }
}

impl Default for HashSubwordTokenizer {
    fn default() -> Self {
        Self::new(368)
    }
}

impl DetectorTokenizer for HashSubwordTokenizer {
    fn vocab_id(&self) -> &str {
        &self.id
    }

    fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    fn max_len(&self) -> usize {
        self.max_len
    }

    fn tokenize(&self, text: &str) -> Vec<SubwordToken> {
        let mut out = Vec::new();
        'words: for (word_index, (word, span)) in word_tokens(text).into_iter().enumerate() {
            let char_offsets: Vec<usize> = word
                .char_indices()
                .map(|(byte, _)| span.start + byte)
                .chain(std::iter::once(span.end))
                .collect();
            let char_count = char_offsets.len() - 1;
            let mut start_char = 0;
            while start_char < char_count {
                if out.len() == self.max_len {
                    break 'words;
                }
                let end_char = (start_char + self.piece_len).min(char_count);
                let piece_span =
                    Span { start: char_offsets[start_char], end: char_offsets[end_char] };
                let piece = piece_span.slice(text).to_string();
                out.push(SubwordToken {
                    id: self.piece_id(&piece),
                    piece,
                    span: piece_span,
                    word_index,
                });
                start_char = end_char;
            }
        }
        out
    }
}
