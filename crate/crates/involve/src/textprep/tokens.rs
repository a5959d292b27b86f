//! Word-level tokenization and per-token analysis.
//!
//! A word token is a maximal run of alphanumeric characters, allowing
//! word-internal apostrophes (`don't`). Every other non-whitespace
//! character becomes a single punctuation token. Spans are byte offsets
//! into the input, so callers can recover the exact surface text.

use super::{is_stop_word, lemmatize, AnalyzedToken, Span};

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Splits text into word and punctuation tokens with byte spans.
pub fn word_tokens(text: &str) -> Vec<(String, Span)> {
    let mut tokens = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let n = chars.len();
    let mut i = 0;
    while i < n {
        let (start, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if is_word_char(c) {
            let mut j = i + 1;
            while j < n {
                let (_, d) = chars[j];
                if is_word_char(d) {
                    j += 1;
                } else if is_apostrophe(d)
                    && j + 1 < n
                    && is_word_char(chars[j + 1].1)
                {
                    j += 2;
                } else {
                    break;
                }
            }
            let end = if j < n { chars[j].0 } else { text.len() };
            tokens.push((text[start..end].to_string(), Span { start, end }));
            i = j;
        } else {
            let end = start + c.len_utf8();
            tokens.push((c.to_string(), Span { start, end }));
            i += 1;
        }
    }
    tokens
}

/// Lowercases a word and folds typographic apostrophes for lemma and
/// stop-word lookups.
fn fold_for_lookup(word: &str) -> String {
    word.to_lowercase().replace('\u{2019}', "'")
}

/// Analyzes a single word outside of any sentence context.
pub fn analyze_word(word: &str, span: Span) -> AnalyzedToken {
    let folded = fold_for_lookup(word);
    let is_punct = !word.chars().any(|c| c.is_alphanumeric());
    let lemma = if is_punct { word.to_string() } else { lemmatize(&folded) };
    AnalyzedToken {
        surface: word.to_string(),
        lemma,
        is_stop: is_stop_word(word),
        is_punct,
        span,
    }
}

/// Tokenizes and analyzes text in one pass: surface, lemma, stop-word and
/// punctuation flags, byte span.
pub fn analyze_tokens(text: &str) -> Vec<AnalyzedToken> {
    word_tokens(text)
        .into_iter()
        .map(|(surface, span)| analyze_word(&surface, span))
        .collect()
}
