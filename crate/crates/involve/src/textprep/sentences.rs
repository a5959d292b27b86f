//! Rule-based sentence segmentation for English academic prose.
//!
//! A sentence ends at `.`, `!`, or `?` (optionally followed by closing
//! quotes or brackets) when the next non-space character starts a new
//! sentence. Common abbreviations and single-letter initials do not end a
//! sentence. Blank lines always end one. Identified by
//! [`SENTENCE_SPLITTER_ID`](super::SENTENCE_SPLITTER_ID) in dataset
//! metadata.

use super::{Sentence, TextPrepError};

/// Abbreviations (lowercased, no trailing dot) that a period may follow
/// without ending the sentence.
static ABBREVIATIONS: &[&str] = &[
    "al", "approx", "ca", "cf", "co", "dept", "dr", "eq", "eqs", "etc", "e.g", "fig", "figs",
    "i.e", "inc", "jr", "ltd", "mr", "mrs", "ms", "no", "nos", "pp", "prof", "ref", "refs",
    "resp", "sec", "secs", "sr", "st", "univ", "vol", "vols", "vs",
];

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '}' | '\u{201d}' | '\u{2019}')
}

fn is_sentence_opener(c: char) -> bool {
    c.is_uppercase()
        || c.is_ascii_digit()
        || matches!(c, '"' | '(' | '[' | '\u{201c}' | '\u{2018}')
}

/// Returns the word immediately preceding byte offset `end` (exclusive),
/// lowercased, or `None` when the period does not follow a letter.
fn word_before(text: &str, end: usize) -> Option<String> {
    let mut start = end;
    while start > 0 {
        let c = text[..start].chars().next_back().unwrap();
        if c.is_alphanumeric() || c == '.' && start < end {
            start -= c.len_utf8();
        } else {
            break;
        }
    }
    if start == end {
        return None;
    }
    let word = &text[start..end];
    if !word.chars().next().is_some_and(|c| c.is_alphabetic()) {
        return None;
    }
    Some(word.to_lowercase())
}

fn is_non_breaking_period(text: &str, period_at: usize) -> bool {
    match word_before(text, period_at) {
        None => false,
        Some(word) => {
            // Single-letter initials: "A. B. Author".
            if word.chars().count() == 1 {
                return true;
            }
            // Trim any leading sub-abbreviation dots picked up by the scan
            // ("e.g" stays intact; "al" in "et al." matches directly).
            let trimmed = word.trim_start_matches('.');
            ABBREVIATIONS.contains(&trimmed)
        }
    }
}

/// Splits normalized text into sentences with sequential indices.
///
/// Returns [`TextPrepError::EmptyDocument`] when the input contains no
/// non-whitespace characters. Sentence texts are trimmed slices of the
/// input; every non-whitespace character belongs to exactly one sentence.
pub fn split_sentences(text: &str) -> Result<Vec<Sentence>, TextPrepError> {
    if text.trim().is_empty() {
        return Err(TextPrepError::EmptyDocument);
    }

    let mut boundaries: Vec<usize> = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let n = chars.len();

    let mut i = 0;
    while i < n {
        let (pos, c) = chars[i];
        match c {
            '.' | '!' | '?' => {
                // Absorb runs like "?!" or "..." and trailing closers.
                let mut j = i + 1;
                while j < n && matches!(chars[j].1, '.' | '!' | '?') {
                    j += 1;
                }
                while j < n && is_closer(chars[j].1) {
                    j += 1;
                }
                // Must be followed by whitespace (or end of text).
                if j < n && !chars[j].1.is_whitespace() {
                    i += 1;
                    continue;
                }
                // Skip the whitespace to find the next sentence opener.
                let mut k = j;
                while k < n && chars[k].1.is_whitespace() {
                    k += 1;
                }
                let run_len = j - i;
                let plain_period = c == '.' && run_len == 1
                    || c == '.' && chars[i + 1..j].iter().all(|&(_, d)| is_closer(d));
                if plain_period && is_non_breaking_period(text, pos) {
                    i = j;
                    continue;
                }
                if k == n {
                    i = j;
                    continue; // end of text closes the final sentence anyway
                }
                // Periods need an upper-case/digit/quote opener; ! and ?
                // break on any following whitespace.
                if plain_period && !is_sentence_opener(chars[k].1) {
                    i = j;
                    continue;
                }
                let boundary = chars[j].0;
                boundaries.push(boundary);
                i = j;
            }
            '\n' => {
                // A blank line is a hard break.
                let mut j = i + 1;
                let mut saw_second_newline = false;
                while j < n && chars[j].1.is_whitespace() {
                    if chars[j].1 == '\n' {
                        saw_second_newline = true;
                    }
                    j += 1;
                }
                if saw_second_newline && j < n {
                    boundaries.push(chars[j].0);
                }
                i = j.max(i + 1);
            }
            _ => i += 1,
        }
    }

    let mut sentences = Vec::new();
    let mut start = 0;
    for &b in boundaries.iter().chain(std::iter::once(&text.len())) {
        let piece = text[start..b].trim();
        if !piece.is_empty() {
            sentences.push(Sentence { text: piece.to_string(), index: sentences.len() });
        }
        start = b;
    }
    Ok(sentences)
}
