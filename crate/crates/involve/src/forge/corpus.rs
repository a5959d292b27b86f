//! Source-abstract ingestion.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ForgeError;

/// One source abstract.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractDoc {
    /// Stable document identifier.
    pub id: String,
    /// Title, when the corpus provides one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    /// Full abstract text.
    pub text: String,
}

#[derive(Deserialize)]
struct RawDoc {
    id: Option<String>,
    title: Option<String>,
    text: String,
}

/// Loads a corpus of abstracts.
///
/// `.jsonl`/`.json` files hold one JSON object per line with a required
/// `text` field and optional `id` and `title`; any other extension is
/// read as plain text with one abstract per non-empty line. Missing ids
/// are assigned positionally.
pub fn load_corpus(path: &Path) -> Result<Vec<AbstractDoc>, ForgeError> {
    let raw = fs::read_to_string(path)?;
    let jsonl = matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("jsonl") | Some("json") | Some("ndjson")
    );
    let mut docs = Vec::new();
    for (line_no, line) in raw.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let doc = if jsonl {
            let parsed: RawDoc = serde_json::from_str(line).map_err(|source| {
                ForgeError::CorpusParse { line: line_no + 1, message: source.to_string() }
            })?;
            AbstractDoc {
                id: parsed.id.unwrap_or_else(|| format!("doc-{:04}", docs.len())),
                title: parsed.title,
                text: parsed.text,
            }
        } else {
            AbstractDoc {
                id: format!("doc-{:04}", docs.len()),
                title: None,
                text: line.to_string(),
            }
        };
        if doc.text.trim().is_empty() {
            return Err(ForgeError::CorpusParse {
                line: line_no + 1,
                message: "abstract text is empty".to_string(),
            });
        }
        docs.push(doc);
    }
    if docs.is_empty() {
        return Err(ForgeError::EmptyCorpus);
    }
    Ok(docs)
}
