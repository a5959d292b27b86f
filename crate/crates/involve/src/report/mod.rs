//! Document-level analysis artifacts: which tokens a trained detector
//! attributes to the human prompt, plus a standalone HTML rendering with
//! two-tone highlighting and a verdict header.
//!
//! Rendering is a pure function of the analysis result — no timestamps,
//! no environment lookups — so reports are byte-identical across runs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::{binarize, BSTConfig, Verdict};
use crate::model::{DualHeadModel, ModelError};
use crate::textprep::Span;

/// Errors from analysis construction and validation.
#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid analysis: {0}")]
    Invalid(String),
}

/// One analyzed token: where it sits in the document and whether the
/// detector attributes it to the human prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenAttribution {
    pub span: Span,
    pub piece: String,
    pub human: bool,
}

/// Everything the analyze command reports for one document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisResult {
    pub document: String,
    /// Clamped scalar involvement estimate in `[0, 1]`.
    pub involvement: f64,
    /// Threshold the verdict was taken at.
    pub threshold: f64,
    pub verdict: Verdict,
    /// In document order; spans are non-overlapping byte ranges.
    pub attributions: Vec<TokenAttribution>,
    /// Architecture identifier of the scoring model.
    pub model_id: String,
    /// Where the weights came from (checkpoint path or "in-memory").
    pub checkpoint: String,
}

impl AnalysisResult {
    /// Checks the structural invariants: spans in order, non-overlapping,
    /// inside the document, and a verdict consistent with the threshold.
    pub fn validate(&self) -> Result<(), ReportError> {
        let mut cursor = 0usize;
        for attribution in &self.attributions {
            let span = attribution.span;
            if span.start < cursor || span.end < span.start || span.end > self.document.len() {
                return Err(ReportError::Invalid(format!(
                    "span {}..{} overlaps a predecessor or leaves the document",
                    span.start, span.end
                )));
            }
            if !self.document.is_char_boundary(span.start)
                || !self.document.is_char_boundary(span.end)
            {
                return Err(ReportError::Invalid(format!(
                    "span {}..{} splits a character",
                    span.start, span.end
                )));
            }
            cursor = span.end;
        }
        let bst = BSTConfig::new(self.threshold)
            .map_err(|e| ReportError::Invalid(e.to_string()))?;
        if binarize(self.involvement, bst) != self.verdict {
            return Err(ReportError::Invalid(format!(
                "verdict {:?} contradicts estimate {} at threshold {}",
                self.verdict, self.involvement, self.threshold
            )));
        }
        Ok(())
    }
}

/// Runs the detector on a document and assembles the analysis.
pub fn analyze_document(
    model: &mut DualHeadModel,
    document: &str,
    bst: BSTConfig,
    checkpoint: &str,
) -> Result<AnalysisResult, ReportError> {
    let prediction = model.predict_one(document)?;
    let subwords = model.tokenizer().tokenize(document);
    let labels = prediction.token_labels.labels();
    let attributions = subwords
        .iter()
        .enumerate()
        .map(|(i, sw)| TokenAttribution {
            span: sw.span,
            piece: sw.piece.clone(),
            human: labels[i] == 1,
        })
        .collect();
    let result = AnalysisResult {
        document: document.to_string(),
        involvement: prediction.involvement,
        threshold: bst.threshold(),
        verdict: binarize(prediction.involvement, bst),
        attributions,
        model_id: model.config.encoder.clone(),
        checkpoint: checkpoint.to_string(),
    };
    result.validate()?;
    Ok(result)
}

/// Escapes text for safe interpolation into HTML content and attributes.
fn escape_html(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

const STYLE: &str = "\
body { font-family: Georgia, serif; max-width: 46rem; margin: 2rem auto; line-height: 1.7; }\n\
header { border-bottom: 2px solid #444; padding-bottom: 0.8rem; margin-bottom: 1.2rem; }\n\
header h1 { font-size: 1.2rem; margin: 0 0 0.4rem 0; }\n\
.score { font-size: 1.6rem; font-weight: bold; }\n\
.verdict-human { color: #1a6e3c; }\n\
.verdict-ai { color: #8a4513; }\n\
.meta { color: #666; font-size: 0.85rem; }\n\
.tok-human { background: #cdeccd; border-radius: 2px; }\n\
.tok-ai { background: #f2d9c4; border-radius: 2px; }\n\
.legend span { padding: 0 0.4rem; margin-right: 0.6rem; }\n";

/// Renders a standalone HTML page: a header block with the involvement
/// score and threshold verdict, then the document with every analyzed
/// token highlighted — one tone for human-attributed tokens, another for
/// machine-attributed ones. All text is escaped.
pub fn render_html(analysis: &AnalysisResult) -> String {
    let verdict_class = match analysis.verdict {
        Verdict::HumanContribution => "verdict-human",
        Verdict::AiGeneration => "verdict-ai",
    };
    let mut body = String::new();
    let mut cursor = 0usize;
    for attribution in &analysis.attributions {
        body.push_str(&escape_html(&analysis.document[cursor..attribution.span.start]));
        let class = if attribution.human { "tok-human" } else { "tok-ai" };
        body.push_str(&format!(
            "<span class=\"{class}\">{}</span>",
            escape_html(attribution.span.slice(&analysis.document))
        ));
        cursor = attribution.span.end;
    }
    body.push_str(&escape_html(&analysis.document[cursor..]));

    format!(
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n\
         <title>Involvement analysis</title>\n<style>\n{STYLE}</style>\n</head>\n<body>\n\
         <header>\n<h1>Human-involvement analysis</h1>\n\
         <div class=\"score {verdict_class}\">{:.4} &mdash; {}</div>\n\
         <div class=\"meta\">threshold {:.2} &middot; model {} &middot; checkpoint {}</div>\n\
         <div class=\"legend meta\"><span class=\"tok-human\">human-attributed</span>\
         <span class=\"tok-ai\">machine-attributed</span></div>\n</header>\n\
         <main><p>{body}</p></main>\n</body>\n</html>\n",
        analysis.involvement,
        escape_html(analysis.verdict.label()),
        analysis.threshold,
        escape_html(&analysis.model_id),
        escape_html(&analysis.checkpoint),
    )
}
