//! Prompt template variants.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The four prompt phrasings used to build datasets.
///
/// Each template wraps the provided text (selected sentences or a title)
/// in a fixed instruction. `X` marks where the text is inserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemplateVariant {
    /// "Write an abstract on the basis of X"
    Direct,
    /// Completion framed as a student finishing a draft.
    Student,
    /// Revision followed by abstract writing.
    Dual,
    /// Summarize related abstracts into a new one.
    Summarization,
}

impl TemplateVariant {
    /// All variants, in a stable order.
    pub const ALL: [TemplateVariant; 4] =
        [Self::Direct, Self::Student, Self::Dual, Self::Summarization];

    /// The template text with `X` marking the insertion point.
    pub fn template_text(self) -> &'static str {
        match self {
            Self::Direct => "Write an abstract on the basis of X",
            Self::Student => {
                "I am a college student and have already finished part of an abstract \
                 about X. Please complete the abstract."
            }
            Self::Dual => "Revise X and then write an abstract based on the revised text.",
            Self::Summarization => {
                "Find five abstracts about X and write a new academic abstract."
            }
        }
    }

    /// Renders the template around the provided text.
    pub fn render(self, content: &str) -> String {
        self.template_text().replacen('X', content, 1)
    }

    /// Lowercase name used on the command line and in metadata.
    pub fn name(self) -> &'static str {
        match self {
            Self::Direct => "direct",
            Self::Student => "student",
            Self::Dual => "dual",
            Self::Summarization => "summarization",
        }
    }
}

impl fmt::Display for TemplateVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TemplateVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "direct" => Ok(Self::Direct),
            "student" => Ok(Self::Student),
            "dual" => Ok(Self::Dual),
            "summarization" => Ok(Self::Summarization),
            other => Err(format!(
                "unknown template '{other}' (expected direct|student|dual|summarization)"
            )),
        }
    }
}
