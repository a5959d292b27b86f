//! Random prompt construction from source abstracts.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ForgeError, TemplateVariant};
use crate::textprep::Sentence;

/// A fully specified prompt: which sentences of which document were
/// selected, and the rendered instruction text sent to the generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptSpec {
    /// Identifier of the source document.
    pub source_doc_id: String,
    /// Number of sentences selected.
    pub z: usize,
    /// Selected sentence indices, ascending.
    pub sentence_indices: Vec<usize>,
    /// Template wrapped around the selected sentences.
    pub template: TemplateVariant,
    /// The final prompt string.
    pub rendered: String,
}

/// Samples a prompt from an abstract.
///
/// Draws the sentence count `z` uniformly from `1..=n`, then `z` distinct
/// sentence indices without replacement. Selected sentences keep their
/// original order and are joined with single spaces before template
/// rendering.
pub fn sample_prompt(
    abstract_sentences: &[Sentence],
    source_doc_id: &str,
    template: TemplateVariant,
    rng: &mut impl Rng,
) -> Result<PromptSpec, ForgeError> {
    let n = abstract_sentences.len();
    if n == 0 {
        return Err(ForgeError::EmptyDocument);
    }
    let z = rng.gen_range(1..=n);
    let mut indices = rand::seq::index::sample(rng, n, z).into_vec();
    indices.sort_unstable();
    let content = indices
        .iter()
        .map(|&i| abstract_sentences[i].text.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    Ok(PromptSpec {
        source_doc_id: source_doc_id.to_string(),
        z,
        sentence_indices: indices,
        template,
        rendered: template.render(&content),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textprep::split_sentences;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TEXT: &str = "Alpha methods dominate. Beta methods follow closely. \
                        Gamma methods trail behind. Delta methods surprise everyone. \
                        Epsilon methods close the gap.";

    fn sentences() -> Vec<Sentence> {
        split_sentences(TEXT).unwrap()
    }

    #[test]
    fn selected_sentences_appear_verbatim_in_order() {
        let sents = sentences();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let spec =
                sample_prompt(&sents, "doc-0", TemplateVariant::Direct, &mut rng).unwrap();
            assert_eq!(spec.sentence_indices.len(), spec.z);
            assert!(spec.z >= 1 && spec.z <= sents.len());
            let mut sorted = spec.sentence_indices.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted, spec.sentence_indices, "indices distinct and ascending");
            for &i in &spec.sentence_indices {
                assert!(spec.rendered.contains(&sents[i].text), "sentence {i} missing");
            }
            let positions: Vec<usize> = spec
                .sentence_indices
                .iter()
                .map(|&i| spec.rendered.find(&sents[i].text).unwrap())
                .collect();
            assert!(positions.windows(2).all(|w| w[0] < w[1]), "original order kept");
        }
    }

    #[test]
    fn single_sentence_document_is_forced() {
        let sents = split_sentences("Only one sentence here.").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec = sample_prompt(&sents, "doc-1", TemplateVariant::Student, &mut rng).unwrap();
        assert_eq!(spec.z, 1);
        assert_eq!(spec.sentence_indices, vec![0]);
        assert!(spec.rendered.contains("Only one sentence here."));
    }

    #[test]
    fn empty_document_is_an_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(matches!(
            sample_prompt(&[], "doc-2", TemplateVariant::Direct, &mut rng),
            Err(ForgeError::EmptyDocument)
        ));
    }

    #[test]
    fn fixed_seed_reproduces_the_spec() {
        let sents = sentences();
        let a = sample_prompt(
            &sents,
            "doc-0",
            TemplateVariant::Dual,
            &mut ChaCha8Rng::seed_from_u64(99),
        )
        .unwrap();
        let b = sample_prompt(
            &sents,
            "doc-0",
            TemplateVariant::Dual,
            &mut ChaCha8Rng::seed_from_u64(99),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn z_covers_the_full_range() {
        let sents = sentences();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..200 {
            let spec =
                sample_prompt(&sents, "doc-0", TemplateVariant::Direct, &mut rng).unwrap();
            seen.insert(spec.z);
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![1, 2, 3, 4, 5]);
    }
}
