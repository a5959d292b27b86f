//! Uniform scoring interface over detectors: trained models, oracles, and
//! trivial baselines all expose a human-likeness score per text.

use std::collections::BTreeMap;

use crate::forge::Dataset;
use crate::model::{BinaryClassifier, DualHeadModel};

use super::EvalError;

/// A detector under evaluation: deterministic, finite scores in `[0, 1]`,
/// higher meaning more human contribution.
pub trait DetectorAdapter {
    fn name(&self) -> &str;
    fn score(&mut self, text: &str) -> Result<f64, EvalError>;
}

/// Scores with the regression head of a trained dual-head model.
pub struct ModelAdapter {
    name: String,
    model: DualHeadModel,
}

impl ModelAdapter {
    pub fn new(model: DualHeadModel) -> Self {
        Self { name: format!("dual-head:{}", model.config.encoder), model }
    }

    pub fn into_inner(self) -> DualHeadModel {
        self.model
    }
}

impl DetectorAdapter for ModelAdapter {
    fn name(&self) -> &str {
        &self.name
    }

    fn score(&mut self, text: &str) -> Result<f64, EvalError> {
        Ok(self.model.predict_one(text)?.involvement)
    }
}

impl DetectorAdapter for BinaryClassifier {
    fn name(&self) -> &str {
        "binary-classifier"
    }

    fn score(&mut self, text: &str) -> Result<f64, EvalError> {
        Ok(BinaryClassifier::score(self, text)?)
    }
}

/// Returns the dataset's own involvement label for each known text: the
/// upper bound every real detector is compared against.
pub struct LabelOracleAdapter {
    by_text: BTreeMap<String, f64>,
}

impl LabelOracleAdapter {
    pub fn from_dataset(dataset: &Dataset) -> Self {
        let by_text =
            dataset.records.iter().map(|r| (r.generated.clone(), r.y_reg)).collect();
        Self { by_text }
    }
}

impl DetectorAdapter for LabelOracleAdapter {
    fn name(&self) -> &str {
        "label-oracle"
    }

    fn score(&mut self, text: &str) -> Result<f64, EvalError> {
        self.by_text
            .get(text)
            .copied()
            .ok_or_else(|| EvalError::UnknownText(text.chars().take(40).collect()))
    }
}

/// Ignores the text and always answers the same score.
pub struct ConstantAdapter {
    pub value: f64,
}

impl DetectorAdapter for ConstantAdapter {
    fn name(&self) -> &str {
        "constant"
    }

    fn score(&mut self, _text: &str) -> Result<f64, EvalError> {
        Ok(self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge::{
        build_continuous_dataset, AbstractDoc, ForgeOptions, MockLlmClient, TemplateVariant,
    };
    use crate::labeling::HashSubwordTokenizer;
    use crate::similarity::NgramHashEmbedder;

    fn tiny_dataset() -> Dataset {
        let docs = vec![AbstractDoc {
            id: "d0".into(),
            title: None,
            text: "Metrics require careful definitions. Baselines anchor the comparison. \
                   Results follow from both. Reporting closes the loop."
                .into(),
        }];
        let client = MockLlmClient::new(2);
        let embedder = NgramHashEmbedder::default();
        let tokenizer = HashSubwordTokenizer::new(368);
        let options = ForgeOptions::new(TemplateVariant::Direct, 5, 2, "adapter-test");
        build_continuous_dataset(&docs, &client, &embedder, &tokenizer, &options).unwrap()
    }

    #[test]
    fn oracle_returns_the_recorded_labels() {
        let dataset = tiny_dataset();
        let mut oracle = LabelOracleAdapter::from_dataset(&dataset);
        for record in &dataset.records {
            assert_eq!(oracle.score(&record.generated).unwrap(), record.y_reg);
        }
    }

    #[test]
    fn oracle_rejects_unknown_texts() {
        let dataset = tiny_dataset();
        let mut oracle = LabelOracleAdapter::from_dataset(&dataset);
        assert!(matches!(
            oracle.score("a text that was never in the dataset"),
            Err(EvalError::UnknownText(_))
        ));
    }

    #[test]
    fn constant_adapter_is_constant() {
        let mut adapter = ConstantAdapter { value: 0.42 };
        assert_eq!(adapter.score("anything").unwrap(), 0.42);
        assert_eq!(adapter.score("anything else").unwrap(), 0.42);
    }
}
