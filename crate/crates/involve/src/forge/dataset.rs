//! Building, persisting, and re-loading labeled datasets.

use std::fs;
use std::path::{Path, PathBuf};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::client::{generate_pair, DecodingParams, LlmClient, RetryPolicy};
use super::corpus::AbstractDoc;
use super::prompt::{sample_prompt, PromptSpec};
use super::template::TemplateVariant;
use super::ForgeError;
use crate::labeling::{common_token_labels, DetectorTokenizer, TokenLabelVector};
use crate::similarity::{
    fit_normalization, score_pair, ContextualEmbedder, NormalizationConstants,
};
use crate::textprep::{normalize, split_sentences, PreprocConfig, Sentence};

/// Generator model identifier recorded on human-written records.
pub const HUMAN_MODEL_ID: &str = "human";

/// What the records of a dataset represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    /// Involvement varies continuously across records.
    Continuous,
    /// Records carry a binary class: machine-generated vs human-written.
    Polarized,
}

/// One training record: a (prompt, generation) pair with its labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPair {
    /// Dataset-unique identifier; records are ordered by it.
    pub pair_id: String,
    /// The full rendered prompt.
    pub prompt: String,
    /// The generated (or human-written) text.
    pub generated: String,
    /// Involvement label in `[0, 1]`.
    pub y_reg: f64,
    /// Per-token origin labels over `generated`.
    pub y_cls: TokenLabelVector,
    /// Binary class for polarized datasets; absent for continuous ones.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class_label: Option<u8>,
    /// Which model produced `generated` ("human" for verbatim abstracts).
    pub generator_model: String,
    /// How the prompt was sampled.
    pub prompt_spec: PromptSpec,
    /// Text-processing resources active when the record was labeled.
    pub preproc: PreprocConfig,
    /// Must match the normalization constants in the dataset metadata.
    pub normalization_provenance: String,
}

/// Sidecar metadata persisted next to every dataset file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMetadata {
    pub dataset_id: String,
    pub kind: DatasetKind,
    pub seed: u64,
    pub template: TemplateVariant,
    pub generator_model: String,
    pub decoding: DecodingParams,
    pub embedder_id: String,
    pub tokenizer_id: String,
    pub normalization: NormalizationConstants,
    pub preproc: PreprocConfig,
    pub record_count: usize,
    /// Records dropped by the skip-and-log failure policy.
    pub skipped: usize,
    /// Binarization threshold, set by [`polarize_dataset`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub binarization_threshold: Option<f64>,
}

/// A labeled dataset with its provenance metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub metadata: DatasetMetadata,
    pub records: Vec<LabeledPair>,
}

impl Dataset {
    /// Sidecar path for a dataset file: `x.jsonl` → `x.meta.json`.
    pub fn metadata_path(dataset_path: &Path) -> PathBuf {
        dataset_path.with_extension("meta.json")
    }

    /// Writes records as line-delimited JSON plus the metadata sidecar.
    /// Output bytes are a pure function of the dataset contents.
    pub fn write(&self, path: &Path) -> Result<(), ForgeError> {
        let mut out = String::new();
        for record in &self.records {
            out.push_str(&serde_json::to_string(record)?);
            out.push('\n');
        }
        fs::write(path, out)?;
        let mut meta = serde_json::to_string_pretty(&self.metadata)?;
        meta.push('\n');
        fs::write(Self::metadata_path(path), meta)?;
        Ok(())
    }

    /// Reads and validates a dataset written by [`Dataset::write`].
    pub fn read(path: &Path) -> Result<Self, ForgeError> {
        let metadata: DatasetMetadata =
            serde_json::from_str(&fs::read_to_string(Self::metadata_path(path))?)?;
        let raw = fs::read_to_string(path)?;
        let mut records = Vec::new();
        for (line_no, line) in raw.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record: LabeledPair = serde_json::from_str(line).map_err(|e| {
                ForgeError::DatasetInvalid { line: line_no + 1, message: e.to_string() }
            })?;
            validate_record(&record, &metadata, line_no + 1)?;
            records.push(record);
        }
        if records.len() != metadata.record_count {
            return Err(ForgeError::DatasetInvalid {
                line: 0,
                message: format!(
                    "metadata declares {} records but file holds {}",
                    metadata.record_count,
                    records.len()
                ),
            });
        }
        Ok(Self { metadata, records })
    }
}

fn validate_record(
    record: &LabeledPair,
    metadata: &DatasetMetadata,
    line: usize,
) -> Result<(), ForgeError> {
    let fail = |message: String| Err(ForgeError::DatasetInvalid { line, message });
    if !record.y_reg.is_finite() || !(0.0..=1.0).contains(&record.y_reg) {
        return fail(format!("y_reg {} outside [0,1]", record.y_reg));
    }
    if let Err(e) = record.y_cls.validate() {
        return fail(e.to_string());
    }
    if record.generated.trim().is_empty() {
        return fail("generated text is empty".to_string());
    }
    if record.normalization_provenance != metadata.normalization.provenance {
        return fail(format!(
            "record provenance '{}' does not match dataset '{}'",
            record.normalization_provenance, metadata.normalization.provenance
        ));
    }
    Ok(())
}

/// Knobs shared by the dataset builders.
#[derive(Debug, Clone)]
pub struct ForgeOptions {
    /// Prompt template for generated records.
    pub template: TemplateVariant,
    /// Records to build (total, across both classes for polarized sets).
    pub count: usize,
    /// Seed controlling sampling and the mock client.
    pub seed: u64,
    /// Dataset identifier; also the normalization provenance tag.
    pub dataset_id: String,
    /// Retry schedule for generation calls.
    pub retry: RetryPolicy,
}

impl ForgeOptions {
    pub fn new(template: TemplateVariant, count: usize, seed: u64, dataset_id: &str) -> Self {
        Self {
            template,
            count,
            seed,
            dataset_id: dataset_id.to_string(),
            retry: RetryPolicy::default(),
        }
    }
}

struct Draft {
    spec: PromptSpec,
    prompt: String,
    generated: String,
    raw_recall: f64,
}

/// Tracks the skip-and-log failure policy: individual generation failures
/// are logged and skipped, but more than 10% of the planned records
/// failing aborts the build.
struct FailureBudget {
    failed: usize,
    attempted: usize,
    max_failures: usize,
}

impl FailureBudget {
    fn new(planned: usize) -> Self {
        Self { failed: 0, attempted: planned, max_failures: planned / 10 }
    }

    fn record_failure(&mut self, context: &str, err: &ForgeError) -> Result<(), ForgeError> {
        self.failed += 1;
        log::warn!("skipping record ({context}): {err}");
        if self.failed > self.max_failures {
            return Err(ForgeError::TooManyFailures {
                failed: self.failed,
                attempted: self.attempted,
            });
        }
        Ok(())
    }
}

fn split_docs(abstracts: &[AbstractDoc]) -> Result<Vec<Vec<Sentence>>, ForgeError> {
    abstracts
        .iter()
        .map(|doc| split_sentences(&normalize(&doc.text)).map_err(ForgeError::from))
        .collect()
}

/// Builds a continuous-involvement dataset.
///
/// Every record samples a random abstract, draws a Z-sentence prompt,
/// requests a generation, and is labeled with the normalized prompt
/// recall (`y_reg`) and per-token overlap (`y_cls`). Normalization
/// constants are fitted on this batch's raw recalls and recorded in the
/// metadata. Generation failures are skipped and logged; more than 10%
/// failures aborts.
pub fn build_continuous_dataset(
    abstracts: &[AbstractDoc],
    client: &dyn LlmClient,
    embedder: &dyn ContextualEmbedder,
    tokenizer: &dyn DetectorTokenizer,
    options: &ForgeOptions,
) -> Result<Dataset, ForgeError> {
    if options.count == 0 {
        return Err(ForgeError::InvalidCount { count: options.count, reason: "count must be ≥ 1" });
    }
    if abstracts.is_empty() {
        return Err(ForgeError::EmptyCorpus);
    }
    let doc_sentences = split_docs(abstracts)?;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut budget = FailureBudget::new(options.count);
    let mut drafts: Vec<Draft> = Vec::with_capacity(options.count);
    for _ in 0..options.count {
        let doc_idx = rng.gen_range(0..abstracts.len());
        let spec = sample_prompt(
            &doc_sentences[doc_idx],
            &abstracts[doc_idx].id,
            options.template,
            &mut rng,
        )?;
        match generate_pair(&spec.rendered, client, &options.retry) {
            Ok(pair) => {
                let raw = score_pair(&pair.prompt, &pair.generated, embedder)?;
                drafts.push(Draft {
                    spec,
                    prompt: pair.prompt,
                    generated: pair.generated,
                    raw_recall: raw.recall,
                });
            }
            Err(err) => budget.record_failure(&abstracts[doc_idx].id, &err)?,
        }
    }
    let recalls: Vec<f64> = drafts.iter().map(|d| d.raw_recall).collect();
    let constants = fit_normalization(&recalls, options.dataset_id.as_str())?;
    finish_dataset(drafts, constants, DatasetKind::Continuous, client, embedder, tokenizer, options, budget.failed, None)
}

/// Builds a polarized dataset: half machine-generated from
/// minimal-involvement prompts (class 0), half human-written abstracts
/// verbatim (class 1).
///
/// The minimal prompt wraps the document title — or the first sentence
/// when the corpus has no titles — treated as a one-sentence source
/// document (z = 1). Human records take `y_reg = 1.0` by definition and
/// full-overlap token labels. `count` is the total record count and must
/// be even and ≥ 4 (the generated half needs at least two records to fit
/// normalization constants).
pub fn build_polarized_dataset(
    abstracts: &[AbstractDoc],
    client: &dyn LlmClient,
    embedder: &dyn ContextualEmbedder,
    tokenizer: &dyn DetectorTokenizer,
    options: &ForgeOptions,
) -> Result<Dataset, ForgeError> {
    if options.count < 4 || options.count % 2 != 0 {
        return Err(ForgeError::InvalidCount {
            count: options.count,
            reason: "polarized datasets need an even count ≥ 4",
        });
    }
    if abstracts.is_empty() {
        return Err(ForgeError::EmptyCorpus);
    }
    let doc_sentences = split_docs(abstracts)?;
    let per_class = options.count / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut budget = FailureBudget::new(options.count);

    let mut drafts: Vec<Draft> = Vec::with_capacity(per_class);
    for _ in 0..per_class {
        let doc_idx = rng.gen_range(0..abstracts.len());
        let doc = &abstracts[doc_idx];
        let seed_text = match &doc.title {
            Some(title) => title.clone(),
            None => doc_sentences[doc_idx][0].text.clone(),
        };
        let spec = PromptSpec {
            source_doc_id: doc.id.clone(),
            z: 1,
            sentence_indices: vec![0],
            template: options.template,
            rendered: options.template.render(&seed_text),
        };
        match generate_pair(&spec.rendered, client, &options.retry) {
            Ok(pair) => {
                let raw = score_pair(&pair.prompt, &pair.generated, embedder)?;
                drafts.push(Draft {
                    spec,
                    prompt: pair.prompt,
                    generated: pair.generated,
                    raw_recall: raw.recall,
                });
            }
            Err(err) => budget.record_failure(&doc.id, &err)?,
        }
    }
    let recalls: Vec<f64> = drafts.iter().map(|d| d.raw_recall).collect();
    let constants = fit_normalization(&recalls, options.dataset_id.as_str())?;

    let preproc = PreprocConfig::default();
    let mut records = Vec::with_capacity(drafts.len() + per_class);
    for (i, draft) in drafts.into_iter().enumerate() {
        let y_cls = common_token_labels(&draft.prompt, &draft.generated, tokenizer);
        records.push(LabeledPair {
            pair_id: format!("{}-{:06}", options.dataset_id, i),
            prompt: draft.prompt,
            generated: draft.generated,
            y_reg: constants.apply(draft.raw_recall),
            y_cls,
            class_label: Some(0),
            generator_model: client.model_id().to_string(),
            prompt_spec: draft.spec,
            preproc: preproc.clone(),
            normalization_provenance: constants.provenance.clone(),
        });
    }
    let generated_count = records.len();
    for i in 0..per_class {
        let doc_idx = rng.gen_range(0..abstracts.len());
        let doc = &abstracts[doc_idx];
        let text = normalize(&doc.text);
        let n = doc_sentences[doc_idx].len();
        let spec = PromptSpec {
            source_doc_id: doc.id.clone(),
            z: n,
            sentence_indices: (0..n).collect(),
            template: options.template,
            rendered: text.clone(),
        };
        records.push(LabeledPair {
            pair_id: format!("{}-{:06}", options.dataset_id, generated_count + i),
            prompt: text.clone(),
            generated: text.clone(),
            y_reg: 1.0,
            y_cls: common_token_labels(&text, &text, tokenizer),
            class_label: Some(1),
            generator_model: HUMAN_MODEL_ID.to_string(),
            prompt_spec: spec,
            preproc: preproc.clone(),
            normalization_provenance: constants.provenance.clone(),
        });
    }

    Ok(Dataset {
        metadata: DatasetMetadata {
            dataset_id: options.dataset_id.clone(),
            kind: DatasetKind::Polarized,
            seed: options.seed,
            template: options.template,
            generator_model: client.model_id().to_string(),
            decoding: client.request_params().clone(),
            embedder_id: embedder.id().to_string(),
            tokenizer_id: tokenizer.vocab_id().to_string(),
            normalization: constants,
            preproc,
            record_count: records.len(),
            skipped: budget.failed,
            binarization_threshold: None,
        },
        records,
    })
}

#[allow(clippy::too_many_arguments)]
fn finish_dataset(
    drafts: Vec<Draft>,
    constants: NormalizationConstants,
    kind: DatasetKind,
    client: &dyn LlmClient,
    embedder: &dyn ContextualEmbedder,
    tokenizer: &dyn DetectorTokenizer,
    options: &ForgeOptions,
    skipped: usize,
    binarization_threshold: Option<f64>,
) -> Result<Dataset, ForgeError> {
    let preproc = PreprocConfig::default();
    let mut records = Vec::with_capacity(drafts.len());
    for (i, draft) in drafts.into_iter().enumerate() {
        let y_cls = common_token_labels(&draft.prompt, &draft.generated, tokenizer);
        records.push(LabeledPair {
            pair_id: format!("{}-{:06}", options.dataset_id, i),
            prompt: draft.prompt,
            generated: draft.generated,
            y_reg: constants.apply(draft.raw_recall),
            y_cls,
            class_label: None,
            generator_model: client.model_id().to_string(),
            prompt_spec: draft.spec,
            preproc: preproc.clone(),
            normalization_provenance: constants.provenance.clone(),
        });
    }
    Ok(Dataset {
        metadata: DatasetMetadata {
            dataset_id: options.dataset_id.clone(),
            kind,
            seed: options.seed,
            template: options.template,
            generator_model: client.model_id().to_string(),
            decoding: client.request_params().clone(),
            embedder_id: embedder.id().to_string(),
            tokenizer_id: tokenizer.vocab_id().to_string(),
            normalization: constants,
            preproc,
            record_count: records.len(),
            skipped,
            binarization_threshold,
        },
        records,
    })
}

/// Re-labels a dataset with binary classes at the given threshold.
///
/// Involvement strictly above `bst` becomes class 1 (human contribution);
/// equal or below becomes class 0 (machine generation). Fails when either
/// side would be empty.
pub fn polarize_dataset(dataset: &Dataset, bst: f64) -> Result<Dataset, ForgeError> {
    if !bst.is_finite() || bst <= 0.0 || bst >= 1.0 {
        return Err(ForgeError::InvalidThreshold(bst));
    }
    let mut records = dataset.records.clone();
    for record in &mut records {
        record.class_label = Some(u8::from(record.y_reg > bst));
    }
    let positives = records.iter().filter(|r| r.class_label == Some(1)).count();
    if positives == 0 || positives == records.len() {
        return Err(ForgeError::PartitionDegenerate { threshold: bst });
    }
    let mut metadata = dataset.metadata.clone();
    metadata.kind = DatasetKind::Polarized;
    metadata.binarization_threshold = Some(bst);
    Ok(Dataset { metadata, records })
}
