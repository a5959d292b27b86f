//! `involve score` — overlap scores for one prompt/generation pair.

use std::path::PathBuf;

use clap::Args;
use involve::similarity::{
    normalize_scores, score_pair, NgramHashEmbedder, NormalizationConstants, SimilarityError,
};
use serde::Serialize;

use crate::config::Settings;
use crate::CliError;

#[derive(Args)]
pub struct ScoreArgs {
    /// File containing the prompt text.
    pub prompt: PathBuf,
    /// File containing the generated text.
    pub generated: PathBuf,
    /// Lower normalization constant (defaults to the fixed fallback).
    #[arg(long)]
    pub norm_min: Option<f64>,
    /// Upper normalization constant (defaults to the fixed fallback).
    #[arg(long)]
    pub norm_max: Option<f64>,
}

#[derive(Serialize)]
struct ScoreOutput {
    raw_recall: f64,
    raw_precision: f64,
    raw_f1: f64,
    involvement: f64,
    utilization: f64,
    similarity: f64,
    normalization: NormalizationConstants,
}

pub fn run(args: &ScoreArgs, settings: &Settings) -> Result<(), CliError> {
    let prompt = super::read_input(&args.prompt)?;
    let generated = super::read_input(&args.generated)?;
    let constants = match (args.norm_min, args.norm_max) {
        (None, None) => NormalizationConstants::fallback(),
        (min, max) => {
            let fallback = NormalizationConstants::fallback();
            let score_min = min.unwrap_or(fallback.score_min);
            let score_max = max.unwrap_or(fallback.score_max);
            if !(score_min.is_finite() && score_max.is_finite() && score_min < score_max) {
                return Err(CliError::Usage(format!(
                    "normalization bounds must satisfy min < max, got {score_min} and {score_max}"
                )));
            }
            NormalizationConstants { score_min, score_max, provenance: "cli-flags".into() }
        }
    };
    let embedder = NgramHashEmbedder::default();
    let raw = score_pair(&prompt, &generated, &embedder).map_err(|e| match e {
        SimilarityError::Embedder(inner) => CliError::Model(format!("embedder failure: {inner}")),
        other => CliError::Usage(other.to_string()),
    })?;
    let scores = normalize_scores(raw, &constants);
    let output = ScoreOutput {
        raw_recall: raw.recall,
        raw_precision: raw.precision,
        raw_f1: raw.f1,
        involvement: scores.involvement,
        utilization: scores.utilization,
        similarity: scores.similarity,
        normalization: constants.clone(),
    };
    if settings.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&output)
                .map_err(|e| CliError::Io(format!("cannot serialize output: {e}")))?
        );
    } else {
        println!("raw recall      {}", output.raw_recall);
        println!("raw precision   {}", output.raw_precision);
        println!("raw F1          {}", output.raw_f1);
        println!("involvement     {}   (normalized recall)", output.involvement);
        println!("utilization     {}   (normalized precision)", output.utilization);
        println!("similarity      {}   (normalized F1)", output.similarity);
        println!(
            "normalization   {} [{}, {}]",
            constants.provenance, constants.score_min, constants.score_max
        );
    }
    Ok(())
}
