//! `involve generate` — build a labeled dataset from a corpus of abstracts.

use std::path::PathBuf;

use clap::Args;
use involve::forge::{
    build_continuous_dataset, build_polarized_dataset, load_corpus, ForgeError, ForgeOptions,
    HttpLlmClient, LlmClient, MockLlmClient, TemplateVariant,
};
use involve::labeling::HashSubwordTokenizer;
use involve::similarity::NgramHashEmbedder;

use crate::config::Settings;
use crate::manifest::write_manifest;
use crate::CliError;

#[derive(Args)]
pub struct GenerateArgs {
    /// Corpus of source abstracts (JSON lines with `id` and `text`).
    #[arg(long)]
    pub corpus: PathBuf,
    /// Output dataset path (JSON lines).
    #[arg(long)]
    pub out: PathBuf,
    /// Number of records to build.
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Prompt template: direct, student, dual, or summarization.
    #[arg(long, default_value = "direct")]
    pub template: TemplateVariant,
    /// Use the deterministic offline generator instead of a live endpoint.
    #[arg(long)]
    pub mock: bool,
    /// Chat-completions endpoint URL for live generation.
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Model identifier sent to the endpoint.
    #[arg(long)]
    pub model: Option<String>,
    /// Environment variable holding the API key (never stored).
    #[arg(long, default_value = "LLM_API_KEY")]
    pub api_key_env: String,
    /// Build a two-class dataset (generated vs. human) instead of a
    /// continuous-involvement one.
    #[arg(long)]
    pub polarized: bool,
}

fn build_client(args: &GenerateArgs, seed: u64) -> Result<Box<dyn LlmClient>, CliError> {
    if args.mock {
        if args.endpoint.is_some() || args.model.is_some() {
            return Err(CliError::Usage(
                "--mock cannot be combined with --endpoint/--model".into(),
            ));
        }
        return Ok(Box::new(MockLlmClient::new(seed)));
    }
    match (&args.endpoint, &args.model) {
        (Some(endpoint), Some(model)) => Ok(Box::new(
            HttpLlmClient::new(model.clone(), endpoint.clone())
                .with_api_key_env(args.api_key_env.clone()),
        )),
        _ => Err(CliError::Usage(
            "pass --mock, or both --endpoint and --model for live generation".into(),
        )),
    }
}

pub fn run(args: &GenerateArgs, settings: &Settings) -> Result<(), CliError> {
    // Validate everything before any side effect.
    let client = build_client(args, settings.seed)?;
    if !args.corpus.exists() {
        return Err(CliError::Usage(format!("corpus not found: {}", args.corpus.display())));
    }
    let abstracts = load_corpus(&args.corpus).map_err(|e| CliError::Usage(e.to_string()))?;

    let dataset_id = args
        .out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    let options = ForgeOptions::new(args.template, args.count, settings.seed, &dataset_id);
    let embedder = NgramHashEmbedder::default();
    let tokenizer = HashSubwordTokenizer::default();

    let build = if args.polarized {
        build_polarized_dataset(&abstracts, client.as_ref(), &embedder, &tokenizer, &options)
    } else {
        build_continuous_dataset(&abstracts, client.as_ref(), &embedder, &tokenizer, &options)
    };
    let dataset = build.map_err(|e| match e {
        ForgeError::InvalidCount { .. } | ForgeError::EmptyCorpus => {
            CliError::Usage(e.to_string())
        }
        ForgeError::Io(inner) => CliError::Io(inner.to_string()),
        other => CliError::Model(other.to_string()),
    })?;

    dataset.write(&args.out).map_err(|e| CliError::Io(e.to_string()))?;
    let manifest_path = args.out.with_extension("manifest.json");
    write_manifest(
        &manifest_path,
        &dataset.metadata,
        settings.seed,
        &[("template", args.template.name().to_string())],
    )?;

    if settings.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&dataset.metadata)
                .map_err(|e| CliError::Io(format!("cannot serialize metadata: {e}")))?
        );
    } else {
        println!(
            "wrote {} records ({:?}) to {}",
            dataset.metadata.record_count,
            dataset.metadata.kind,
            args.out.display()
        );
        println!("manifest: {}", manifest_path.display());
    }
    Ok(())
}
