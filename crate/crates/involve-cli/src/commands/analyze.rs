//! `involve analyze` — per-token attribution report for one document.

use std::path::PathBuf;

use clap::Args;
use involve::eval::BSTConfig;
use involve::report::{analyze_document, render_html, ReportError};

use crate::config::Settings;
use crate::CliError;

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Document to analyze (plain text).
    #[arg(long)]
    pub document: PathBuf,
    /// Checkpoint directory produced by `involve train`.
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Binarization threshold for the verdict.
    #[arg(long)]
    pub bst: Option<f64>,
    /// HTML output path; defaults to the document path with a
    /// `.report.html` extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &AnalyzeArgs, settings: &Settings) -> Result<(), CliError> {
    let threshold = args.bst.or(settings.bst).unwrap_or(0.5);
    let bst = BSTConfig::new(threshold).map_err(|e| CliError::Usage(e.to_string()))?;
    let document = super::read_input(&args.document)?;
    let mut model = super::load_model(&args.checkpoint)?;

    let checkpoint_id = args.checkpoint.display().to_string();
    let analysis = analyze_document(&mut model, &document, bst, &checkpoint_id).map_err(|e| {
        match e {
            ReportError::Model(inner) => CliError::Model(inner.to_string()),
            ReportError::Invalid(message) => CliError::Model(message),
        }
    })?;
    let html = render_html(&analysis);

    let out_path = args
        .out
        .clone()
        .unwrap_or_else(|| args.document.with_extension("report.html"));
    super::write_output(&out_path, &html)?;

    if settings.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&analysis)
                .map_err(|e| CliError::Io(format!("cannot serialize analysis: {e}")))?
        );
    } else {
        println!("involvement {}", analysis.involvement);
        println!("verdict     {} (threshold {})", analysis.verdict.label(), analysis.threshold);
        println!("report      {}", out_path.display());
    }
    Ok(())
}
