//! `involve evaluate` — run a checkpoint against a labeled dataset.

use std::path::PathBuf;

use clap::Args;
use involve::eval::{evaluate_model, BSTConfig, EvalError};

use crate::config::Settings;
use crate::manifest::write_manifest;
use crate::CliError;

#[derive(Args)]
pub struct EvaluateArgs {
    /// Labeled dataset to evaluate on (JSON lines).
    #[arg(long)]
    pub dataset: PathBuf,
    /// Checkpoint directory produced by `involve train`.
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Directory for report.json, report.md, scatter.csv, and the
    /// manifest; omit to only print the report.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated binarization thresholds for the sweep.
    #[arg(long)]
    pub sweep: Option<String>,
}

fn parse_sweep(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("invalid sweep threshold '{s}'")))
        })
        .collect()
}

/// Default sweep: 0.1 through 0.9 in steps of 0.1.
fn default_sweep() -> Vec<f64> {
    (1..=9).map(|i| f64::from(i) / 10.0).collect()
}

fn resolve_thresholds(args: &EvaluateArgs, settings: &Settings) -> Result<Vec<f64>, CliError> {
    let thresholds = match &args.sweep {
        Some(text) => parse_sweep(text)?,
        None => settings.thresholds.clone().unwrap_or_else(default_sweep),
    };
    if thresholds.is_empty() {
        return Err(CliError::Usage("the threshold sweep is empty".into()));
    }
    for &t in &thresholds {
        BSTConfig::new(t).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(thresholds)
}

pub fn run(args: &EvaluateArgs, settings: &Settings) -> Result<(), CliError> {
    let thresholds = resolve_thresholds(args, settings)?;
    let dataset = super::load_dataset(&args.dataset)?;
    let mut model = super::load_model(&args.checkpoint)?;

    let (report, scatter) = evaluate_model(&mut model, &dataset, &thresholds).map_err(|e| {
        match e {
            EvalError::InvalidThreshold(_) | EvalError::EmptyInput => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Model(other.to_string()),
        }
    })?;

    if let Some(out_dir) = &args.out {
        let report_json = serde_json::to_string_pretty(&report)
            .map_err(|e| CliError::Io(format!("cannot serialize report: {e}")))?;
        super::write_output(&out_dir.join("report.json"), &report_json)?;
        super::write_output(&out_dir.join("report.md"), &report.to_markdown())?;
        super::write_output(
            &out_dir.join("scatter.csv"),
            &involve::eval::scatter_csv(&scatter),
        )?;
        write_manifest(
            &out_dir.join("manifest.json"),
            &thresholds,
            settings.seed,
            &[
                ("dataset", args.dataset.display().to_string()),
                ("checkpoint", args.checkpoint.display().to_string()),
            ],
        )?;
    }

    if settings.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::Io(format!("cannot serialize report: {e}")))?
        );
    } else {
        print!("{}", report.to_markdown());
    }
    Ok(())
}
