//! `involve train` — fit the dual-head detector on a labeled dataset.

use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;
use involve::model::{
    save_checkpoint, train, train_single_head, DetectorConfig, HeadKind, ModelError, TrainOptions,
};

use crate::config::Settings;
use crate::manifest::write_manifest;
use crate::CliError;

/// Which heads receive gradient updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeadChoice {
    Both,
    Regression,
    Token,
}

impl FromStr for HeadChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "both" => Ok(Self::Both),
            "regression" => Ok(Self::Regression),
            "token" => Ok(Self::Token),
            other => Err(format!("unknown head '{other}' (expected both|regression|token)")),
        }
    }
}

#[derive(Args)]
pub struct TrainArgs {
    /// Labeled training dataset (JSON lines).
    #[arg(long)]
    pub dataset: PathBuf,
    /// Checkpoint directory to create.
    #[arg(long)]
    pub out: PathBuf,
    /// Heads to train: both, regression, or token.
    #[arg(long, default_value = "both")]
    pub head: HeadChoice,
    /// Override the number of training epochs.
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Override the learning rate.
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// Override the batch size.
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Override the decoupled weight decay.
    #[arg(long)]
    pub weight_decay: Option<f64>,
    /// Fraction of records held out for validation.
    #[arg(long, default_value_t = 0.1)]
    pub validation_fraction: f64,
    /// Stop after this many epochs without a validation improvement.
    #[arg(long)]
    pub patience: Option<usize>,
    /// Stop once the epoch-mean training loss reaches this value.
    #[arg(long)]
    pub stop_at_train_loss: Option<f64>,
}

fn resolved_config(args: &TrainArgs, settings: &Settings) -> Result<DetectorConfig, CliError> {
    let mut config = settings.detector_config();
    if let Some(epochs) = args.epochs {
        config.epochs = epochs;
    }
    if let Some(lr) = args.learning_rate {
        config.learning_rate = lr;
    }
    if let Some(batch) = args.batch_size {
        config.batch_size = batch;
    }
    if let Some(wd) = args.weight_decay {
        config.weight_decay = wd;
    }
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if !(0.0..1.0).contains(&args.validation_fraction) {
        return Err(CliError::Usage(format!(
            "validation fraction must be in [0, 1), got {}",
            args.validation_fraction
        )));
    }
    Ok(config)
}

pub fn run(args: &TrainArgs, settings: &Settings) -> Result<(), CliError> {
    // All validation happens before the checkpoint directory is touched,
    // so an invalid configuration leaves no partial output behind.
    let config = resolved_config(args, settings)?;
    let dataset = super::load_dataset(&args.dataset)?;
    let options = TrainOptions {
        validation_fraction: args.validation_fraction,
        early_stop_patience: args.patience,
        stop_at_train_loss: args.stop_at_train_loss,
    };

    let outcome = match args.head {
        HeadChoice::Both => train(&dataset, &config, &options),
        HeadChoice::Regression => {
            train_single_head(&dataset, &config, HeadKind::Regression, &options)
        }
        HeadChoice::Token => train_single_head(&dataset, &config, HeadKind::Token, &options),
    };
    let (mut model, state) = outcome.map_err(|e| match e {
        ModelError::InvalidConfig(_) | ModelError::EmptyInput | ModelError::EmptyDataset => {
            CliError::Usage(e.to_string())
        }
        other => CliError::Model(other.to_string()),
    })?;

    save_checkpoint(&args.out, &mut model, &state).map_err(|e| CliError::Io(e.to_string()))?;
    write_manifest(
        &args.out.join("manifest.json"),
        &config,
        settings.seed,
        &[("dataset", args.dataset.display().to_string())],
    )?;

    let final_train = state.curve.last().map(|s| s.train_total);
    if settings.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&state.curve)
                .map_err(|e| CliError::Io(format!("cannot serialize curve: {e}")))?
        );
    } else {
        println!("trained {} epoch(s); checkpoint at {}", state.epochs_run, args.out.display());
        if let Some(loss) = final_train {
            println!("final train loss {loss}");
        }
        match state.best_val_loss {
            Some(v) => println!("best validation loss {v} (epoch {})", state.best_epoch),
            None => println!("no validation split was held out"),
        }
    }
    Ok(())
}
