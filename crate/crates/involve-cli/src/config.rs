//! Layered settings: defaults ← TOML file ← command-line flags.

use std::path::Path;

use involve::model::DetectorConfig;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Optional overrides for the detector configuration. Anything left out
/// keeps the desk-scale default.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorOverrides {
    pub encoder: Option<String>,
    pub max_len: Option<usize>,
    pub d_model: Option<usize>,
    pub n_layers: Option<usize>,
    pub n_heads: Option<usize>,
    pub ffn_dim: Option<usize>,
    pub vocab_size: Option<usize>,
    pub learning_rate: Option<f64>,
    pub batch_size: Option<usize>,
    pub epochs: Option<usize>,
    pub weight_decay: Option<f64>,
    pub class_weights: Option<[f64; 2]>,
    pub include_padding_in_ce: Option<bool>,
}

impl DetectorOverrides {
    pub fn apply(&self, mut base: DetectorConfig) -> DetectorConfig {
        macro_rules! take {
            ($field:ident) => {
                if let Some(v) = &self.$field {
                    base.$field = v.clone();
                }
            };
        }
        take!(encoder);
        take!(max_len);
        take!(d_model);
        take!(n_layers);
        take!(n_heads);
        take!(ffn_dim);
        take!(vocab_size);
        take!(learning_rate);
        take!(batch_size);
        take!(epochs);
        take!(weight_decay);
        take!(class_weights);
        take!(include_padding_in_ce);
        base
    }
}

/// Shape of the TOML settings file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    /// Default binarization threshold for analyze.
    pub bst: Option<f64>,
    /// Default sweep thresholds for evaluate.
    pub thresholds: Option<Vec<f64>>,
    #[serde(default)]
    pub detector: DetectorOverrides,
}

/// Resolved settings shared by every command.
#[derive(Debug, Clone)]
pub struct Settings {
    pub seed: u64,
    pub json: bool,
    pub bst: Option<f64>,
    pub thresholds: Option<Vec<f64>>,
    pub detector_overrides: DetectorOverrides,
}

impl Settings {
    pub fn resolve(
        config_path: Option<&Path>,
        seed_flag: Option<u64>,
        json: bool,
    ) -> Result<Self, CliError> {
        let file = match config_path {
            None => FileConfig::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Usage(format!("cannot read config {}: {e}", path.display()))
                })?;
                toml::from_str(&text).map_err(|e| {
                    CliError::Usage(format!("invalid config {}: {e}", path.display()))
                })?
            }
        };
        Ok(Settings {
            seed: seed_flag.or(file.seed).unwrap_or(0),
            json,
            bst: file.bst,
            thresholds: file.thresholds,
            detector_overrides: file.detector,
        })
    }

    /// Desk-scale detector defaults with file overrides applied; flags
    /// are applied on top by the train command.
    pub fn detector_config(&self) -> DetectorConfig {
        let mut config = self.detector_overrides.apply(DetectorConfig::tiny(self.seed));
        config.seed = self.seed;
        config
    }
}
