//! Checkpoint persistence: a directory holding `weights.json` (sorted
//! name → tensor map), `config.json`, and `curve.csv` (per-epoch losses).
//!
//! Weights serialize through JSON's shortest round-trip float form, so a
//! reloaded model reproduces the saved model's outputs bit for bit.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::dual_head::{DetectorConfig, DualHeadModel};
use super::train::TrainingState;
use super::ModelError;

pub const WEIGHTS_FILE: &str = "weights.json";
pub const CONFIG_FILE: &str = "config.json";
pub const CURVE_FILE: &str = "curve.csv";

#[derive(Serialize, Deserialize)]
struct WeightEntry {
    shape: [usize; 2],
    data: Vec<f64>,
}

/// Writes `weights.json`, `config.json`, and `curve.csv` into `dir`,
/// creating it if needed.
pub fn save_checkpoint(
    dir: &Path,
    model: &mut DualHeadModel,
    state: &TrainingState,
) -> Result<(), ModelError> {
    fs::create_dir_all(dir)?;
    let mut weights: BTreeMap<String, WeightEntry> = BTreeMap::new();
    model.visit_params(&mut |p| {
        weights.insert(
            p.name.clone(),
            WeightEntry {
                shape: [p.value.nrows(), p.value.ncols()],
                data: p.value.iter().copied().collect(),
            },
        );
    });
    fs::write(dir.join(WEIGHTS_FILE), serde_json::to_string(&weights)?)?;
    fs::write(dir.join(CONFIG_FILE), serde_json::to_string_pretty(&model.config)?)?;
    let mut curve = String::from("epoch,train_total,train_mse,train_ce,val_loss\n");
    for row in &state.curve {
        let val = row.val_loss.map(|v| v.to_string()).unwrap_or_default();
        curve.push_str(&format!(
            "{},{},{},{},{}\n",
            row.epoch, row.train_total, row.train_mse, row.train_ce, val
        ));
    }
    fs::write(dir.join(CURVE_FILE), curve)?;
    Ok(())
}

/// Rebuilds a model from a checkpoint directory. Any missing file,
/// unknown or absent parameter, or shape mismatch is a load error.
pub fn load_checkpoint(dir: &Path) -> Result<DualHeadModel, ModelError> {
    let read = |name: &str| {
        fs::read_to_string(dir.join(name))
            .map_err(|e| ModelError::ModelLoad(format!("{}: {e}", dir.join(name).display())))
    };
    let config: DetectorConfig = serde_json::from_str(&read(CONFIG_FILE)?)
        .map_err(|e| ModelError::ModelLoad(format!("config.json: {e}")))?;
    let mut weights: BTreeMap<String, WeightEntry> = serde_json::from_str(&read(WEIGHTS_FILE)?)
        .map_err(|e| ModelError::ModelLoad(format!("weights.json: {e}")))?;
    let mut model = DualHeadModel::new(&config)
        .map_err(|e| ModelError::ModelLoad(format!("config rejected: {e}")))?;
    let mut failure: Option<String> = None;
    model.visit_params(&mut |p| {
        if failure.is_some() {
            return;
        }
        match weights.remove(&p.name) {
            None => failure = Some(format!("missing parameter {}", p.name)),
            Some(entry) => {
                let expected = [p.value.nrows(), p.value.ncols()];
                if entry.shape != expected || entry.data.len() != expected[0] * expected[1] {
                    failure = Some(format!(
                        "parameter {} has shape {:?}, expected {:?}",
                        p.name, entry.shape, expected
                    ));
                } else {
                    let array = Array2::from_shape_vec((entry.shape[0], entry.shape[1]), entry.data)
                        .expect("shape checked above");
                    p.value.assign(&array);
                }
            }
        }
    });
    if let Some(message) = failure {
        return Err(ModelError::ModelLoad(message));
    }
    if let Some(extra) = weights.keys().next() {
        return Err(ModelError::ModelLoad(format!("unknown parameter {extra}")));
    }
    Ok(model)
}
