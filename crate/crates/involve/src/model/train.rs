//! Training loops for the dual-head detector, its single-head ablations,
//! and a sequence-level binary classifier on the same encoder.
//!
//! All loops are deterministic: the data order, the validation split, and
//! every parameter update derive from `config.seed`. Sequences are
//! processed one at a time with gradients averaged per batch, so results
//! do not depend on how examples are grouped into batches numerically
//! beyond the batch-mean scaling itself.

use log::debug;
use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::forge::Dataset;
use crate::labeling::{DetectorTokenizer, HashSubwordTokenizer, TokenLabelVector};

use super::dual_head::{DetectorConfig, DualHeadModel};
use super::loss::{combined_loss, loss_gradients};
use super::nn::{Encoder, Linear, Param};
use super::ModelError;

/// Knobs that vary between full runs and fixture-scale runs without
/// touching the model configuration.
#[derive(Debug, Clone)]
pub struct TrainOptions {
    /// Fraction of records held out for validation (0 disables it).
    pub validation_fraction: f64,
    /// Stop after this many epochs without a validation improvement.
    pub early_stop_patience: Option<usize>,
    /// Stop once the epoch-mean training loss drops to this value.
    pub stop_at_train_loss: Option<f64>,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self { validation_fraction: 0.1, early_stop_patience: None, stop_at_train_loss: None }
    }
}

impl TrainOptions {
    /// No held-out split and no early stop: every record is a training
    /// record, as used by memorization fixtures.
    pub fn overfit() -> Self {
        Self { validation_fraction: 0.0, early_stop_patience: None, stop_at_train_loss: None }
    }
}

/// Per-epoch losses recorded into the training curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_total: f64,
    pub train_mse: f64,
    pub train_ce: f64,
    /// Held-out selection loss: regression MSE for runs that train the
    /// scalar head, cross-entropy otherwise. Absent when there is no split.
    pub val_loss: Option<f64>,
}

/// Summary of a finished run; the returned model is the best-validation
/// snapshot when a split exists, otherwise the final state.
#[derive(Debug, Clone)]
pub struct TrainingState {
    pub curve: Vec<EpochStats>,
    pub best_val_loss: Option<f64>,
    pub best_epoch: usize,
    pub epochs_run: usize,
}

/// Which heads receive loss (and optimizer updates).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeadKind {
    Regression,
    Token,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum TrainMode {
    Dual,
    Single(HeadKind),
}

impl TrainMode {
    fn updates_param(&self, name: &str) -> bool {
        match self {
            TrainMode::Dual => true,
            TrainMode::Single(HeadKind::Regression) => !name.starts_with("tok_head."),
            TrainMode::Single(HeadKind::Token) => !name.starts_with("reg_head."),
        }
    }
}

struct Example {
    ids: Vec<usize>,
    y_reg: f64,
    y_cls: TokenLabelVector,
    class: Option<u8>,
}

fn prepare_examples(
    dataset: &Dataset,
    tokenizer: &dyn DetectorTokenizer,
) -> Result<Vec<Example>, ModelError> {
    if dataset.records.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    dataset
        .records
        .iter()
        .map(|record| {
            let ids: Vec<usize> =
                tokenizer.tokenize(&record.generated).iter().map(|t| t.id as usize).collect();
            if ids.is_empty() {
                return Err(ModelError::EmptyInput);
            }
            Ok(Example {
                ids,
                y_reg: record.y_reg,
                y_cls: record.y_cls.clone(),
                class: record.class_label,
            })
        })
        .collect()
}

/// Shuffles indices once and splits off the validation tail.
fn split_indices(
    n: usize,
    fraction: f64,
    rng: &mut ChaCha8Rng,
) -> (Vec<usize>, Vec<usize>) {
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(rng);
    let mut n_val = (n as f64 * fraction).round() as usize;
    if n_val >= n {
        n_val = n - 1; // always keep at least one training record
    }
    let val = indices.split_off(n - n_val);
    (indices, val)
}

fn snapshot_params(model: &mut DualHeadModel) -> Vec<Array2<f64>> {
    let mut values = Vec::new();
    model.visit_params(&mut |p| values.push(p.value.clone()));
    values
}

fn restore_params(model: &mut DualHeadModel, snapshot: &[Array2<f64>]) {
    let mut i = 0;
    model.visit_params(&mut |p| {
        p.value.assign(&snapshot[i]);
        i += 1;
    });
}

/// Trains both heads jointly on the combined loss.
pub fn train(
    dataset: &Dataset,
    config: &DetectorConfig,
    options: &TrainOptions,
) -> Result<(DualHeadModel, TrainingState), ModelError> {
    train_mode(dataset, config, options, TrainMode::Dual)
}

/// Trains one head (plus the shared encoder); the other head's parameters
/// are excluded from the optimizer entirely and stay bit-identical.
pub fn train_single_head(
    dataset: &Dataset,
    config: &DetectorConfig,
    head: HeadKind,
    options: &TrainOptions,
) -> Result<(DualHeadModel, TrainingState), ModelError> {
    train_mode(dataset, config, options, TrainMode::Single(head))
}

fn train_mode(
    dataset: &Dataset,
    config: &DetectorConfig,
    options: &TrainOptions,
    mode: TrainMode,
) -> Result<(DualHeadModel, TrainingState), ModelError> {
    config.validate()?;
    let mut model = DualHeadModel::new(config)?;
    let examples = prepare_examples(dataset, model.tokenizer())?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9e37_79b9_7f4a_7c15);
    let (mut train_idx, val_idx) = split_indices(examples.len(), options.validation_fraction, &mut rng);

    let mut state = TrainingState {
        curve: Vec::with_capacity(config.epochs),
        best_val_loss: None,
        best_epoch: 0,
        epochs_run: 0,
    };
    let mut best_snapshot: Option<Vec<Array2<f64>>> = None;
    let mut stale_epochs = 0usize;
    let mut step: u64 = 0;

    for epoch in 1..=config.epochs {
        train_idx.shuffle(&mut rng);
        let mut sum_total = 0.0;
        let mut sum_mse = 0.0;
        let mut sum_ce = 0.0;
        for batch in train_idx.chunks(config.batch_size) {
            model.zero_grads();
            let scale = 1.0 / batch.len() as f64;
            for &idx in batch {
                let example = &examples[idx];
                let output = model.forward_ids(&example.ids).map_err(|e| diverged(epoch, e))?;
                let parts = combined_loss(
                    &output,
                    example.y_reg,
                    &example.y_cls,
                    config.class_weights,
                    config.include_padding_in_ce,
                )
                .map_err(|e| diverged(epoch, e))?;
                sum_total += match mode {
                    TrainMode::Dual => parts.total,
                    TrainMode::Single(HeadKind::Regression) => parts.mse,
                    TrainMode::Single(HeadKind::Token) => parts.ce,
                };
                sum_mse += parts.mse;
                sum_ce += parts.ce;
                let (d_y_reg, d_logits) =
                    loss_gradients(&output, example.y_reg, &example.y_cls, config.class_weights)?;
                let (d_y_reg, d_logits) = match mode {
                    TrainMode::Dual => (d_y_reg * scale, d_logits * scale),
                    TrainMode::Single(HeadKind::Regression) => {
                        (d_y_reg * scale, Array2::zeros(d_logits.raw_dim()))
                    }
                    TrainMode::Single(HeadKind::Token) => (0.0, d_logits * scale),
                };
                model.backward(d_y_reg, &d_logits);
            }
            step += 1;
            model.optimizer_step(config.learning_rate, config.weight_decay, step, &|name| {
                mode.updates_param(name)
            });
        }
        let n_train = train_idx.len() as f64;
        let stats_total = sum_total / n_train;
        if !stats_total.is_finite() {
            return Err(ModelError::Diverged {
                epoch,
                message: "epoch-mean training loss is not finite".into(),
            });
        }
        let val_loss = if val_idx.is_empty() {
            None
        } else {
            Some(validation_loss(&mut model, &examples, &val_idx, config, mode)
                .map_err(|e| diverged(epoch, e))?)
        };
        let stats = EpochStats {
            epoch,
            train_total: stats_total,
            train_mse: sum_mse / n_train,
            train_ce: sum_ce / n_train,
            val_loss,
        };
        debug!(
            "epoch {epoch}: train {:.6} (mse {:.6}, ce {:.6}), val {:?}",
            stats.train_total, stats.train_mse, stats.train_ce, stats.val_loss
        );
        state.curve.push(stats);
        state.epochs_run = epoch;

        if let Some(v) = val_loss {
            let improved = state.best_val_loss.map_or(true, |best| v < best);
            if improved {
                state.best_val_loss = Some(v);
                state.best_epoch = epoch;
                best_snapshot = Some(snapshot_params(&mut model));
                stale_epochs = 0;
            } else {
                stale_epochs += 1;
                if options.early_stop_patience.is_some_and(|p| stale_epochs >= p) {
                    break;
                }
            }
        }
        if options.stop_at_train_loss.is_some_and(|t| stats.train_total <= t) {
            break;
        }
    }

    if let Some(snapshot) = best_snapshot {
        restore_params(&mut model, &snapshot);
    }
    Ok((model, state))
}

fn diverged(epoch: usize, cause: ModelError) -> ModelError {
    match cause {
        ModelError::NumericalError(what) => ModelError::Diverged {
            epoch,
            message: format!("non-finite value in {what}"),
        },
        other => other,
    }
}

/// Selection loss on the held-out records: regression MSE when the scalar
/// head is being trained, token cross-entropy otherwise.
fn validation_loss(
    model: &mut DualHeadModel,
    examples: &[Example],
    val_idx: &[usize],
    config: &DetectorConfig,
    mode: TrainMode,
) -> Result<f64, ModelError> {
    let mut sum = 0.0;
    for &idx in val_idx {
        let example = &examples[idx];
        let output = model.forward_ids(&example.ids)?;
        let parts = combined_loss(
            &output,
            example.y_reg,
            &example.y_cls,
            config.class_weights,
            config.include_padding_in_ce,
        )?;
        sum += match mode {
            TrainMode::Single(HeadKind::Token) => parts.ce,
            _ => parts.mse,
        };
    }
    Ok(sum / val_idx.len() as f64)
}

/// Sequence-level two-class model: the same encoder architecture with a
/// single classification head on the pooled first position.
pub struct BinaryClassifier {
    pub config: DetectorConfig,
    tokenizer: HashSubwordTokenizer,
    encoder: Encoder,
    head: Linear,
}

impl BinaryClassifier {
    fn new(config: &DetectorConfig) -> Result<Self, ModelError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let encoder = Encoder::new(
            config.vocab_size,
            config.max_len,
            config.d_model,
            config.n_heads,
            config.ffn_dim,
            config.n_layers,
            &mut rng,
        );
        let head = Linear::new("cls_head", config.d_model, 2, &mut rng);
        Ok(Self {
            config: config.clone(),
            tokenizer: HashSubwordTokenizer::new(config.max_len),
            encoder,
            head,
        })
    }

    fn forward_ids(&mut self, ids: &[usize]) -> Result<[f64; 2], ModelError> {
        if ids.is_empty() {
            return Err(ModelError::EmptyInput);
        }
        let hidden = self.encoder.forward(ids);
        let pooled = hidden.row(0).insert_axis(ndarray::Axis(0)).to_owned();
        let logits = self.head.forward(&pooled);
        let out = [logits[[0, 0]], logits[[0, 1]]];
        if out.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NumericalError("classifier logits".into()));
        }
        Ok(out)
    }

    fn backward(&mut self, d_logits: [f64; 2], len: usize, width: usize) {
        let d_pooled = self.head.backward(&ndarray::array![[d_logits[0], d_logits[1]]]);
        let mut d_hidden = Array2::zeros((len, width));
        d_hidden.row_mut(0).assign(&d_pooled.row(0));
        self.encoder.backward(&d_hidden);
    }

    fn visit_params(&mut self, f: &mut dyn FnMut(&mut Param)) {
        self.encoder.visit(f);
        self.head.visit(f);
    }

    /// Probability that the text belongs to class 1 (human-written side
    /// of a polarized dataset).
    pub fn score(&mut self, text: &str) -> Result<f64, ModelError> {
        let ids: Vec<usize> =
            self.tokenizer.tokenize(text).iter().map(|t| t.id as usize).collect();
        if ids.is_empty() {
            return Err(ModelError::EmptyInput);
        }
        let [l0, l1] = self.forward_ids(&ids)?;
        let m = l0.max(l1);
        let z = (l0 - m).exp() + (l1 - m).exp();
        Ok((l1 - m).exp() / z)
    }
}

/// Trains [`BinaryClassifier`] on a polarized dataset with unweighted
/// cross-entropy. Records must carry class labels from both classes.
pub fn train_binary_classifier(
    dataset: &Dataset,
    config: &DetectorConfig,
    options: &TrainOptions,
) -> Result<(BinaryClassifier, TrainingState), ModelError> {
    config.validate()?;
    let mut model = BinaryClassifier::new(config)?;
    let examples = prepare_examples(dataset, &model.tokenizer)?;
    let classes: Vec<u8> = examples
        .iter()
        .map(|e| {
            e.class.ok_or_else(|| {
                ModelError::LabelMismatch("record has no class label; polarize the dataset first".into())
            })
        })
        .collect::<Result<_, _>>()?;
    if classes.iter().all(|&c| c == 0) || classes.iter().all(|&c| c == 1) {
        return Err(ModelError::PartitionDegenerate);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9e37_79b9_7f4a_7c15);
    let (mut train_idx, val_idx) = split_indices(examples.len(), options.validation_fraction, &mut rng);

    let mut state = TrainingState {
        curve: Vec::with_capacity(config.epochs),
        best_val_loss: None,
        best_epoch: 0,
        epochs_run: 0,
    };
    let mut best_snapshot: Option<Vec<Array2<f64>>> = None;
    let mut stale_epochs = 0usize;
    let mut step: u64 = 0;

    for epoch in 1..=config.epochs {
        train_idx.shuffle(&mut rng);
        let mut sum_ce = 0.0;
        for batch in train_idx.chunks(config.batch_size) {
            model.visit_params(&mut |p| p.zero_grad());
            let scale = 1.0 / batch.len() as f64;
            for &idx in batch {
                let example = &examples[idx];
                let logits = model.forward_ids(&example.ids).map_err(|e| diverged(epoch, e))?;
                let gold = classes[idx] as usize;
                let m = logits[0].max(logits[1]);
                let log_sum = m + ((logits[0] - m).exp() + (logits[1] - m).exp()).ln();
                let ce = log_sum - logits[gold];
                sum_ce += ce;
                let p0 = (logits[0] - log_sum).exp();
                let p1 = (logits[1] - log_sum).exp();
                let d = [
                    (p0 - if gold == 0 { 1.0 } else { 0.0 }) * scale,
                    (p1 - if gold == 1 { 1.0 } else { 0.0 }) * scale,
                ];
                model.backward(d, example.ids.len(), config.d_model);
            }
            step += 1;
            model.visit_params(&mut |p| p.adam_step(config.learning_rate, config.weight_decay, step));
        }
        let train_ce = sum_ce / train_idx.len() as f64;
        if !train_ce.is_finite() {
            return Err(ModelError::Diverged {
                epoch,
                message: "epoch-mean training loss is not finite".into(),
            });
        }
        let val_loss = if val_idx.is_empty() {
            None
        } else {
            let mut sum = 0.0;
            for &idx in &val_idx {
                let logits = model.forward_ids(&examples[idx].ids).map_err(|e| diverged(epoch, e))?;
                let gold = classes[idx] as usize;
                let m = logits[0].max(logits[1]);
                let log_sum = m + ((logits[0] - m).exp() + (logits[1] - m).exp()).ln();
                sum += log_sum - logits[gold];
            }
            Some(sum / val_idx.len() as f64)
        };
        state.curve.push(EpochStats {
            epoch,
            train_total: train_ce,
            train_mse: 0.0,
            train_ce,
            val_loss,
        });
        state.epochs_run = epoch;
        if let Some(v) = val_loss {
            let improved = state.best_val_loss.map_or(true, |best| v < best);
            if improved {
                state.best_val_loss = Some(v);
                state.best_epoch = epoch;
                let mut values = Vec::new();
                model.visit_params(&mut |p| values.push(p.value.clone()));
                best_snapshot = Some(values);
                stale_epochs = 0;
            } else {
                stale_epochs += 1;
                if options.early_stop_patience.is_some_and(|p| stale_epochs >= p) {
                    break;
                }
            }
        }
        if options.stop_at_train_loss.is_some_and(|t| train_ce <= t) {
            break;
        }
    }
    if let Some(snapshot) = best_snapshot {
        let mut i = 0;
        model.visit_params(&mut |p| {
            p.value.assign(&snapshot[i]);
            i += 1;
        });
    }
    Ok((model, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge::{
        build_continuous_dataset, build_polarized_dataset, AbstractDoc, ForgeOptions,
        MockLlmClient, TemplateVariant,
    };
    use crate::similarity::NgramHashEmbedder;

    fn corpus() -> Vec<AbstractDoc> {
        let texts = [
            "Neural networks improve steadily. Training data matters. Evaluation needs care. Results vary across domains.",
            "Language models generate fluent text. Quality depends on prompts. Automatic detection is hard. Benchmarks disagree often.",
            "Optimization shapes the loss surface. Gradients flow through layers. Regularization prevents memorization. Validation tracks progress.",
            "Tokenization splits words into pieces. Vocabularies stay fixed. Rare words fragment heavily. Coverage affects accuracy.",
        ];
        texts
            .iter()
            .enumerate()
            .map(|(i, t)| AbstractDoc {
                id: format!("doc-{i}"),
                title: Some(format!("Study {i}")),
                text: t.to_string(),
            })
            .collect()
    }

    fn tiny_config(seed: u64) -> DetectorConfig {
        DetectorConfig {
            d_model: 32,
            n_heads: 2,
            ffn_dim: 64,
            epochs: 25,
            batch_size: 4,
            learning_rate: 3e-3,
            ..DetectorConfig::tiny(seed)
        }
    }

    fn small_dataset(count: usize, seed: u64) -> Dataset {
        let docs = corpus();
        let client = MockLlmClient::new(seed);
        let embedder = NgramHashEmbedder::default();
        let tokenizer = HashSubwordTokenizer::new(368);
        let options = ForgeOptions::new(TemplateVariant::Direct, count, seed, "train-test");
        build_continuous_dataset(&docs, &client, &embedder, &tokenizer, &options).unwrap()
    }

    #[test]
    fn training_reduces_the_loss() {
        let dataset = small_dataset(10, 3);
        let (_, state) = train(&dataset, &tiny_config(3), &TrainOptions::overfit()).unwrap();
        let first = state.curve.first().unwrap().train_total;
        let last = state.curve.last().unwrap().train_total;
        assert!(last < first * 0.8, "loss should drop markedly: {first} → {last}");
        assert_eq!(state.epochs_run, 25);
        assert_eq!(state.curve.len(), 25);
    }

    #[test]
    fn training_is_bit_deterministic() {
        let dataset = small_dataset(8, 5);
        let config = DetectorConfig { epochs: 6, ..tiny_config(5) };
        let (mut a, state_a) = train(&dataset, &config, &TrainOptions::default()).unwrap();
        let (mut b, state_b) = train(&dataset, &config, &TrainOptions::default()).unwrap();
        assert_eq!(state_a.curve, state_b.curve);
        let probe = "A probe sentence for comparing trained models.";
        assert_eq!(
            a.forward(probe).unwrap().y_reg_hat.to_bits(),
            b.forward(probe).unwrap().y_reg_hat.to_bits()
        );
        let config_c = DetectorConfig { seed: 6, ..config };
        let (mut c, _) = train(&dataset, &config_c, &TrainOptions::default()).unwrap();
        assert_ne!(a.forward(probe).unwrap().y_reg_hat, c.forward(probe).unwrap().y_reg_hat);
    }

    #[test]
    fn best_validation_snapshot_is_returned() {
        let dataset = small_dataset(10, 7);
        let config = DetectorConfig { epochs: 12, ..tiny_config(7) };
        let options = TrainOptions { validation_fraction: 0.2, ..TrainOptions::default() };
        let (model, state) = train(&dataset, &config, &options).unwrap();
        let best = state.best_val_loss.expect("validation split exists");
        assert!(state.best_epoch >= 1);
        // Recompute the validation loss of the returned model: it must
        // equal the recorded best exactly (the snapshot was restored).
        let mut model = model;
        let examples = prepare_examples(&dataset, model.tokenizer()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9e37_79b9_7f4a_7c15);
        let (_, val_idx) = split_indices(examples.len(), options.validation_fraction, &mut rng);
        let recomputed =
            validation_loss(&mut model, &examples, &val_idx, &config, TrainMode::Dual).unwrap();
        assert_eq!(recomputed.to_bits(), best.to_bits());
    }

    #[test]
    fn early_stopping_halts_on_stale_validation() {
        let dataset = small_dataset(10, 9);
        let config = DetectorConfig { epochs: 60, ..tiny_config(9) };
        let options = TrainOptions {
            validation_fraction: 0.2,
            early_stop_patience: Some(3),
            ..TrainOptions::default()
        };
        let (_, state) = train(&dataset, &config, &options).unwrap();
        assert!(state.epochs_run <= 60);
        if state.epochs_run < 60 {
            assert!(state.epochs_run >= state.best_epoch + 3);
        }
    }

    #[test]
    fn loss_threshold_stops_training_immediately() {
        let dataset = small_dataset(6, 11);
        let config = DetectorConfig { epochs: 30, ..tiny_config(11) };
        let options =
            TrainOptions { stop_at_train_loss: Some(f64::MAX), ..TrainOptions::overfit() };
        let (_, state) = train(&dataset, &config, &options).unwrap();
        assert_eq!(state.epochs_run, 1);
    }

    #[test]
    fn frozen_token_head_stays_bit_identical() {
        let dataset = small_dataset(8, 13);
        let config = DetectorConfig { epochs: 5, ..tiny_config(13) };
        let mut fresh = DualHeadModel::new(&config).unwrap();
        let mut before = Vec::new();
        fresh.visit_params(&mut |p| {
            if p.name.starts_with("tok_head.") {
                before.push((p.name.clone(), p.value.iter().map(|v| v.to_bits()).collect::<Vec<_>>()));
            }
        });
        let (mut trained, _) =
            train_single_head(&dataset, &config, HeadKind::Regression, &TrainOptions::overfit())
                .unwrap();
        let mut after = Vec::new();
        let mut encoder_changed = false;
        trained.visit_params(&mut |p| {
            if p.name.starts_with("tok_head.") {
                after.push((p.name.clone(), p.value.iter().map(|v| v.to_bits()).collect::<Vec<_>>()));
            } else if p.name.starts_with("layer0.") && p.grad.len() > 0 {
                encoder_changed = true;
            }
        });
        assert_eq!(before, after, "untouched head must stay bit-identical");
        assert!(encoder_changed);
    }

    #[test]
    fn frozen_regression_head_stays_bit_identical() {
        let dataset = small_dataset(8, 15);
        let config = DetectorConfig { epochs: 5, ..tiny_config(15) };
        let mut fresh = DualHeadModel::new(&config).unwrap();
        let mut before = Vec::new();
        fresh.visit_params(&mut |p| {
            if p.name.starts_with("reg_head.") {
                before.push(p.value.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
            }
        });
        let (mut trained, state) =
            train_single_head(&dataset, &config, HeadKind::Token, &TrainOptions::overfit()).unwrap();
        let mut after = Vec::new();
        trained.visit_params(&mut |p| {
            if p.name.starts_with("reg_head.") {
                after.push(p.value.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
            }
        });
        assert_eq!(before, after);
        // Token-only training reports cross-entropy as its objective.
        let first = state.curve.first().unwrap();
        assert_eq!(first.train_total, first.train_ce);
    }

    #[test]
    fn huge_learning_rate_reports_divergence() {
        let dataset = small_dataset(6, 17);
        let config = DetectorConfig {
            learning_rate: 1e10,
            weight_decay: 0.01,
            epochs: 60,
            d_model: 16,
            n_heads: 2,
            ffn_dim: 32,
            batch_size: 2,
            ..DetectorConfig::tiny(17)
        };
        match train(&dataset, &config, &TrainOptions::default()) {
            Err(ModelError::Diverged { epoch, .. }) => assert!(epoch <= 60),
            Err(other) => panic!("expected divergence, got {other}"),
            Ok(_) => panic!("expected divergence, training finished"),
        }
    }

    #[test]
    fn empty_dataset_is_rejected() {
        let mut dataset = small_dataset(4, 19);
        dataset.records.clear();
        assert!(matches!(
            train(&dataset, &tiny_config(19), &TrainOptions::default()),
            Err(ModelError::EmptyDataset)
        ));
    }

    #[test]
    fn binary_classifier_trains_and_scores_in_unit_interval() {
        let docs = corpus();
        let client = MockLlmClient::new(21);
        let embedder = NgramHashEmbedder::default();
        let tokenizer = HashSubwordTokenizer::new(368);
        let options = ForgeOptions::new(TemplateVariant::Direct, 12, 21, "cls-test");
        let dataset =
            build_polarized_dataset(&docs, &client, &embedder, &tokenizer, &options).unwrap();
        let config = DetectorConfig { epochs: 15, ..tiny_config(21) };
        let (mut model, state) =
            train_binary_classifier(&dataset, &config, &TrainOptions::overfit()).unwrap();
        let first = state.curve.first().unwrap().train_ce;
        let last = state.curve.last().unwrap().train_ce;
        assert!(last < first, "cross-entropy should decrease: {first} → {last}");
        let s = model.score("Neural networks improve steadily.").unwrap();
        assert!((0.0..=1.0).contains(&s));
    }

    #[test]
    fn single_class_dataset_is_degenerate_for_binary_training() {
        let docs = corpus();
        let client = MockLlmClient::new(23);
        let embedder = NgramHashEmbedder::default();
        let tokenizer = HashSubwordTokenizer::new(368);
        let options = ForgeOptions::new(TemplateVariant::Direct, 8, 23, "cls-degenerate");
        let mut dataset =
            build_polarized_dataset(&docs, &client, &embedder, &tokenizer, &options).unwrap();
        dataset.records.retain(|r| r.class_label == Some(0));
        assert!(matches!(
            train_binary_classifier(&dataset, &tiny_config(23), &TrainOptions::overfit()),
            Err(ModelError::PartitionDegenerate)
        ));
    }

    #[test]
    fn missing_class_labels_are_rejected() {
        let dataset = small_dataset(4, 25);
        assert!(matches!(
            train_binary_classifier(&dataset, &tiny_config(25), &TrainOptions::overfit()),
            Err(ModelError::LabelMismatch(_))
        ));
    }
}
