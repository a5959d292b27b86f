//! Shared-encoder model with a scalar head and a per-token head.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::labeling::{DetectorTokenizer, HashSubwordTokenizer, TokenLabelVector};

use super::nn::{Encoder, Linear, Param};
use super::ModelError;

/// Hyperparameters and training settings for the detector.
///
/// The defaults are the full-scale settings; [`DetectorConfig::tiny`]
/// gives a configuration small enough to overfit desk-scale fixtures in
/// seconds.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DetectorConfig {
    /// Architecture identifier recorded in checkpoints and reports.
    pub encoder: String,
    /// Sequence capacity; token logits and label vectors use this length.
    pub max_len: usize,
    /// Embedding / encoder width.
    pub d_model: usize,
    /// Number of encoder layers.
    pub n_layers: usize,
    /// Attention heads per layer (must divide `d_model`).
    pub n_heads: usize,
    /// Hidden width of the position-wise feed-forward blocks.
    pub ffn_dim: usize,
    /// Subword vocabulary size (id 0 is padding).
    pub vocab_size: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    /// Decoupled weight decay applied at each optimizer step.
    pub weight_decay: f64,
    /// Cross-entropy class weights `[w_generated, w_contributed]`.
    pub class_weights: [f64; 2],
    /// Seed for initialization and shuffling.
    pub seed: u64,
    /// When true, the token loss also sums the (constant) padding terms.
    pub include_padding_in_ce: bool,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            encoder: "bi-encoder-base".to_string(),
            max_len: 368,
            d_model: 768,
            n_layers: 12,
            n_heads: 12,
            ffn_dim: 3072,
            vocab_size: 8192,
            learning_rate: 1e-6,
            batch_size: 64,
            epochs: 100,
            weight_decay: 0.001,
            class_weights: [1.0, 1.2],
            seed: 0,
            include_padding_in_ce: false,
        }
    }
}

impl DetectorConfig {
    /// A two-layer, width-64 configuration that trains in seconds on a
    /// CPU; used for fixture-scale tests and demos.
    pub fn tiny(seed: u64) -> Self {
        Self {
            encoder: "bi-encoder-tiny".to_string(),
            max_len: 368,
            d_model: 64,
            n_layers: 2,
            n_heads: 4,
            ffn_dim: 128,
            vocab_size: 8192,
            learning_rate: 3e-3,
            batch_size: 8,
            epochs: 300,
            weight_decay: 0.001,
            class_weights: [1.0, 1.2],
            seed,
            include_padding_in_ce: false,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let fail = |msg: String| Err(ModelError::InvalidConfig(msg));
        if self.max_len == 0 {
            return fail("max_len must be positive".into());
        }
        if self.d_model == 0 || self.n_layers == 0 || self.n_heads == 0 || self.ffn_dim == 0 {
            return fail("architecture dimensions must be positive".into());
        }
        if self.d_model % self.n_heads != 0 {
            return fail(format!(
                "d_model {} is not divisible by n_heads {}",
                self.d_model, self.n_heads
            ));
        }
        if self.vocab_size < 2 {
            return fail("vocab_size must be at least 2".into());
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return fail(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if self.batch_size == 0 {
            return fail("batch_size must be positive".into());
        }
        if self.epochs == 0 {
            return fail("epochs must be positive".into());
        }
        if !(self.weight_decay.is_finite() && self.weight_decay >= 0.0) {
            return fail(format!("weight_decay must be non-negative, got {}", self.weight_decay));
        }
        if self.class_weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return fail(format!("class_weights must be positive, got {:?}", self.class_weights));
        }
        Ok(())
    }
}

/// Raw model outputs for one text.
#[derive(Debug, Clone)]
pub struct DualHeadOutput {
    /// Unclamped scalar prediction from the regression head.
    pub y_reg_hat: f64,
    /// Per-position class logits, `max_len × 2`; rows at or beyond
    /// `attention_len` are zero-filled, not produced by the network.
    pub token_logits: Array2<f64>,
    /// Number of real token positions.
    pub attention_len: usize,
}

/// Clamped, decoded prediction for one text.
#[derive(Debug, Clone)]
pub struct Prediction {
    /// Scalar involvement estimate clamped to `[0, 1]`.
    pub involvement: f64,
    /// Arg-max token classes with the padding invariant maintained.
    pub token_labels: TokenLabelVector,
}

/// The trainable detector: tokenizer + encoder + two linear heads.
pub struct DualHeadModel {
    pub config: DetectorConfig,
    tokenizer: HashSubwordTokenizer,
    encoder: Encoder,
    reg_head: Linear,
    tok_head: Linear,
}

impl DualHeadModel {
    /// Builds a freshly initialized model from `config.seed`.
    pub fn new(config: &DetectorConfig) -> Result<Self, ModelError> {
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
        let reg_head = Linear::new("reg_head", config.d_model, 1, &mut rng);
        let tok_head = Linear::new("tok_head", config.d_model, 2, &mut rng);
        Ok(Self {
            config: config.clone(),
            tokenizer: HashSubwordTokenizer::new(config.max_len),
            encoder,
            reg_head,
            tok_head,
        })
    }

    pub fn tokenizer(&self) -> &dyn DetectorTokenizer {
        &self.tokenizer
    }

    /// Subword ids for a text, truncated to `max_len`.
    pub fn token_ids(&self, text: &str) -> Result<Vec<usize>, ModelError> {
        let ids: Vec<usize> =
            self.tokenizer.tokenize(text).iter().map(|t| t.id as usize).collect();
        if ids.is_empty() {
            return Err(ModelError::EmptyInput);
        }
        Ok(ids)
    }

    /// Forward pass over pre-tokenized ids, caching activations for
    /// [`DualHeadModel::backward`].
    pub fn forward_ids(&mut self, ids: &[usize]) -> Result<DualHeadOutput, ModelError> {
        if ids.is_empty() {
            return Err(ModelError::EmptyInput);
        }
        let hidden = self.encoder.forward(ids);
        let pooled = hidden.row(0).insert_axis(ndarray::Axis(0)).to_owned();
        let y_reg_hat = self.reg_head.forward(&pooled)[[0, 0]];
        let real_logits = self.tok_head.forward(&hidden);
        let mut token_logits = Array2::zeros((self.config.max_len, 2));
        token_logits.slice_mut(ndarray::s![..ids.len(), ..]).assign(&real_logits);
        if !y_reg_hat.is_finite() || token_logits.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NumericalError("forward pass output".into()));
        }
        Ok(DualHeadOutput { y_reg_hat, token_logits, attention_len: ids.len() })
    }

    /// Forward pass over raw text.
    pub fn forward(&mut self, text: &str) -> Result<DualHeadOutput, ModelError> {
        let ids = self.token_ids(text)?;
        self.forward_ids(&ids)
    }

    /// Accumulates gradients for the last [`DualHeadModel::forward_ids`]
    /// call. `d_logits` covers the real positions only (`attention_len × 2`).
    pub fn backward(&mut self, d_y_reg: f64, d_logits: &Array2<f64>) {
        let mut d_hidden = self.tok_head.backward(d_logits);
        let d_pooled = self.reg_head.backward(&ndarray::array![[d_y_reg]]);
        {
            let mut row = d_hidden.row_mut(0);
            row += &d_pooled.row(0);
        }
        self.encoder.backward(&d_hidden);
    }

    /// Visits every parameter in a fixed declaration order.
    pub fn visit_params(&mut self, f: &mut dyn FnMut(&mut Param)) {
        self.encoder.visit(f);
        self.reg_head.visit(f);
        self.tok_head.visit(f);
    }

    pub fn zero_grads(&mut self) {
        self.visit_params(&mut |p| p.zero_grad());
    }

    /// One optimizer step over the parameters selected by `include`;
    /// excluded parameters receive no update and no state change.
    pub fn optimizer_step(
        &mut self,
        lr: f64,
        weight_decay: f64,
        step: u64,
        include: &dyn Fn(&str) -> bool,
    ) {
        self.visit_params(&mut |p| {
            if include(&p.name) {
                p.adam_step(lr, weight_decay, step);
            }
        });
    }

    /// Decoded predictions, one per text, independent of grouping.
    pub fn predict(&mut self, texts: &[&str]) -> Result<Vec<Prediction>, ModelError> {
        texts.iter().map(|text| self.predict_one(text)).collect()
    }

    /// Decoded prediction for a single text.
    pub fn predict_one(&mut self, text: &str) -> Result<Prediction, ModelError> {
        let output = self.forward(text)?;
        Ok(decode_output(&output, self.config.max_len))
    }
}

/// Turns raw outputs into a clamped score and arg-max token labels.
/// Ties (equal logits) decode to class 0.
pub fn decode_output(output: &DualHeadOutput, max_len: usize) -> Prediction {
    let involvement = output.y_reg_hat.clamp(0.0, 1.0);
    let mut token_labels = TokenLabelVector::zeros_with_len(max_len, output.attention_len);
    for position in 0..output.attention_len {
        if output.token_logits[[position, 1]] > output.token_logits[[position, 0]] {
            token_labels.mark(position);
        }
    }
    Prediction { involvement, token_labels }
}
