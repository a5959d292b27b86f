//! Training objective: squared error on the scalar head plus
//! class-weighted cross-entropy on the token head.
//!
//! The total is an exact sum of the two parts. The cross-entropy term
//! sums over real token positions; padding positions carry zero-filled
//! logits that the network never produced, so by default they are
//! excluded. Setting `include_padding` adds their constant `w₀·ln 2`
//! terms for strict textbook form — it changes no gradient.

use ndarray::Array2;

use crate::labeling::TokenLabelVector;

use super::dual_head::DualHeadOutput;
use super::ModelError;

/// Loss decomposition; `total == mse + ce` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParts {
    pub total: f64,
    pub mse: f64,
    pub ce: f64,
}

/// Stable two-class log-softmax: returns `(log p₀, log p₁)`.
fn log_softmax2(a: f64, b: f64) -> (f64, f64) {
    let m = a.max(b);
    let log_sum = m + ((a - m).exp() + (b - m).exp()).ln();
    (a - log_sum, b - log_sum)
}

fn check_labels(output: &DualHeadOutput, y_cls: &TokenLabelVector) -> Result<(), ModelError> {
    if y_cls.attention_len() != output.attention_len {
        return Err(ModelError::LabelMismatch(format!(
            "label attention_len {} vs output attention_len {}",
            y_cls.attention_len(),
            output.attention_len
        )));
    }
    if y_cls.len() < output.attention_len {
        return Err(ModelError::LabelMismatch(format!(
            "label vector length {} shorter than {} real positions",
            y_cls.len(),
            output.attention_len
        )));
    }
    Ok(())
}

/// Combined loss for one example.
///
/// `weights[c]` scales the cross-entropy of positions whose gold class is
/// `c`. Non-finite inputs or results are reported as numerical errors
/// rather than silently propagated.
pub fn combined_loss(
    output: &DualHeadOutput,
    y_reg: f64,
    y_cls: &TokenLabelVector,
    weights: [f64; 2],
    include_padding: bool,
) -> Result<LossParts, ModelError> {
    check_labels(output, y_cls)?;
    if !y_reg.is_finite() || !output.y_reg_hat.is_finite() {
        return Err(ModelError::NumericalError("regression target or prediction".into()));
    }
    let diff = output.y_reg_hat - y_reg;
    let mse = diff * diff;
    let labels = y_cls.labels();
    let upper = if include_padding { output.token_logits.nrows() } else { output.attention_len };
    let mut ce = 0.0;
    for position in 0..upper {
        let gold = if position < output.attention_len { labels[position] as usize } else { 0 };
        let (lp0, lp1) = log_softmax2(
            output.token_logits[[position, 0]],
            output.token_logits[[position, 1]],
        );
        let log_p = if gold == 1 { lp1 } else { lp0 };
        ce -= weights[gold] * log_p;
    }
    let total = mse + ce;
    if !total.is_finite() {
        return Err(ModelError::NumericalError("combined loss".into()));
    }
    Ok(LossParts { total, mse, ce })
}

/// Gradients of [`combined_loss`] with respect to the raw outputs.
///
/// Returns `(d_total/d_y_reg_hat, d_total/d_logits)` where the logit
/// gradient covers real positions only (`attention_len × 2`); padding
/// rows are synthetic constants with zero gradient.
pub fn loss_gradients(
    output: &DualHeadOutput,
    y_reg: f64,
    y_cls: &TokenLabelVector,
    weights: [f64; 2],
) -> Result<(f64, Array2<f64>), ModelError> {
    check_labels(output, y_cls)?;
    let d_y_reg = 2.0 * (output.y_reg_hat - y_reg);
    let labels = y_cls.labels();
    let mut d_logits = Array2::zeros((output.attention_len, 2));
    for position in 0..output.attention_len {
        let gold = labels[position] as usize;
        let (lp0, lp1) =
            log_softmax2(output.token_logits[[position, 0]], output.token_logits[[position, 1]]);
        let (p0, p1) = (lp0.exp(), lp1.exp());
        let w = weights[gold];
        d_logits[[position, 0]] = w * (p0 - if gold == 0 { 1.0 } else { 0.0 });
        d_logits[[position, 1]] = w * (p1 - if gold == 1 { 1.0 } else { 0.0 });
    }
    Ok((d_y_reg, d_logits))
}
