//! Scalar, binary, and token-level metrics.

use serde::{Deserialize, Serialize};

use crate::labeling::TokenLabelVector;

use super::{binarize, BSTConfig, EvalError, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionMetrics {
    pub mse: f64,
    /// Fraction of predictions within 0.15 of the label.
    pub acc_within_015: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationMetrics {
    pub acc: f64,
    /// Absent when the gold labels contain a single class.
    pub auc: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TokenMetrics {
    pub acc: f64,
    pub f1: f64,
}

fn check_lengths(left: usize, right: usize) -> Result<(), EvalError> {
    if left != right {
        return Err(EvalError::ShapeError { left, right });
    }
    if left == 0 {
        return Err(EvalError::EmptyInput);
    }
    Ok(())
}

/// Mean squared error and accuracy-within-0.15 of scalar predictions.
pub fn regression_metrics(preds: &[f64], labels: &[f64]) -> Result<RegressionMetrics, EvalError> {
    check_lengths(preds.len(), labels.len())?;
    let n = preds.len() as f64;
    let mse = preds.iter().zip(labels).map(|(p, l)| (p - l) * (p - l)).sum::<f64>() / n;
    let close = preds.iter().zip(labels).filter(|(p, l)| (*p - *l).abs() <= 0.15).count();
    Ok(RegressionMetrics { mse, acc_within_015: close as f64 / n })
}

/// Midranks (1-based; ties share the average of their positions).
fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Area under the ROC curve from raw scores, with midrank tie handling.
/// Errors when the gold labels contain only one class.
pub fn auc(scores: &[f64], gold: &[u8]) -> Result<f64, EvalError> {
    check_lengths(scores.len(), gold.len())?;
    let positives = gold.iter().filter(|&&g| g == 1).count();
    let negatives = gold.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(EvalError::AUCUndefined);
    }
    let ranks = midranks(scores);
    let positive_rank_sum: f64 = ranks
        .iter()
        .zip(gold)
        .filter(|(_, &g)| g == 1)
        .map(|(r, _)| *r)
        .sum();
    let n1 = positives as f64;
    let n0 = negatives as f64;
    Ok((positive_rank_sum - n1 * (n1 + 1.0) / 2.0) / (n1 * n0))
}

/// Accuracy after binarizing the scores at `bst`, plus the threshold-free
/// AUC over the raw scores (absent for single-class gold).
pub fn classification_metrics(
    scores: &[f64],
    gold: &[u8],
    bst: BSTConfig,
) -> Result<ClassificationMetrics, EvalError> {
    check_lengths(scores.len(), gold.len())?;
    let correct = scores
        .iter()
        .zip(gold)
        .filter(|(s, &g)| binarize(**s, bst).as_class() == g)
        .count();
    let acc = correct as f64 / gold.len() as f64;
    let auc = match auc(scores, gold) {
        Ok(v) => Some(v),
        Err(EvalError::AUCUndefined) => None,
        Err(e) => return Err(e),
    };
    Ok(ClassificationMetrics { acc, auc })
}

struct TokenCounts {
    correct: usize,
    total: usize,
    tp: usize,
    fp: usize,
    fn_: usize,
}

fn token_counts(pred: &TokenLabelVector, gold: &TokenLabelVector) -> Result<TokenCounts, EvalError> {
    if pred.attention_len() != gold.attention_len() {
        return Err(EvalError::ShapeError {
            left: pred.attention_len(),
            right: gold.attention_len(),
        });
    }
    if pred.attention_len() == 0 {
        return Err(EvalError::EmptyInput);
    }
    let mut counts = TokenCounts { correct: 0, total: pred.attention_len(), tp: 0, fp: 0, fn_: 0 };
    let p = pred.labels();
    let g = gold.labels();
    for i in 0..pred.attention_len() {
        match (p[i], g[i]) {
            (1, 1) => {
                counts.tp += 1;
                counts.correct += 1;
            }
            (0, 0) => counts.correct += 1,
            (1, 0) => counts.fp += 1,
            (0, 1) => counts.fn_ += 1,
            _ => unreachable!("labels are validated to be binary"),
        }
    }
    Ok(counts)
}

fn f1_from_counts(tp: usize, fp: usize, fn_: usize) -> f64 {
    if tp + fp + fn_ == 0 {
        // No positives exist and none were predicted: perfect agreement.
        return 1.0;
    }
    2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
}

/// Accuracy and F1 (class 1 positive) over real token positions only;
/// padding never enters the counts.
pub fn token_metrics(
    pred: &TokenLabelVector,
    gold: &TokenLabelVector,
) -> Result<TokenMetrics, EvalError> {
    let c = token_counts(pred, gold)?;
    Ok(TokenMetrics {
        acc: c.correct as f64 / c.total as f64,
        f1: f1_from_counts(c.tp, c.fp, c.fn_),
    })
}

/// Micro-averaged token metrics: counts pooled across pairs before the
/// final division, so longer texts weigh proportionally more.
pub fn token_metrics_micro<'a, I>(pairs: I) -> Result<TokenMetrics, EvalError>
where
    I: IntoIterator<Item = (&'a TokenLabelVector, &'a TokenLabelVector)>,
{
    let (mut correct, mut total, mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize, 0usize, 0usize);
    for (pred, gold) in pairs {
        let c = token_counts(pred, gold)?;
        correct += c.correct;
        total += c.total;
        tp += c.tp;
        fp += c.fp;
        fn_ += c.fn_;
    }
    if total == 0 {
        return Err(EvalError::EmptyInput);
    }
    Ok(TokenMetrics { acc: correct as f64 / total as f64, f1: f1_from_counts(tp, fp, fn_) })
}

/// Verdict sequence for a score list at a threshold; convenience for
/// sweep tables.
pub fn binarize_all(scores: &[f64], bst: BSTConfig) -> Vec<Verdict> {
    scores.iter().map(|&s| binarize(s, bst)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vector(bits: &[u8]) -> TokenLabelVector {
        let mut v = TokenLabelVector::zeros_with_len(bits.len() + 4, bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b == 1 {
                v.mark(i);
            }
        }
        v
    }

    #[test]
    fn identical_predictions_give_zero_mse_full_acc() {
        let preds = [0.1, 0.4, 0.9];
        let m = regression_metrics(&preds, &preds).unwrap();
        assert_eq!(m.mse, 0.0);
        assert_eq!(m.acc_within_015, 1.0);
    }

    #[test]
    fn regression_hand_example() {
        let m = regression_metrics(&[0.2, 0.8], &[0.0, 1.0]).unwrap();
        assert!((m.mse - 0.04).abs() < 1e-15);
        assert_eq!(m.acc_within_015, 0.0);
    }

    #[test]
    fn boundary_error_counts_as_within() {
        let m = regression_metrics(&[0.15], &[0.0]).unwrap();
        assert_eq!(m.acc_within_015, 1.0);
    }

    #[test]
    fn mismatched_lengths_are_shape_errors() {
        assert!(matches!(
            regression_metrics(&[0.1], &[0.1, 0.2]),
            Err(EvalError::ShapeError { left: 1, right: 2 })
        ));
        assert!(matches!(regression_metrics(&[], &[]), Err(EvalError::EmptyInput)));
    }

    #[test]
    fn separated_scores_give_perfect_metrics() {
        let scores = [0.1, 0.2, 0.8, 0.9];
        let gold = [0, 0, 1, 1];
        let m = classification_metrics(&scores, &gold, BSTConfig::new(0.5).unwrap()).unwrap();
        assert_eq!(m.acc, 1.0);
        assert_eq!(m.auc, Some(1.0));
    }

    #[test]
    fn reversed_scores_give_zero_auc() {
        let scores = [0.9, 0.8, 0.2, 0.1];
        let gold = [0, 0, 1, 1];
        assert_eq!(auc(&scores, &gold).unwrap(), 0.0);
    }

    #[test]
    fn tied_scores_use_midranks() {
        // Both examples share one score; AUC must be exactly 1/2.
        assert_eq!(auc(&[0.5, 0.5], &[0, 1]).unwrap(), 0.5);
    }

    #[test]
    fn single_class_gold_is_undefined_for_auc_but_not_acc() {
        let scores = [0.4, 0.6];
        let gold = [1, 1];
        assert!(matches!(auc(&scores, &gold), Err(EvalError::AUCUndefined)));
        let m = classification_metrics(&scores, &gold, BSTConfig::new(0.5).unwrap()).unwrap();
        assert_eq!(m.auc, None);
        assert_eq!(m.acc, 0.5); // 0.4 binarizes to class 0, 0.6 to class 1
    }

    #[test]
    fn token_metrics_identity_is_perfect()  {
        let v = vector(&[1, 0, 1, 0, 0]);
        let m = token_metrics(&v, &v).unwrap();
        assert_eq!(m.acc, 1.0);
        assert_eq!(m.f1, 1.0);
    }

    #[test]
    fn all_zero_prediction_scores_zero_f1() {
        let pred = vector(&[0, 0, 0, 0]);
        let gold = vector(&[1, 0, 1, 0]);
        let m = token_metrics(&pred, &gold).unwrap();
        assert_eq!(m.f1, 0.0);
        assert_eq!(m.acc, 0.5);
    }

    #[test]
    fn padding_positions_never_enter_the_counts() {
        // Same real prefix, very different padding tail lengths.
        let short = vector(&[1, 0, 1]);
        let mut long = TokenLabelVector::zeros_with_len(100, 3);
        long.mark(0);
        long.mark(2);
        let a = token_metrics(&short, &vector(&[1, 1, 0])).unwrap();
        let b = token_metrics(&long, &vector(&[1, 1, 0])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn attention_length_mismatch_is_a_shape_error() {
        let a = vector(&[1, 0]);
        let b = vector(&[1, 0, 1]);
        assert!(matches!(token_metrics(&a, &b), Err(EvalError::ShapeError { .. })));
    }

    #[test]
    fn micro_average_pools_counts() {
        let p1 = vector(&[1, 0]);
        let g1 = vector(&[1, 0]);
        let p2 = vector(&[0, 0, 0, 0]);
        let g2 = vector(&[1, 1, 0, 0]);
        let m = token_metrics_micro([(&p1, &g1), (&p2, &g2)]).unwrap();
        // 4 of 6 positions correct; tp 1, fp 0, fn 2.
        assert!((m.acc - 4.0 / 6.0).abs() < 1e-15);
        assert!((m.f1 - 2.0 / 4.0).abs() < 1e-15);
    }

    proptest! {
        /// AUC is invariant under strictly increasing transforms of the
        /// scores (rank statistics only see the order).
        #[test]
        fn auc_is_invariant_under_monotone_transforms(
            scores in proptest::collection::vec(0.0f64..=1.0, 4..40),
            seed in 0u64..1000,
        ) {
            use rand::prelude::*;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let gold: Vec<u8> = (0..scores.len()).map(|_| rng.gen_range(0..=1)).collect();
            prop_assume!(gold.iter().any(|&g| g == 0) && gold.iter().any(|&g| g == 1));
            let base = auc(&scores, &gold).unwrap();
            let transformed: Vec<f64> = scores.iter().map(|s| (3.0 * s).exp() + s * 0.5).collect();
            let shifted = auc(&transformed, &gold).unwrap();
            prop_assert_eq!(base, shifted);
        }

        /// Regression metrics on identical lists are exactly (0, 1).
        #[test]
        fn self_comparison_is_perfect(
            preds in proptest::collection::vec(-10.0f64..10.0, 1..50),
        ) {
            let m = regression_metrics(&preds, &preds).unwrap();
            prop_assert_eq!(m.mse, 0.0);
            prop_assert_eq!(m.acc_within_015, 1.0);
        }
    }
}
