//! Scatter-plot companions: least-squares fitted lines and rank
//! correlation with residual-based outlier removal.

use serde::{Deserialize, Serialize};

use super::EvalError;

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Ordinary least squares of `preds` on `labels`:
/// `pred ≈ slope · label + intercept`. The labels must take at least two
/// distinct values for the slope to exist.
pub fn fitted_line(preds: &[f64], labels: &[f64]) -> Result<(f64, f64), EvalError> {
    if preds.len() != labels.len() {
        return Err(EvalError::ShapeError { left: preds.len(), right: labels.len() });
    }
    if preds.len() < 2 {
        return Err(EvalError::EmptyInput);
    }
    let label_mean = mean(labels);
    let pred_mean = mean(preds);
    let mut covariance = 0.0;
    let mut label_variance = 0.0;
    for (p, l) in preds.iter().zip(labels) {
        covariance += (l - label_mean) * (p - pred_mean);
        label_variance += (l - label_mean) * (l - label_mean);
    }
    if label_variance == 0.0 {
        return Err(EvalError::DegenerateRange);
    }
    let slope = covariance / label_variance;
    let intercept = pred_mean - slope * label_mean;
    Ok((slope, intercept))
}

/// Midranks (1-based, ties averaged).
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

/// Spearman rank correlation via Pearson correlation of midranks.
/// Identical (or exactly mirrored) rank vectors short-circuit to ±1.0 so
/// that perfectly monotone data reports exactly 1.0.
fn spearman(x: &[f64], y: &[f64]) -> Result<f64, EvalError> {
    let rx = midranks(x);
    let ry = midranks(y);
    if rx == ry {
        return Ok(1.0);
    }
    let n_plus_1 = (rx.len() + 1) as f64;
    if rx.iter().zip(&ry).all(|(a, b)| a + b == n_plus_1) {
        return Ok(-1.0);
    }
    let mx = mean(&rx);
    let my = mean(&ry);
    let mut num = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        num += (a - mx) * (b - my);
        dx += (a - mx) * (a - mx);
        dy += (b - my) * (b - my);
    }
    if dx == 0.0 || dy == 0.0 {
        return Err(EvalError::DegenerateRange);
    }
    Ok(num / (dx.sqrt() * dy.sqrt()))
}

/// Rank correlation before and after removing high-residual points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpearmanReport {
    pub rho_raw: f64,
    pub rho_denoised: f64,
    /// Indices (into the input) whose line-fit residual exceeded 2σ.
    pub outlier_indices: Vec<usize>,
}

/// Spearman correlation of `y` against `x`, then again after dropping
/// points whose residual from the least-squares line of `y` on `x`
/// exceeds two standard deviations of the residuals.
pub fn spearman_denoised(x: &[f64], y: &[f64]) -> Result<SpearmanReport, EvalError> {
    if x.len() != y.len() {
        return Err(EvalError::ShapeError { left: x.len(), right: y.len() });
    }
    if x.len() < 3 {
        return Err(EvalError::InsufficientData { survivors: x.len() });
    }
    let rho_raw = spearman(x, y)?;
    // Least squares of y on x for the residuals.
    let (slope, intercept) = fitted_line(y, x)?;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(xi, yi)| yi - (slope * xi + intercept)).collect();
    let sigma = (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt();
    let outlier_indices: Vec<usize> = residuals
        .iter()
        .enumerate()
        .filter(|(_, r)| r.abs() > 2.0 * sigma)
        .map(|(i, _)| i)
        .collect();
    let keep: Vec<usize> =
        (0..x.len()).filter(|i| !outlier_indices.contains(i)).collect();
    if keep.len() < 3 {
        return Err(EvalError::InsufficientData { survivors: keep.len() });
    }
    let kept_x: Vec<f64> = keep.iter().map(|&i| x[i]).collect();
    let kept_y: Vec<f64> = keep.iter().map(|&i| y[i]).collect();
    let rho_denoised = spearman(&kept_x, &kept_y)?;
    Ok(SpearmanReport { rho_raw, rho_denoised, outlier_indices })
}
