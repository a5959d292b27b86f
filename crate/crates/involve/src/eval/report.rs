//! Dataset-level evaluation: threshold sweeps, cross-generator tables,
//! and the assembled report with JSON / markdown / CSV renderings.

use serde::{Deserialize, Serialize};

use crate::forge::Dataset;
use crate::model::DualHeadModel;

use super::adapters::DetectorAdapter;
use super::metrics::{auc, regression_metrics, token_metrics_micro};
use super::{binarize, BSTConfig, EvalError};

/// One threshold of a sweep. `degenerate` marks rows where re-binarized
/// gold labels collapsed to a single class; such rows keep their accuracy
/// but have no AUC.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub threshold: f64,
    pub acc: f64,
    pub auc: Option<f64>,
    pub degenerate: bool,
}

fn sweep_from_scores(
    scores: &[f64],
    labels: &[f64],
    thresholds: &[f64],
) -> Result<Vec<SweepRow>, EvalError> {
    let mut rows = Vec::with_capacity(thresholds.len());
    for &t in thresholds {
        let bst = BSTConfig::new(t)?;
        let gold: Vec<u8> = labels.iter().map(|&y| binarize(y, bst).as_class()).collect();
        let correct = scores
            .iter()
            .zip(&gold)
            .filter(|(s, &g)| binarize(**s, bst).as_class() == g)
            .count();
        let acc = correct as f64 / gold.len() as f64;
        let (auc_value, degenerate) = match auc(scores, &gold) {
            Ok(v) => (Some(v), false),
            Err(EvalError::AUCUndefined) => (None, true),
            Err(e) => return Err(e),
        };
        rows.push(SweepRow { threshold: t, acc, auc: auc_value, degenerate });
    }
    Ok(rows)
}

/// Re-binarizes the dataset's involvement labels at each threshold and
/// scores the adapter's binarized predictions against them. Each text is
/// scored once; thresholds reuse the scores.
pub fn bst_sweep(
    adapter: &mut dyn DetectorAdapter,
    dataset: &Dataset,
    thresholds: &[f64],
) -> Result<Vec<SweepRow>, EvalError> {
    if dataset.records.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut scores = Vec::with_capacity(dataset.records.len());
    for record in &dataset.records {
        scores.push(adapter.score(&record.generated)?);
    }
    let labels: Vec<f64> = dataset.records.iter().map(|r| r.y_reg).collect();
    sweep_from_scores(&scores, &labels, thresholds)
}

/// One generator's regression quality in a cross-generator table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossModelRow {
    pub generator: String,
    pub mse: f64,
    pub acc_within_015: f64,
}

/// Regression metrics of one detector across datasets from different
/// generators, one row per named dataset in input order.
pub fn cross_model_report(
    adapter: &mut dyn DetectorAdapter,
    datasets: &[(&str, &Dataset)],
) -> Result<Vec<CrossModelRow>, EvalError> {
    let mut rows = Vec::with_capacity(datasets.len());
    for (name, dataset) in datasets {
        if dataset.records.is_empty() {
            return Err(EvalError::EmptyInput);
        }
        let mut preds = Vec::with_capacity(dataset.records.len());
        for record in &dataset.records {
            preds.push(adapter.score(&record.generated)?);
        }
        let labels: Vec<f64> = dataset.records.iter().map(|r| r.y_reg).collect();
        let m = regression_metrics(&preds, &labels)?;
        rows.push(CrossModelRow {
            generator: name.to_string(),
            mse: m.mse,
            acc_within_015: m.acc_within_015,
        });
    }
    Ok(rows)
}

/// Full evaluation summary for one detector on one dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub dataset_id: String,
    pub dataset_kind: String,
    pub record_count: usize,
    pub mse: f64,
    pub acc_within_015: f64,
    pub token_acc: f64,
    pub token_f1: f64,
    pub fit_slope: f64,
    pub fit_intercept: f64,
    pub sweep: Vec<SweepRow>,
}

impl EvalReport {
    /// Markdown rendering with a metric table and a sweep table.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# Evaluation: {} ({}, {} records)\n\n",
            self.dataset_id, self.dataset_kind, self.record_count
        ));
        out.push_str("| metric | value |\n|---|---|\n");
        out.push_str(&format!("| MSE | {:.6} |\n", self.mse));
        out.push_str(&format!("| ACC (±0.15) | {:.4} |\n", self.acc_within_015));
        out.push_str(&format!("| token ACC | {:.4} |\n", self.token_acc));
        out.push_str(&format!("| token F1 | {:.4} |\n", self.token_f1));
        out.push_str(&format!("| fit slope | {:.4} |\n", self.fit_slope));
        out.push_str(&format!("| fit intercept | {:.4} |\n", self.fit_intercept));
        if !self.sweep.is_empty() {
            out.push_str("\n## Threshold sweep\n\n| BST | ACC | AUC | note |\n|---|---|---|---|\n");
            for row in &self.sweep {
                let auc = row.auc.map(|v| format!("{v:.4}")).unwrap_or_else(|| "—".into());
                let note = if row.degenerate { "single-class gold" } else { "" };
                out.push_str(&format!(
                    "| {:.2} | {:.4} | {} | {} |\n",
                    row.threshold, row.acc, auc, note
                ));
            }
        }
        out
    }
}

/// Scatter data as CSV with a `label,prediction` header, full precision.
pub fn scatter_csv(scatter: &[(f64, f64)]) -> String {
    let mut out = String::from("label,prediction\n");
    for (label, prediction) in scatter {
        out.push_str(&format!("{label},{prediction}\n"));
    }
    out
}

/// Evaluates a dual-head model on a labeled dataset: regression metrics,
/// micro token metrics, fitted line, and a threshold sweep. Also returns
/// the `(label, prediction)` scatter points.
pub fn evaluate_model(
    model: &mut DualHeadModel,
    dataset: &Dataset,
    thresholds: &[f64],
) -> Result<(EvalReport, Vec<(f64, f64)>), EvalError> {
    if dataset.records.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut preds = Vec::with_capacity(dataset.records.len());
    let mut token_pairs = Vec::with_capacity(dataset.records.len());
    for record in &dataset.records {
        let prediction = model.predict_one(&record.generated)?;
        preds.push(prediction.involvement);
        token_pairs.push((prediction.token_labels, &record.y_cls));
    }
    let labels: Vec<f64> = dataset.records.iter().map(|r| r.y_reg).collect();
    let reg = regression_metrics(&preds, &labels)?;
    let token =
        token_metrics_micro(token_pairs.iter().map(|(p, g)| (p, *g)))?;
    let (fit_slope, fit_intercept) = fitted_line(&preds, &labels)?;
    let sweep = sweep_from_scores(&preds, &labels, thresholds)?;
    let report = EvalReport {
        dataset_id: dataset.metadata.dataset_id.clone(),
        dataset_kind: format!("{:?}", dataset.metadata.kind).to_lowercase(),
        record_count: dataset.records.len(),
        mse: reg.mse,
        acc_within_015: reg.acc_within_015,
        token_acc: token.acc,
        token_f1: token.f1,
        fit_slope,
        fit_intercept,
        sweep,
    };
    let scatter = labels.into_iter().zip(preds).collect();
    Ok((report, scatter))
}

use super::analysis::fitted_line;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::adapters::{ConstantAdapter, LabelOracleAdapter};
    use crate::forge::{
        build_continuous_dataset, AbstractDoc, ForgeOptions, MockLlmClient, TemplateVariant,
    };
    use crate::labeling::HashSubwordTokenizer;
    use crate::model::{train, DetectorConfig, TrainOptions};
    use crate::similarity::NgramHashEmbedder;

    fn mock_dataset(count: usize, seed: u64) -> Dataset {
        let docs = vec![
            AbstractDoc {
                id: "d0".into(),
                title: None,
                text: "Detectors estimate involvement. Thresholds split the range. \
                       Sweeps show robustness. Reports summarize everything."
                    .into(),
            },
            AbstractDoc {
                id: "d1".into(),
                title: None,
                text: "Synthetic corpora enable testing. Mock clients answer instantly. \
                       Seeds pin every byte. Fixtures stay small."
                    .into(),
            },
        ];
        let client = MockLlmClient::new(seed);
        let embedder = NgramHashEmbedder::default();
        let tokenizer = HashSubwordTokenizer::new(368);
        let options = ForgeOptions::new(TemplateVariant::Direct, count, seed, "report-test");
        build_continuous_dataset(&docs, &client, &embedder, &tokenizer, &options).unwrap()
    }

    #[test]
    fn oracle_sweep_is_perfect_at_every_threshold() {
        let dataset = mock_dataset(12, 3);
        let mut oracle = LabelOracleAdapter::from_dataset(&dataset);
        let rows = bst_sweep(&mut oracle, &dataset, &[0.1, 0.3, 0.5, 0.7, 0.9]).unwrap();
        for row in rows {
            assert_eq!(row.acc, 1.0, "oracle must be perfect at {}", row.threshold);
            if !row.degenerate {
                assert_eq!(row.auc, Some(1.0));
            }
        }
    }

    #[test]
    fn constant_adapter_accuracy_is_the_predicted_class_fraction() {
        let dataset = mock_dataset(10, 5);
        let mut adapter = ConstantAdapter { value: 0.0 };
        let rows = bst_sweep(&mut adapter, &dataset, &[0.5]).unwrap();
        // Score 0.0 always binarizes to AI generation: accuracy equals the
        // fraction of records whose label is at or below the threshold.
        let expected = dataset.records.iter().filter(|r| r.y_reg <= 0.5).count() as f64
            / dataset.records.len() as f64;
        assert_eq!(rows[0].acc, expected);
    }

    #[test]
    fn one_sided_labels_flag_the_row_instead_of_failing() {
        let mut dataset = mock_dataset(12, 7);
        dataset.records.retain(|r| r.y_reg < 0.9);
        assert!(dataset.records.len() >= 3);
        let mut oracle = LabelOracleAdapter::from_dataset(&dataset);
        // Far above every kept label: gold is single-class.
        let rows = bst_sweep(&mut oracle, &dataset, &[0.95]).unwrap();
        assert!(rows[0].degenerate);
        assert_eq!(rows[0].auc, None);
        assert_eq!(rows[0].acc, 1.0);
    }

    #[test]
    fn invalid_sweep_threshold_is_rejected() {
        let dataset = mock_dataset(6, 9);
        let mut oracle = LabelOracleAdapter::from_dataset(&dataset);
        assert!(matches!(
            bst_sweep(&mut oracle, &dataset, &[0.5, 1.0]),
            Err(EvalError::InvalidThreshold(_))
        ));
    }

    #[test]
    fn cross_model_rows_are_deterministic() {
        let dataset = mock_dataset(8, 11);
        let mut oracle = LabelOracleAdapter::from_dataset(&dataset);
        let rows =
            cross_model_report(&mut oracle, &[("alpha", &dataset), ("beta", &dataset)]).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].mse, rows[1].mse);
        assert_eq!(rows[0].acc_within_015, rows[1].acc_within_015);
        assert_eq!(rows[0].generator, "alpha");
        assert_eq!(rows[1].generator, "beta");
        // The oracle predicts the labels themselves.
        assert_eq!(rows[0].mse, 0.0);
        assert_eq!(rows[0].acc_within_015, 1.0);
    }

    #[test]
    fn evaluate_model_produces_a_complete_report() {
        let dataset = mock_dataset(10, 13);
        let config = DetectorConfig {
            d_model: 32,
            n_heads: 2,
            ffn_dim: 64,
            epochs: 3,
            batch_size: 4,
            ..DetectorConfig::tiny(13)
        };
        let (mut model, _) = train(&dataset, &config, &TrainOptions::overfit()).unwrap();
        let (report, scatter) = evaluate_model(&mut model, &dataset, &[0.3, 0.5, 0.7]).unwrap();
        assert_eq!(report.record_count, 10);
        assert_eq!(scatter.len(), 10);
        assert!(report.mse >= 0.0);
        assert!((0.0..=1.0).contains(&report.acc_within_015));
        assert!((0.0..=1.0).contains(&report.token_acc));
        assert!((0.0..=1.0).contains(&report.token_f1));
        assert_eq!(report.sweep.len(), 3);
        let markdown = report.to_markdown();
        assert!(markdown.contains("| MSE |"));
        assert!(markdown.contains("## Threshold sweep"));
        let json = serde_json::to_string(&report).unwrap();
        let back: EvalReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.mse, report.mse);
        let csv = scatter_csv(&scatter);
        assert_eq!(csv.lines().count(), 11);
        assert!(csv.starts_with("label,prediction\n"));
    }
}
