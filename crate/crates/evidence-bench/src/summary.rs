//! Aggregation of run records into per-(model, estimator) summary rows.
//!
//! Statistics are computed over converged rows only: mean and sample
//! standard deviation of the estimates, average error (truth minus
//! estimate), and root-mean-square error. Rows that never converged still
//! appear, with their failure count and `n/a` statistics.

use crate::registry::estimator_index;
use crate::runner::RunRecord;

/// Aggregated statistics for one (model, estimator) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub model: String,
    pub estimator: String,
    /// Rows with `converged == true`.
    pub converged_count: usize,
    /// Rows with `converged == false`.
    pub failed_count: usize,
    /// Mean of the converged estimates; `None` when nothing converged.
    pub mean: Option<f64>,
    /// Sample standard deviation (n − 1) of the converged estimates;
    /// `None` with fewer than two converged rows.
    pub sd: Option<f64>,
    /// Mean of (truth − estimate) over converged rows.
    pub avg_error: Option<f64>,
    /// Root of the mean squared error over converged rows.
    pub rmse: Option<f64>,
}

/// Groups records by (model, estimator) and computes summary statistics.
///
/// Models keep their first-appearance order; estimators within a model are
/// sorted canonically.
pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut model_order: Vec<&str> = Vec::new();
    for r in records {
        if !model_order.contains(&r.model.as_str()) {
            model_order.push(&r.model);
        }
    }
    let mut rows = Vec::new();
    for model in model_order {
        let mut estimators: Vec<&str> = Vec::new();
        for r in records.iter().filter(|r| r.model == model) {
            if !estimators.contains(&r.estimator.as_str()) {
                estimators.push(&r.estimator);
            }
        }
        estimators.sort_by_key(|e| estimator_index(e).unwrap_or(usize::MAX));
        for estimator in estimators {
            let group: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.model == model && r.estimator == estimator)
                .collect();
            rows.push(summarize_group(model, estimator, &group));
        }
    }
    rows
}

fn summarize_group(model: &str, estimator: &str, group: &[&RunRecord]) -> SummaryRow {
    let converged: Vec<&&RunRecord> = group.iter().filter(|r| r.converged).collect();
    let n = converged.len();
    let failed = group.len() - n;
    let (mean, sd, avg_error, rmse) = if n == 0 {
        (None, None, None, None)
    } else {
        let mean = converged.iter().map(|r| r.estimate).sum::<f64>() / n as f64;
        let sd = if n >= 2 {
            let ss = converged
                .iter()
                .map(|r| (r.estimate - mean).powi(2))
                .sum::<f64>();
            Some((ss / (n - 1) as f64).sqrt())
        } else {
            None
        };
        let avg_error = converged.iter().map(|r| r.error).sum::<f64>() / n as f64;
        let rmse = (converged.iter().map(|r| r.error * r.error).sum::<f64>() / n as f64).sqrt();
        (Some(mean), sd, Some(avg_error), Some(rmse))
    };
    SummaryRow {
        model: model.to_string(),
        estimator: estimator.to_string(),
        converged_count: n,
        failed_count: failed,
        mean,
        sd,
        avg_error,
        rmse,
    }
}

fn cell(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.4}"),
        None => "n/a".to_string(),
    }
}

/// Renders summary rows as an aligned plain-text table.
pub fn render_summary(rows: &[SummaryRow]) -> String {
    let headers = [
        "model", "estimator", "converged", "failed", "mean", "sd", "avg_error", "rmse",
    ];
    let mut table: Vec<[String; 8]> = vec![headers.map(String::from)];
    for r in rows {
        table.push([
            r.model.clone(),
            r.estimator.clone(),
            r.converged_count.to_string(),
            r.failed_count.to_string(),
            cell(r.mean),
            cell(r.sd),
            cell(r.avg_error),
            cell(r.rmse),
        ]);
    }
    let mut widths = [0usize; 8];
    for row in &table {
        for (w, field) in widths.iter_mut().zip(row.iter()) {
            *w = (*w).max(field.len());
        }
    }
    let mut out = String::new();
    for row in &table {
        let mut line = String::new();
        for (field, width) in row.iter().zip(widths.iter()) {
            if !line.is_empty() {
                line.push_str("  ");
            }
            line.push_str(&format!("{field:<width$}"));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(model: &str, estimator: &str, estimate: f64, truth: f64, converged: bool) -> RunRecord {
        RunRecord {
            model: model.into(),
            rep: 0,
            estimator: estimator.into(),
            estimate,
            truth,
            error: truth - estimate,
            converged,
            n_mcmc: 10,
            n_obs: 5,
            seed: 1,
            wall_ms: 0,
            truth_se: None,
        }
    }

    #[test]
    fn hand_computed_statistics() {
        // Estimates 1 and −1 around truth 0: mean 0, sd √2, AE 0, RMSE 1.
        let records = vec![
            record("conjugate_normal", "hybrid", 1.0, 0.0, true),
            record("conjugate_normal", "hybrid", -1.0, 0.0, true),
        ];
        let rows = summarize(&records);
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert_eq!(row.converged_count, 2);
        assert_eq!(row.failed_count, 0);
        assert!((row.mean.unwrap() - 0.0).abs() < 1e-12);
        assert!((row.sd.unwrap() - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!((row.avg_error.unwrap() - 0.0).abs() < 1e-12);
        assert!((row.rmse.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn failed_rows_are_counted_but_not_averaged() {
        let records = vec![
            record("iw_covariance", "bse", -3.0, -3.5, true),
            record("iw_covariance", "bse", f64::NAN, -3.5, false),
        ];
        let rows = summarize(&records);
        assert_eq!(rows[0].converged_count, 1);
        assert_eq!(rows[0].failed_count, 1);
        assert!((rows[0].mean.unwrap() + 3.0).abs() < 1e-12);
        // A single converged row has no sample standard deviation.
        assert!(rows[0].sd.is_none());
    }

    #[test]
    fn all_failed_renders_not_available() {
        let records = vec![record("iw_covariance", "bse", f64::NAN, -3.5, false)];
        let rows = summarize(&records);
        assert_eq!(rows[0].converged_count, 0);
        let text = render_summary(&rows);
        assert!(text.contains("n/a"));
    }

    #[test]
    fn ordering_is_model_first_appearance_then_canonical_estimator() {
        let records = vec![
            record("mvn_ig", "bse", 1.0, 1.0, true),
            record("mvn_ig", "hybrid", 1.0, 1.0, true),
            record("conjugate_normal", "hme", 1.0, 1.0, true),
        ];
        let rows = summarize(&records);
        let keys: Vec<(String, String)> = rows
            .iter()
            .map(|r| (r.model.clone(), r.estimator.clone()))
            .collect();
        assert_eq!(
            keys,
            vec![
                ("mvn_ig".into(), "hybrid".into()),
                ("mvn_ig".into(), "bse".into()),
                ("conjugate_normal".into(), "hme".into()),
            ]
        );
    }

    #[test]
    fn table_has_header_and_four_decimal_cells() {
        let records = vec![record("conjugate_normal", "hybrid", -108.4125, -108.5, true)];
        let text = render_summary(&summarize(&records));
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("model"));
        let row = lines.next().unwrap();
        assert!(row.contains("-108.4125"));
        assert!(row.contains("-0.0875"));
    }
}
