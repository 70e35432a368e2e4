//! Prediction metrics: one-vs-rest ROC, weighted summaries, confidence
//! intervals, calibration and paired AUC comparison.

mod calibration;
mod ci;
mod delong;
mod report;
mod roc;
mod summary;

use thiserror::Error;

pub use calibration::{calibration, CalibrationBin, CalibrationTable, BINS};
pub use ci::{bootstrap_auc_ci, confidence_interval, weighted_auc, CiKind, HalfWidth, Z_95};
pub use delong::{delong_multiclass, delong_test, DeLongResult, MulticlassDeLong};
pub use report::{
    calibration_csv, class_table_csv, comparison_csv, comparison_table, format_p_value, performance_csv,
    performance_table, roc_points_csv, ComparisonRow, PerformanceRow,
};
pub use roc::{auc, auc_variance, indicator_scores, mann_whitney_half_count, per_class_roc, ClassRoc, RocPoint};
pub use summary::{weighted_summary, ClassMetrics, EvalReport, Metric, CI_METHOD};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("outcomes contain a single class")]
    DegenerateOutcomes,
    #[error("score and outcome vectors differ in length")]
    LengthMismatch,
}

/// Evaluates hard predictions with optional per-class scores. Without scores
/// the 0/1 indicator of the predicted class is used.
pub fn evaluate_predictions(
    truth: &[crate::RiskClass],
    predictions: &[crate::RiskClass],
    scores: Option<&[Vec<f64>]>,
    k: usize,
) -> EvalReport {
    let indicator;
    let scores = match scores {
        Some(s) => s,
        None => {
            indicator = indicator_scores(predictions, k);
            &indicator
        }
    };
    weighted_summary(&per_class_roc(truth, scores, k), predictions, truth)
}
