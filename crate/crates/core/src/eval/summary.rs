use serde::{Deserialize, Serialize};

use super::ci::{confidence_interval, CiKind};
use super::roc::ClassRoc;
use crate::RiskClass;

/// A summary value with its 95% half-width; both absent when undefined.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Metric {
    pub value: Option<f64>,
    pub ci: Option<f64>,
}

impl Metric {
    /// `"0.875 ± 0.041"`, or `"n/a"`.
    pub fn display(&self) -> String {
        match (self.value, self.ci) {
            (Some(v), Some(ci)) => format!("{v:.3} ± {ci:.3}"),
            (Some(v), None) => format!("{v:.3}"),
            _ => "n/a".to_string(),
        }
    }
}

/// One-vs-rest confusion-matrix metrics of one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: RiskClass,
    pub support: usize,
    pub accuracy: f64,
    /// `None` without positives.
    pub sensitivity: Option<f64>,
    /// `None` without negatives.
    pub specificity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n: usize,
    pub per_class: Vec<ClassRoc>,
    pub class_metrics: Vec<ClassMetrics>,
    pub auc: Metric,
    pub accuracy: Metric,
    pub sensitivity: Metric,
    pub specificity: Metric,
    /// How the half-widths were computed.
    pub ci_method: String,
}

pub const CI_METHOD: &str = "normal approximation for proportions; DeLong variance for AUC";

fn weighted(items: impl Iterator<Item = (usize, Option<f64>)>) -> Option<f64> {
    let (mut sum, mut weight) = (0.0, 0.0);
    for (support, value) in items {
        if support == 0 {
            continue;
        }
        let v = value?;
        sum += support as f64 * v;
        weight += support as f64;
    }
    (weight > 0.0).then(|| sum / weight)
}

/// Support-weighted averages of per-class AUC, accuracy, sensitivity and
/// specificity. A summary is absent when any supported class lacks the value.
pub fn weighted_summary(per_class: &[ClassRoc], predictions: &[RiskClass], truth: &[RiskClass]) -> EvalReport {
    assert_eq!(predictions.len(), truth.len(), "one prediction per record");
    let n = truth.len();
    let class_metrics: Vec<ClassMetrics> = per_class
        .iter()
        .map(|roc| {
            let c = roc.class;
            let (mut tp, mut fp, mut fn_, mut tn) = (0usize, 0usize, 0usize, 0usize);
            for (p, t) in predictions.iter().zip(truth) {
                match (*p == c, *t == c) {
                    (true, true) => tp += 1,
                    (true, false) => fp += 1,
                    (false, true) => fn_ += 1,
                    (false, false) => tn += 1,
                }
            }
            ClassMetrics {
                class: c,
                support: tp + fn_,
                accuracy: if n == 0 { 0.0 } else { (tp + tn) as f64 / n as f64 },
                sensitivity: (tp + fn_ > 0).then(|| tp as f64 / (tp + fn_) as f64),
                specificity: (tn + fp > 0).then(|| tn as f64 / (tn + fp) as f64),
            }
        })
        .collect();

    let auc_value = weighted(per_class.iter().map(|r| (r.support, r.auc)));
    let auc_ci = auc_value.map(|_| {
        let total: usize = per_class.iter().filter(|r| r.auc.is_some()).map(|r| r.support).sum();
        let variance: f64 = per_class
            .iter()
            .filter_map(|r| Some((r.support as f64 / total as f64, r.auc_variance?)))
            .map(|(w, v)| w * w * v)
            .sum();
        confidence_interval(0.0, n, CiKind::Auc { variance }).half_width
    });
    let proportion = |value: Option<f64>| Metric {
        value,
        ci: value.map(|v| confidence_interval(v, n, CiKind::Proportion).half_width),
    };
    EvalReport {
        n,
        auc: Metric { value: auc_value, ci: auc_ci },
        accuracy: proportion(weighted(class_metrics.iter().map(|m| (m.support, Some(m.accuracy))))),
        sensitivity: proportion(weighted(class_metrics.iter().map(|m| (m.support, m.sensitivity)))),
        specificity: proportion(weighted(class_metrics.iter().map(|m| (m.support, m.specificity)))),
        per_class: per_class.to_vec(),
        class_metrics,
        ci_method: CI_METHOD.to_string(),
    }
}
