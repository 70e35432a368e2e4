use serde::{Deserialize, Serialize};

use crate::RiskClass;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Records scoring at or above this value are called positive.
    pub threshold: f64,
}

/// One-vs-rest ROC curve of one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRoc {
    pub class: RiskClass,
    /// From (0, 0) to (1, 1); empty when the class has no positives or no negatives.
    pub points: Vec<RocPoint>,
    /// `None` when the class has no positives or no negatives.
    pub auc: Option<f64>,
    /// DeLong variance of the AUC.
    pub auc_variance: Option<f64>,
    pub support: usize,
}

/// Count of `negatives` strictly below and equal to `x`; `negatives` sorted.
fn below_and_equal(negatives: &[f64], x: f64) -> (usize, usize) {
    let below = negatives.partition_point(|v| *v < x);
    let upto = negatives.partition_point(|v| *v <= x);
    (below, upto - below)
}

/// Mann-Whitney statistic as twice the concordant-pair count, ties counting
/// one. Exact integer arithmetic.
pub fn mann_whitney_half_count(positives: &[f64], negatives: &[f64]) -> u64 {
    let mut neg = negatives.to_vec();
    neg.sort_by(f64::total_cmp);
    positives
        .iter()
        .map(|&x| {
            let (below, equal) = below_and_equal(&neg, x);
            2 * below as u64 + equal as u64
        })
        .sum()
}

/// Area under the ROC curve; `None` unless both groups are non-empty.
pub fn auc(positives: &[f64], negatives: &[f64]) -> Option<f64> {
    if positives.is_empty() || negatives.is_empty() {
        return None;
    }
    let pairs = 2 * positives.len() as u64 * negatives.len() as u64;
    Some(mann_whitney_half_count(positives, negatives) as f64 / pairs as f64)
}

/// DeLong placement values: for each positive, the share of negatives it
/// outranks; for each negative, the share of positives outranking it.
pub(crate) fn placements(positives: &[f64], negatives: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut neg = negatives.to_vec();
    neg.sort_by(f64::total_cmp);
    let mut pos = positives.to_vec();
    pos.sort_by(f64::total_cmp);
    let v10 = positives
        .iter()
        .map(|&x| {
            let (below, equal) = below_and_equal(&neg, x);
            (below as f64 + 0.5 * equal as f64) / neg.len() as f64
        })
        .collect();
    let v01 = negatives
        .iter()
        .map(|&y| {
            let above = pos.len() - pos.partition_point(|v| *v <= y);
            let equal = pos.partition_point(|v| *v <= y) - pos.partition_point(|v| *v < y);
            (above as f64 + 0.5 * equal as f64) / pos.len() as f64
        })
        .collect();
    (v10, v01)
}

pub(crate) fn sample_covariance(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    if n < 2 {
        return 0.0;
    }
    let ma = a.iter().sum::<f64>() / n as f64;
    let mb = b.iter().sum::<f64>() / n as f64;
    a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / (n - 1) as f64
}

/// DeLong variance of one AUC estimate.
pub fn auc_variance(positives: &[f64], negatives: &[f64]) -> Option<f64> {
    if positives.is_empty() || negatives.is_empty() {
        return None;
    }
    let (v10, v01) = placements(positives, negatives);
    Some(sample_covariance(&v10, &v10) / v10.len() as f64 + sample_covariance(&v01, &v01) / v01.len() as f64)
}

fn curve(positives: &[f64], negatives: &[f64]) -> Vec<RocPoint> {
    if positives.is_empty() || negatives.is_empty() {
        return Vec::new();
    }
    let mut thresholds: Vec<f64> = positives.iter().chain(negatives).copied().collect();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    let (m, n) = (positives.len() as f64, negatives.len() as f64);
    let mut points = vec![RocPoint { fpr: 0.0, tpr: 0.0, threshold: f64::INFINITY }];
    for t in thresholds {
        let tp = positives.iter().filter(|s| **s >= t).count() as f64;
        let fp = negatives.iter().filter(|s| **s >= t).count() as f64;
        points.push(RocPoint { fpr: fp / n, tpr: tp / m, threshold: t });
    }
    points
}

/// One-vs-rest ROC per class. `scores[r][c]` is record `r`'s score for class
/// `c + 1`.
pub fn per_class_roc(truth: &[RiskClass], scores: &[Vec<f64>], k: usize) -> Vec<ClassRoc> {
    assert_eq!(truth.len(), scores.len(), "one score row per record");
    (0..k)
        .map(|c| {
            let class = RiskClass::from_index(c);
            let (mut pos, mut neg) = (Vec::new(), Vec::new());
            for (t, row) in truth.iter().zip(scores) {
                let s = row.get(c).copied().unwrap_or(0.0);
                if *t == class { pos.push(s) } else { neg.push(s) }
            }
            ClassRoc {
                class,
                points: curve(&pos, &neg),
                auc: auc(&pos, &neg),
                auc_variance: auc_variance(&pos, &neg),
                support: pos.len(),
            }
        })
        .collect()
}

/// Scores that put all weight on the predicted class.
pub fn indicator_scores(predictions: &[RiskClass], k: usize) -> Vec<Vec<f64>> {
    predictions
        .iter()
        .map(|p| (0..k).map(|c| if c == p.index() { 1.0 } else { 0.0 }).collect())
        .collect()
}
