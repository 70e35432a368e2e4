use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::roc::{auc, placements, sample_covariance};
use super::EvalError;
use crate::RiskClass;

/// Paired comparison of two AUCs on the same records. `delta` is first minus second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeLongResult {
    pub auc_a: f64,
    pub auc_b: f64,
    pub delta: f64,
    pub variance: f64,
    pub z: f64,
    pub p_value: f64,
}

/// Two-sided normal p-value. A zero variance gives 1 for no difference and 0
/// otherwise.
pub(crate) fn two_sided(delta: f64, variance: f64) -> (f64, f64) {
    if variance <= 0.0 {
        return if delta == 0.0 { (0.0, 1.0) } else { (delta.signum() * f64::INFINITY, 0.0) };
    }
    let z = delta / variance.sqrt();
    (z, erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0))
}

fn split(scores: &[f64], outcomes: &[bool]) -> (Vec<f64>, Vec<f64>) {
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for (s, y) in scores.iter().zip(outcomes) {
        if *y { pos.push(*s) } else { neg.push(*s) }
    }
    (pos, neg)
}

pub fn delong_test(scores_a: &[f64], scores_b: &[f64], outcomes: &[bool]) -> Result<DeLongResult, EvalError> {
    if scores_a.len() != outcomes.len() || scores_b.len() != outcomes.len() {
        return Err(EvalError::LengthMismatch);
    }
    let (pa, na) = split(scores_a, outcomes);
    let (pb, nb) = split(scores_b, outcomes);
    let (Some(auc_a), Some(auc_b)) = (auc(&pa, &na), auc(&pb, &nb)) else {
        return Err(EvalError::DegenerateOutcomes);
    };
    let (a10, a01) = placements(&pa, &na);
    let (b10, b01) = placements(&pb, &nb);
    let (m, n) = (pa.len() as f64, na.len() as f64);
    let s10 = sample_covariance(&a10, &a10) + sample_covariance(&b10, &b10) - 2.0 * sample_covariance(&a10, &b10);
    let s01 = sample_covariance(&a01, &a01) + sample_covariance(&b01, &b01) - 2.0 * sample_covariance(&a01, &b01);
    let variance = (s10 / m + s01 / n).max(0.0);
    let delta = auc_a - auc_b;
    let (z, p_value) = two_sided(delta, variance);
    Ok(DeLongResult { auc_a, auc_b, delta, variance, z, p_value })
}

/// Support-weighted combination of one-vs-rest DeLong tests. Classes without
/// positives or negatives are skipped; covariance between classes is ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticlassDeLong {
    pub per_class: Vec<Option<DeLongResult>>,
    pub auc_a: f64,
    pub auc_b: f64,
    pub delta: f64,
    pub variance: f64,
    pub z: f64,
    pub p_value: f64,
}

pub fn delong_multiclass(
    truth: &[RiskClass],
    scores_a: &[Vec<f64>],
    scores_b: &[Vec<f64>],
    k: usize,
) -> Result<MulticlassDeLong, EvalError> {
    if scores_a.len() != truth.len() || scores_b.len() != truth.len() {
        return Err(EvalError::LengthMismatch);
    }
    let mut per_class = Vec::with_capacity(k);
    let mut supports = Vec::with_capacity(k);
    for c in 0..k {
        let class = RiskClass::from_index(c);
        let outcomes: Vec<bool> = truth.iter().map(|t| *t == class).collect();
        let a: Vec<f64> = scores_a.iter().map(|r| r.get(c).copied().unwrap_or(0.0)).collect();
        let b: Vec<f64> = scores_b.iter().map(|r| r.get(c).copied().unwrap_or(0.0)).collect();
        per_class.push(delong_test(&a, &b, &outcomes).ok());
        supports.push(outcomes.iter().filter(|o| **o).count() as f64);
    }
    let total: f64 = per_class.iter().zip(&supports).filter(|(r, _)| r.is_some()).map(|(_, s)| s).sum();
    if total == 0.0 {
        return Err(EvalError::DegenerateOutcomes);
    }
    let (mut auc_a, mut auc_b, mut delta, mut variance) = (0.0, 0.0, 0.0, 0.0);
    for (r, s) in per_class.iter().zip(&supports) {
        if let Some(r) = r {
            let w = s / total;
            auc_a += w * r.auc_a;
            auc_b += w * r.auc_b;
            delta += w * r.delta;
            variance += w * w * r.variance;
        }
    }
    let (z, p_value) = two_sided(delta, variance);
    Ok(MulticlassDeLong { per_class, auc_a, auc_b, delta, variance, z, p_value })
}
