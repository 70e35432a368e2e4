use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::roc::per_class_roc;
use crate::RiskClass;

pub const Z_95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CiKind {
    /// Normal approximation `1.96 * sqrt(p (1 - p) / n)`.
    Proportion,
    /// `1.96 * sqrt(variance)` with the DeLong variance.
    Auc { variance: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfWidth {
    pub half_width: f64,
    /// The normal approximation collapses at 0 and 1.
    pub degenerate: bool,
}

/// 95% confidence half-width for a metric.
pub fn confidence_interval(value: f64, n: usize, kind: CiKind) -> HalfWidth {
    match kind {
        CiKind::Proportion => {
            let half_width = Z_95 * (value * (1.0 - value) / n.max(1) as f64).max(0.0).sqrt();
            HalfWidth { half_width, degenerate: value <= 0.0 || value >= 1.0 }
        }
        CiKind::Auc { variance } => {
            HalfWidth { half_width: Z_95 * variance.max(0.0).sqrt(), degenerate: variance <= 0.0 }
        }
    }
}

/// Support-weighted mean AUC over classes with a defined AUC.
pub fn weighted_auc(truth: &[RiskClass], scores: &[Vec<f64>], k: usize) -> Option<f64> {
    let rocs = per_class_roc(truth, scores, k);
    let (mut sum, mut weight) = (0.0, 0.0);
    for roc in &rocs {
        if let Some(a) = roc.auc {
            sum += roc.support as f64 * a;
            weight += roc.support as f64;
        }
    }
    (weight > 0.0).then(|| sum / weight)
}

/// Percentile bootstrap half-width of the weighted AUC: half the distance
/// between the 2.5th and 97.5th percentiles over `reps` resamples.
pub fn bootstrap_auc_ci(truth: &[RiskClass], scores: &[Vec<f64>], k: usize, reps: usize, seed: u64) -> Option<f64> {
    let n = truth.len();
    if n == 0 || reps == 0 {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = Vec::with_capacity(reps);
    let mut t = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    for _ in 0..reps {
        t.clear();
        s.clear();
        for _ in 0..n {
            let i = rng.random_range(0..n);
            t.push(truth[i]);
            s.push(scores[i].clone());
        }
        if let Some(a) = weighted_auc(&t, &s, k) {
            stats.push(a);
        }
    }
    if stats.is_empty() {
        return None;
    }
    stats.sort_by(f64::total_cmp);
    let at = |q: f64| stats[((q * (stats.len() - 1) as f64).round() as usize).min(stats.len() - 1)];
    Some((at(0.975) - at(0.025)) / 2.0)
}
