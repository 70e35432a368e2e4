use serde::{Deserialize, Serialize};

use super::{Cohort, FeatureKind};

/// How implausible values are detected. Removed values become absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum OutlierRule {
    /// Outside the manifest's valid range, or not a declared category code.
    #[default]
    Range,
    /// More than `threshold` standard deviations from the mean of the feature's
    /// other present values (leave-one-out). Continuous features only.
    ZScore { threshold: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierRemoval {
    pub record_id: String,
    pub feature: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierReport {
    pub rule: OutlierRule,
    pub removals: Vec<OutlierRemoval>,
}

/// Applies `rule` to every feature of the cohort's set. Decisions are made on
/// the input values, so removing one outlier never unmasks another.
pub fn remove_outliers(cohort: &Cohort, rule: OutlierRule) -> (Cohort, OutlierReport) {
    let mut out = cohort.clone();
    let mut removals = Vec::new();
    for spec in &cohort.feature_set.features {
        let flagged: Vec<usize> = match rule {
            OutlierRule::Range => cohort
                .records
                .iter()
                .enumerate()
                .filter(|(_, r)| r.value(&spec.name).is_some_and(|v| !spec.admits(v)))
                .map(|(i, _)| i)
                .collect(),
            OutlierRule::ZScore { threshold } => {
                if spec.kind == FeatureKind::Categorical {
                    continue;
                }
                let present: Vec<(usize, f64)> = cohort
                    .records
                    .iter()
                    .enumerate()
                    .filter_map(|(i, r)| r.value(&spec.name).map(|v| (i, v)))
                    .collect();
                let values: Vec<f64> = present.iter().map(|p| p.1).collect();
                leave_one_out_flags(&values, threshold)
                    .into_iter()
                    .zip(&present)
                    .filter(|(flag, _)| *flag)
                    .map(|(_, p)| p.0)
                    .collect()
            }
        };
        for i in flagged {
            let record = &mut out.records[i];
            let value = record.values.remove(&spec.name).expect("flagged values are present");
            removals.push(OutlierRemoval {
                record_id: record.record_id.clone(),
                feature: spec.name.clone(),
                value,
            });
        }
    }
    (out, OutlierReport { rule, removals })
}

fn leave_one_out_flags(values: &[f64], threshold: f64) -> Vec<bool> {
    let n = values.len();
    if n < 3 {
        return vec![false; n];
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let m2: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    values
        .iter()
        .map(|&x| {
            let others_mean = (nf * mean - x) / (nf - 1.0);
            let others_m2 = (m2 - (x - mean).powi(2) * nf / (nf - 1.0)).max(0.0);
            let sd = (others_m2 / (nf - 2.0)).sqrt();
            let scale = others_mean.abs().max(1.0);
            if sd <= 1e-9 * scale {
                (x - others_mean).abs() > 1e-9 * scale
            } else {
                ((x - others_mean) / sd).abs() > threshold
            }
        })
        .collect()
}
