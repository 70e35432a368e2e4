use serde::{Deserialize, Serialize};

use super::impurity::{impurity_of_counts, Criterion};
use crate::cohort::FeatureSpec;
use crate::RiskClass;

/// Binary partition of a feature's values. Side 0 is the `<=` side of a
/// threshold or the single code of a one-vs-rest split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SplitRule {
    Threshold(f64),
    OneVsRest(i64),
}

impl SplitRule {
    pub fn side(&self, value: f64) -> usize {
        match self {
            SplitRule::Threshold(t) => usize::from(value > *t),
            SplitRule::OneVsRest(code) => usize::from(value != *code as f64),
        }
    }
}

/// Best partition of the present values at one node.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub rule: SplitRule,
    /// Size-weighted child impurity over present records.
    pub impurity: f64,
    /// Class histograms of the present records on each side.
    pub sides: [Vec<f64>; 2],
}

/// Weighted observation: value, class index, weight.
pub type Item = (f64, usize, f64);

pub(crate) fn weighted_impurity(left: &[f64], right: &[f64], criterion: Criterion) -> f64 {
    let wl: f64 = left.iter().sum();
    let wr: f64 = right.iter().sum();
    (wl * impurity_of_counts(left, criterion) + wr * impurity_of_counts(right, criterion)) / (wl + wr)
}

/// Scans midpoints between consecutive distinct values. Both sides must carry
/// at least `min_leaf` weight. The lowest threshold wins ties.
pub fn best_threshold(items: &[Item], k: usize, criterion: Criterion, min_leaf: f64) -> Option<Candidate> {
    let mut sorted = items.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = vec![0.0; k];
    for &(_, c, w) in &sorted {
        total[c] += w;
    }
    let mut left = vec![0.0; k];
    let mut best: Option<Candidate> = None;
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == v {
            left[sorted[i].1] += sorted[i].2;
            i += 1;
        }
        let Some(&(next, _, _)) = sorted.get(i) else { break };
        let right: Vec<f64> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
        let (wl, wr): (f64, f64) = (left.iter().sum(), right.iter().sum());
        if wl < min_leaf || wr < min_leaf {
            continue;
        }
        let score = weighted_impurity(&left, &right, criterion);
        if best.as_ref().is_none_or(|b| score < b.impurity) {
            let mut threshold = v + (next - v) / 2.0;
            if threshold >= next {
                threshold = v;
            }
            best = Some(Candidate { rule: SplitRule::Threshold(threshold), impurity: score, sides: [left.clone(), right] });
        }
    }
    best
}

/// One-vs-rest over the declared codes, lowest code first.
pub fn best_category(items: &[Item], spec: &FeatureSpec, k: usize, criterion: Criterion, min_leaf: f64) -> Option<Candidate> {
    let mut codes: Vec<i64> = spec.categories.iter().map(|c| c.code).collect();
    codes.sort();
    let mut best: Option<Candidate> = None;
    for code in codes {
        let rule = SplitRule::OneVsRest(code);
        let mut sides = [vec![0.0; k], vec![0.0; k]];
        for &(v, c, w) in items {
            sides[rule.side(v)][c] += w;
        }
        let (wl, wr): (f64, f64) = (sides[0].iter().sum(), sides[1].iter().sum());
        if wl < min_leaf || wr < min_leaf || wl <= 0.0 || wr <= 0.0 {
            continue;
        }
        let score = weighted_impurity(&sides[0], &sides[1], criterion);
        if best.as_ref().is_none_or(|b| score < b.impurity) {
            best = Some(Candidate { rule, impurity: score, sides });
        }
    }
    best
}

/// Best threshold for one continuous feature over unit-weight records.
/// Returns `(threshold, weighted child impurity)`.
pub fn best_split(values: &[f64], labels: &[RiskClass], criterion: Criterion) -> Option<(f64, f64)> {
    assert_eq!(values.len(), labels.len(), "one label per value");
    let k = labels.iter().map(|c| c.index() + 1).max().unwrap_or(1);
    let items: Vec<Item> = values.iter().zip(labels).map(|(v, c)| (*v, c.index(), 1.0)).collect();
    best_threshold(&items, k, criterion, 1.0).map(|c| match c.rule {
        SplitRule::Threshold(t) => (t, c.impurity),
        SplitRule::OneVsRest(_) => unreachable!(),
    })
}
