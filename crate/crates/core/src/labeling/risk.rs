use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::cluster::ClusterModel;
use super::LabelingError;
use crate::cohort::PatientRecord;
use crate::{Outcome, RiskClass};

/// Outcome-probability band attached to a risk class. `upper` is open; `None`
/// marks the unbounded top band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityBand {
    pub lower: f64,
    pub upper: Option<f64>,
}

fn percent(p: f64) -> String {
    let v = (p * 1000.0).round() / 10.0;
    format!("{v}%")
}

impl ProbabilityBand {
    /// `"<10%"`, `"10 - 20%"`, `">40%"`.
    pub fn label(&self) -> String {
        match self.upper {
            Some(upper) if self.lower <= 0.0 => format!("<{}", percent(upper)),
            Some(upper) => {
                let lower = percent(self.lower);
                format!("{} - {}", lower.trim_end_matches('%'), percent(upper))
            }
            None => format!(">{}", percent(self.lower)),
        }
    }

    /// Band midpoint; the open top band is closed at 1.
    pub fn midpoint(&self) -> f64 {
        (self.lower + self.upper.unwrap_or(1.0)) / 2.0
    }
}

/// Probability bands for `k` classes: fixed 10% steps for `k = 5`, equal
/// widths of `1/k` otherwise. The top band is open.
pub fn probability_bands(k: usize) -> Vec<ProbabilityBand> {
    let edges: Vec<f64> = if k == 5 {
        vec![0.0, 0.1, 0.2, 0.3, 0.4]
    } else {
        (0..k).map(|i| i as f64 / k as f64).collect()
    };
    (0..k)
        .map(|i| ProbabilityBand { lower: edges[i], upper: edges.get(i + 1).copied() })
        .collect()
}

/// Display name of a class, e.g. `"Intermediate - High"` for class 4 of 5.
pub fn category_name(class: RiskClass, k: usize) -> String {
    const FIVE: [&str; 5] = ["Low", "Low - Intermediate", "Intermediate", "Intermediate - High", "High"];
    if k == 5 {
        FIVE[class.index()].to_string()
    } else {
        format!("Class {class}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EventRate {
    pub events: usize,
    pub n: usize,
}

impl EventRate {
    pub fn mean(&self) -> f64 {
        if self.n == 0 { 0.0 } else { self.events as f64 / self.n as f64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub class: RiskClass,
    pub cluster: usize,
    pub name: String,
    pub band: ProbabilityBand,
    pub overall: EventRate,
    pub per_cohort: BTreeMap<String, EventRate>,
}

/// Ordinal risk classes for one outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskLabeling {
    pub outcome: Outcome,
    pub feature_set: String,
    pub k: usize,
    /// Risk class per cluster index.
    pub class_of_cluster: Vec<RiskClass>,
    pub class_of: BTreeMap<String, RiskClass>,
    pub classes: Vec<ClassSummary>,
    /// Records left out because the outcome was unknown.
    pub excluded: Vec<String>,
}

impl RiskLabeling {
    pub fn band(&self, class: RiskClass) -> Option<ProbabilityBand> {
        self.classes.get(class.index()).map(|c| c.band)
    }
}

/// Orders clusters by observed event rate (ties keep cluster order) and
/// numbers them `1..=k`. `records` must be the clustered records.
pub fn derive_risk_classes(
    model: &ClusterModel,
    records: &[PatientRecord],
    outcome: Outcome,
    feature_set: &str,
) -> Result<RiskLabeling, LabelingError> {
    let k = model.k;
    let mut overall = vec![EventRate::default(); k];
    let mut per_cohort: Vec<BTreeMap<String, EventRate>> = vec![BTreeMap::new(); k];
    let mut excluded = Vec::new();
    let mut known = Vec::new();
    for record in records {
        let cluster = model
            .cluster_of(&record.record_id)
            .ok_or_else(|| LabelingError::UnknownRecord(record.record_id.clone()))?;
        let Some(event) = record.outcome(outcome) else {
            excluded.push(record.record_id.clone());
            continue;
        };
        for rate in [&mut overall[cluster], per_cohort[cluster].entry(record.cohort_id.clone()).or_default()] {
            rate.n += 1;
            rate.events += usize::from(event);
        }
        known.push((record.record_id.clone(), cluster));
    }
    if let Some(empty) = overall.iter().position(|r| r.n == 0) {
        return Err(LabelingError::EmptyCluster(empty));
    }
    let mut order: Vec<usize> = (0..k).collect();
    // Compare events/n exactly by cross-multiplying.
    order.sort_by(|&a, &b| {
        (overall[a].events * overall[b].n).cmp(&(overall[b].events * overall[a].n)).then(a.cmp(&b))
    });
    let mut class_of_cluster = vec![RiskClass(0); k];
    for (rank, &cluster) in order.iter().enumerate() {
        class_of_cluster[cluster] = RiskClass::from_index(rank);
    }
    let bands = probability_bands(k);
    let classes = order
        .iter()
        .enumerate()
        .map(|(rank, &cluster)| {
            let class = RiskClass::from_index(rank);
            ClassSummary {
                class,
                cluster,
                name: category_name(class, k),
                band: bands[rank],
                overall: overall[cluster],
                per_cohort: per_cohort[cluster].clone(),
            }
        })
        .collect();
    let class_of = known.into_iter().map(|(id, c)| (id, class_of_cluster[c])).collect();
    Ok(RiskLabeling {
        outcome,
        feature_set: feature_set.to_string(),
        k,
        class_of_cluster,
        class_of,
        classes,
        excluded,
    })
}
