use std::collections::BTreeMap;

use super::TrainError;
use crate::cohort::{FeatureSet, FeatureSpec, PatientRecord};
use crate::{Outcome, RiskClass};

/// Records as rows of optional values in feature-set order, with their labels.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    pub features: Vec<FeatureSpec>,
    pub feature_set: String,
    pub outcome: Outcome,
    pub record_ids: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    pub labels: Vec<RiskClass>,
    /// Number of classes.
    pub k: usize,
}

impl TrainingSet {
    /// Keeps the records that have a label, in record order.
    pub fn from_records(
        records: &[PatientRecord],
        labels: &BTreeMap<String, RiskClass>,
        feature_set: &FeatureSet,
        outcome: Outcome,
        k: usize,
    ) -> Result<Self, TrainError> {
        let mut set = TrainingSet::empty(feature_set, outcome, k);
        for record in records {
            if let Some(&label) = labels.get(&record.record_id) {
                set.push(record, label)?;
            }
        }
        Ok(set)
    }

    pub fn empty(feature_set: &FeatureSet, outcome: Outcome, k: usize) -> Self {
        TrainingSet {
            features: feature_set.features.clone(),
            feature_set: feature_set.name.clone(),
            outcome,
            record_ids: Vec::new(),
            rows: Vec::new(),
            labels: Vec::new(),
            k,
        }
    }

    pub fn push(&mut self, record: &PatientRecord, label: RiskClass) -> Result<(), TrainError> {
        if label.0 == 0 || usize::from(label.0) > self.k {
            return Err(TrainError::LabelOutOfRange { label: label.0, k: self.k });
        }
        self.record_ids.push(record.record_id.clone());
        self.rows.push(self.features.iter().map(|f| record.value(&f.name)).collect());
        self.labels.push(label);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn record(&self, i: usize) -> PatientRecord {
        let mut r = PatientRecord::new(self.record_ids[i].clone(), "");
        for (spec, v) in self.features.iter().zip(&self.rows[i]) {
            if let Some(v) = v {
                r.values.insert(spec.name.clone(), *v);
            }
        }
        r
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> TrainingSet {
        TrainingSet {
            features: self.features.clone(),
            feature_set: self.feature_set.clone(),
            outcome: self.outcome,
            record_ids: indices.iter().map(|&i| self.record_ids[i].clone()).collect(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            k: self.k,
        }
    }
}
