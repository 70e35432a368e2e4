//! Cohort data: sparse patient records, file ingest and preprocessing.

mod derive;
mod io;
mod manifest;
mod outliers;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Outcome;

pub use derive::derive_noninvasive_hemodynamics;
pub use io::{
    load_cohort, read_cohort, split_timepoints, write_cohort, IngestReport, RawRow, SchemaOptions,
};
pub use manifest::{Category, FeatureKind, FeatureSet, FeatureSpec, BUILTIN_FEATURE_SETS};
pub use outliers::{remove_outliers, OutlierRemoval, OutlierReport, OutlierRule};

#[derive(Debug, Error)]
pub enum CohortError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid manifest: {0}")]
    Manifest(String),
    #[error("column `{0}` is not in the feature set or outcome list")]
    UnknownColumn(String),
    #[error("missing outcome column `{0}`")]
    MissingOutcomeColumn(String),
    #[error("row {row}, column `{column}`: cannot parse `{value}`")]
    MalformedNumber { row: usize, column: String, value: String },
    #[error("duplicate record id `{0}`")]
    DuplicateRecordId(String),
    #[error("malformed cohort file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Timepoint {
    Baseline,
    Discharge,
}

impl Timepoint {
    pub fn name(self) -> &'static str {
        match self {
            Timepoint::Baseline => "baseline",
            Timepoint::Discharge => "discharge",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "baseline" | "b" => Some(Timepoint::Baseline),
            "discharge" | "d" => Some(Timepoint::Discharge),
            _ => None,
        }
    }
}

/// One patient at one timepoint. Absent features are simply missing from `values`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatientRecord {
    pub record_id: String,
    pub cohort_id: String,
    pub timepoint: Timepoint,
    pub values: BTreeMap<String, f64>,
    pub outcomes: BTreeMap<Outcome, bool>,
}

impl PatientRecord {
    pub fn new(record_id: impl Into<String>, cohort_id: impl Into<String>) -> Self {
        PatientRecord {
            record_id: record_id.into(),
            cohort_id: cohort_id.into(),
            timepoint: Timepoint::Baseline,
            values: BTreeMap::new(),
            outcomes: BTreeMap::new(),
        }
    }

    pub fn with_value(mut self, feature: &str, value: f64) -> Self {
        self.values.insert(feature.to_string(), value);
        self
    }

    pub fn with_outcome(mut self, outcome: Outcome, event: bool) -> Self {
        self.outcomes.insert(outcome, event);
        self
    }

    pub fn value(&self, feature: &str) -> Option<f64> {
        self.values.get(feature).copied()
    }

    pub fn outcome(&self, outcome: Outcome) -> Option<bool> {
        self.outcomes.get(&outcome).copied()
    }
}

/// Restricts a record's values to the features of `feature_set`.
pub fn project(record: &PatientRecord, feature_set: &FeatureSet) -> PatientRecord {
    let mut out = record.clone();
    out.values.retain(|name, _| feature_set.contains(name));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cohort {
    pub cohort_id: String,
    pub feature_set: FeatureSet,
    pub records: Vec<PatientRecord>,
}

impl Cohort {
    pub fn new(cohort_id: impl Into<String>, feature_set: FeatureSet, records: Vec<PatientRecord>) -> Self {
        Cohort { cohort_id: cohort_id.into(), feature_set, records }
    }

    /// Fraction of (record, feature) slots of the feature set with no value.
    pub fn missing_fraction(&self) -> f64 {
        let slots = self.records.len() * self.feature_set.len();
        if slots == 0 {
            return 0.0;
        }
        let present: usize = self
            .records
            .iter()
            .map(|r| self.feature_set.names().filter(|n| r.values.contains_key(*n)).count())
            .sum();
        (slots - present) as f64 / slots as f64
    }

    /// Projects every record onto `feature_set` and adopts it as the cohort's set.
    pub fn project(&self, feature_set: &FeatureSet) -> Cohort {
        Cohort {
            cohort_id: self.cohort_id.clone(),
            feature_set: feature_set.clone(),
            records: self.records.iter().map(|r| project(r, feature_set)).collect(),
        }
    }

    /// Canonical JSON rendering; identical input gives identical bytes.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("cohorts always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_onto_hemodynamics_keeps_28() {
        let all = FeatureSet::all_features();
        let mut record = PatientRecord::new("r1", "c");
        for (i, name) in all.names().enumerate() {
            record.values.insert(name.to_string(), i as f64);
        }
        record.outcomes.insert(Outcome::DeLvTx, true);
        let projected = project(&record, &FeatureSet::invasive_hemodynamics());
        assert_eq!(projected.values.len(), 28);
        assert_eq!(projected.outcome(Outcome::DeLvTx), Some(true));
    }

    #[test]
    fn projection_identity_and_empty() {
        let set = FeatureSet::invasive_hemodynamics();
        let record = PatientRecord::new("r1", "c").with_value("PAS", 40.0).with_value("PCWP", 20.0);
        assert_eq!(project(&record, &set), record);

        let other = FeatureSet::new("other", vec![FeatureSpec::continuous("Zz", "", 0.0, 1.0)]).unwrap();
        assert!(project(&record, &other).values.is_empty());
    }

    #[test]
    fn missing_fraction_counts_slots() {
        let set = FeatureSet::new(
            "s",
            vec![FeatureSpec::continuous("A", "", 0.0, 10.0), FeatureSpec::continuous("B", "", 0.0, 10.0)],
        )
        .unwrap();
        let records = vec![
            PatientRecord::new("1", "c").with_value("A", 1.0).with_value("B", 2.0),
            PatientRecord::new("2", "c").with_value("A", 1.0),
        ];
        let cohort = Cohort::new("c", set, records);
        assert_eq!(cohort.missing_fraction(), 0.25);
    }
}
