//! Versioned JSON documents for trained models and labelings.
//!
//! Every document is an envelope `{"schema_version": 1, "kind": ..., "model": ...}`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::BaselineModel;
use crate::cohort::PatientRecord;
use crate::labeling::{CentroidAssigner, Clustering, LabelingError, RiskLabeling};
use crate::mvdd::Mvdd;
use crate::{Outcome, SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("document schema version {found}, expected {expected}")]
    SchemaVersionMismatch { found: u64, expected: u32 },
    #[error("corrupt document: {0}")]
    CorruptDocument(String),
    #[error("cannot access {path}: {message}")]
    Io { path: String, message: String },
}

/// Risk classes for one outcome plus what is needed to label new records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelingDocument {
    pub labeling: RiskLabeling,
    pub assigner: CentroidAssigner,
    pub c_index: Option<f64>,
    pub elbow_k: usize,
    pub elbow_low_confidence: bool,
}

impl LabelingDocument {
    /// Labels the clustered `records` for `outcome`.
    pub fn from_clustering(
        clustering: &Clustering,
        records: &[PatientRecord],
        outcome: Outcome,
    ) -> Result<Self, LabelingError> {
        let labeling = clustering.label(records, outcome)?;
        Ok(LabelingDocument {
            assigner: clustering.assigner(&labeling),
            labeling,
            c_index: clustering.c_index,
            elbow_k: clustering.elbow.recommended,
            elbow_low_confidence: clustering.elbow.low_confidence,
        })
    }

    /// Stored class of a clustered record, else the nearest centroid.
    pub fn class_of(&self, record: &PatientRecord) -> crate::RiskClass {
        self.labeling.class_of.get(&record.record_id).copied().unwrap_or_else(|| self.assigner.assign(record))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "model", rename_all = "snake_case")]
pub enum Document {
    Mvdd(Mvdd),
    Baseline(BaselineModel),
    Labeling(LabelingDocument),
}

#[derive(Serialize)]
struct EnvelopeRef<'a> {
    schema_version: u32,
    #[serde(flatten)]
    document: &'a Document,
}

#[derive(Deserialize)]
struct Envelope {
    #[serde(flatten)]
    document: Document,
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Mvdd(_) => "mvdd",
            Document::Baseline(_) => "baseline",
            Document::Labeling(_) => "labeling",
        }
    }

    pub fn feature_set(&self) -> &str {
        match self {
            Document::Mvdd(m) => &m.feature_set,
            Document::Baseline(b) => &b.feature_set,
            Document::Labeling(l) => &l.labeling.feature_set,
        }
    }

    pub fn outcome(&self) -> Outcome {
        match self {
            Document::Mvdd(m) => m.outcome,
            Document::Baseline(b) => b.outcome,
            Document::Labeling(l) => l.labeling.outcome,
        }
    }

    pub fn k(&self) -> usize {
        match self {
            Document::Mvdd(m) => m.k,
            Document::Baseline(b) => b.k,
            Document::Labeling(l) => l.labeling.k,
        }
    }

    /// Pretty JSON with a trailing newline. Identical documents give identical bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&EnvelopeRef { schema_version: SCHEMA_VERSION, document: self })
            .expect("documents always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Document, ModelError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ModelError::CorruptDocument(e.to_string()))?;
        let found = value
            .get("schema_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| ModelError::CorruptDocument("missing schema_version".into()))?;
        if found != u64::from(SCHEMA_VERSION) {
            return Err(ModelError::SchemaVersionMismatch { found, expected: SCHEMA_VERSION });
        }
        let envelope: Envelope =
            serde_json::from_value(value).map_err(|e| ModelError::CorruptDocument(e.to_string()))?;
        if let Document::Mvdd(m) = &envelope.document {
            let report = m.validate();
            if !report.is_valid() {
                return Err(ModelError::CorruptDocument(report.to_string()));
            }
        }
        Ok(envelope.document)
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        std::fs::write(path, self.to_json())
            .map_err(|e| ModelError::Io { path: path.display().to_string(), message: e.to_string() })
    }

    pub fn load(path: &Path) -> Result<Document, ModelError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ModelError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mvdd::demo_diagram;

    #[test]
    fn envelope_shape() {
        let json = Document::Mvdd(demo_diagram()).to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["kind"], "mvdd");
        assert!(v["model"]["nodes"].is_array());
    }

    #[test]
    fn round_trip() {
        let doc = Document::Mvdd(demo_diagram());
        let back = Document::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_json(), doc.to_json());
    }

    #[test]
    fn version_mismatch() {
        let json = Document::Mvdd(demo_diagram()).to_json().replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(matches!(
            Document::from_json(&json),
            Err(ModelError::SchemaVersionMismatch { found: 2, expected: 1 })
        ));
    }

    #[test]
    fn corrupt_documents() {
        assert!(matches!(Document::from_json("{"), Err(ModelError::CorruptDocument(_))));
        assert!(matches!(Document::from_json("{\"kind\": \"mvdd\"}"), Err(ModelError::CorruptDocument(_))));
        let mut m = demo_diagram();
        m.root = 99;
        let json = serde_json::json!({"schema_version": 1, "kind": "mvdd", "model": m}).to_string();
        assert!(matches!(Document::from_json(&json), Err(ModelError::CorruptDocument(_))));
    }
}
