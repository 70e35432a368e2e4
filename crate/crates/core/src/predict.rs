//! Scoring one patient: value parsing, evaluation and the response shape
//! shared by the command line and the HTTP service.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cohort::FeatureSet;
use crate::labeling::{probability_bands, ProbabilityBand};
use crate::model::Document;
use crate::mvdd::{Clause, EvalError, PhenotypeStyle, Substitution};
use crate::{Outcome, SCHEMA_VERSION};

#[derive(Debug, Error, PartialEq)]
pub enum PredictError {
    #[error("`{0}` is not a feature of the model's feature set")]
    UnknownFeature(String),
    #[error("cannot read value `{value}` for `{feature}`")]
    MalformedValue { feature: String, value: String },
    #[error("cannot score: no value for any of {}", features.join(", "))]
    Indeterminate { features: Vec<String> },
    #[error("model cannot score this record: {0}")]
    Unscorable(String),
    #[error("documents of kind `{0}` do not predict")]
    NotAModel(String),
}

/// A request value: a number, or a category label / numeric string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawValue {
    Number(f64),
    Text(String),
    Null,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictRequest {
    pub feature_set: String,
    pub outcome: Outcome,
    #[serde(default)]
    pub values: BTreeMap<String, RawValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictResponse {
    pub schema_version: u32,
    pub feature_set: String,
    pub outcome: Outcome,
    pub class: u8,
    pub score_text: String,
    pub probability_range: String,
    pub probability_band: ProbabilityBand,
    /// Empty for models without phenotypes.
    pub phenotype_text: String,
    pub phenotype_clauses: Vec<Clause>,
    pub substitutions: Vec<Substitution>,
    pub class_scores: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Resolves request keys (case-insensitive) and values against the manifest.
/// Nulls are absent values; out-of-range values are kept with a warning.
pub fn parse_values(
    feature_set: &FeatureSet,
    raw: &BTreeMap<String, RawValue>,
) -> Result<(BTreeMap<String, f64>, Vec<String>), PredictError> {
    let mut values = BTreeMap::new();
    let mut warnings = Vec::new();
    for (key, value) in raw {
        let spec = feature_set.find_ignore_case(key).ok_or_else(|| PredictError::UnknownFeature(key.clone()))?;
        let malformed = |v: String| PredictError::MalformedValue { feature: spec.name.clone(), value: v };
        let v = match value {
            RawValue::Null => continue,
            RawValue::Number(v) if v.is_finite() => *v,
            RawValue::Number(v) => return Err(malformed(v.to_string())),
            RawValue::Text(t) if t.trim().is_empty() => continue,
            RawValue::Text(t) => spec.parse_value(t).ok_or_else(|| malformed(t.clone()))?,
        };
        if !spec.admits(v) {
            warnings.push(match spec.valid_range {
                Some([lo, hi]) => format!("{} = {v} is outside the expected range [{lo}, {hi}]", spec.name),
                None => format!("{} = {v} is not a declared category", spec.name),
            });
        }
        values.insert(spec.name.clone(), v);
    }
    Ok((values, warnings))
}

/// Scores parsed values with any predicting document.
pub fn predict_values(
    document: &Document,
    values: &BTreeMap<String, f64>,
    warnings: Vec<String>,
) -> Result<PredictResponse, PredictError> {
    let k = document.k();
    let band_of = |class: u8| probability_bands(k)[usize::from(class) - 1];
    let response = |class: u8, text: String, clauses, substitutions, class_scores| {
        let band = band_of(class);
        PredictResponse {
            schema_version: SCHEMA_VERSION,
            feature_set: document.feature_set().to_string(),
            outcome: document.outcome(),
            class,
            score_text: format!("Score {class}"),
            probability_range: band.label(),
            probability_band: band,
            phenotype_text: text,
            phenotype_clauses: clauses,
            substitutions,
            class_scores,
            warnings,
        }
    };
    match document {
        Document::Mvdd(m) => match m.evaluate_values(values) {
            Ok(e) => Ok(response(
                e.class.0,
                e.phenotype.expression(PhenotypeStyle::Unicode),
                e.phenotype.clauses.clone(),
                e.phenotype.used_substitution.clone(),
                e.distribution,
            )),
            Err(EvalError::IndeterminatePrediction { features }) => Err(PredictError::Indeterminate { features }),
            Err(e) => Err(PredictError::Unscorable(e.to_string())),
        },
        Document::Baseline(b) => {
            let p = b.predict_row(&b.row(|f| values.get(f).copied()));
            Ok(response(p.class.0, String::new(), Vec::new(), Vec::new(), p.scores))
        }
        Document::Labeling(_) => Err(PredictError::NotAModel(document.kind().to_string())),
    }
}

pub fn predict_request(
    document: &Document,
    feature_set: &FeatureSet,
    raw: &BTreeMap<String, RawValue>,
) -> Result<PredictResponse, PredictError> {
    let (values, warnings) = parse_values(feature_set, raw)?;
    predict_values(document, &values, warnings)
}

/// Plain-text rendering used by the command line.
pub fn render_text(r: &PredictResponse) -> String {
    let mut out = format!("{} ({})\n", r.score_text, r.probability_range);
    if !r.phenotype_text.is_empty() {
        out.push_str(&format!("{} = {}\n", r.phenotype_text, r.score_text));
    }
    for s in &r.substitutions {
        out.push_str(&format!(
            "substituted {} for missing {} (assuming {})\n",
            s.substitute,
            s.missing,
            s.assumed.text(PhenotypeStyle::Unicode)
        ));
    }
    for w in &r.warnings {
        out.push_str(&format!("warning: {w}\n"));
    }
    out
}
