use nalgebra::DMatrix;
use tracing::warn;

use super::LabelingError;
use crate::cohort::{FeatureSet, PatientRecord};

/// Dense, mean-imputed view of a record list.
#[derive(Debug, Clone, PartialEq)]
pub struct Imputed {
    /// Names of the retained columns, in feature-set order.
    pub columns: Vec<String>,
    pub means: Vec<f64>,
    /// Features dropped because no record had a value.
    pub dropped: Vec<String>,
    pub matrix: DMatrix<f64>,
}

/// Fills absent values with the column mean over present values.
pub fn impute_mean(records: &[PatientRecord], feature_set: &FeatureSet) -> Result<Imputed, LabelingError> {
    if records.is_empty() {
        return Err(LabelingError::EmptyCohort);
    }
    let mut columns = Vec::new();
    let mut means = Vec::new();
    let mut dropped = Vec::new();
    for name in feature_set.names() {
        let (sum, count) = records
            .iter()
            .filter_map(|r| r.value(name))
            .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
        if count == 0 {
            warn!(feature = name, "no values present; column dropped before clustering");
            dropped.push(name.to_string());
        } else {
            columns.push(name.to_string());
            means.push(sum / count as f64);
        }
    }
    let matrix = DMatrix::from_fn(records.len(), columns.len(), |i, j| {
        records[i].value(&columns[j]).unwrap_or(means[j])
    });
    Ok(Imputed { columns, means, dropped, matrix })
}
