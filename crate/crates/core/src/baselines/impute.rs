use super::BaselineError;
use crate::train::TrainingSet;

/// Median of a non-empty slice; the mean of the two central values for an
/// even count.
pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 { values[n / 2] } else { (values[n / 2 - 1] + values[n / 2]) / 2.0 }
}

/// Dense copy of the rows with every absent value replaced by its column median.
pub fn impute_median(data: &TrainingSet) -> Result<(Vec<Vec<f64>>, Vec<f64>), BaselineError> {
    let d = data.features.len();
    let mut medians = Vec::with_capacity(d);
    for (j, spec) in data.features.iter().enumerate() {
        let mut present: Vec<f64> = data.rows.iter().filter_map(|r| r[j]).collect();
        if present.is_empty() {
            return Err(BaselineError::EmptyFeature(spec.name.clone()));
        }
        medians.push(median(&mut present));
    }
    Ok((fill(&data.rows, &medians), medians))
}

pub fn fill(rows: &[Vec<Option<f64>>], medians: &[f64]) -> Vec<Vec<f64>> {
    rows.iter().map(|r| r.iter().zip(medians).map(|(v, m)| v.unwrap_or(*m)).collect()).collect()
}
