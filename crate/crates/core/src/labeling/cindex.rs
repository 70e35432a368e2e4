use super::{EmbeddedPoint, LabelingError};

fn distance(a: &EmbeddedPoint, b: &EmbeddedPoint) -> f64 {
    ((a.coords[0] - b.coords[0]).powi(2) + (a.coords[1] - b.coords[1]).powi(2)).sqrt()
}

/// Hubert and Levin C-index, `(S - S_min) / (S_max - S_min)`. Lower is better.
/// Returns 0 when every pairwise distance is equal.
pub fn c_index(points: &[EmbeddedPoint], assignments: &[usize]) -> Result<f64, LabelingError> {
    assert_eq!(points.len(), assignments.len(), "one assignment per point");
    let clusters = assignments.iter().collect::<std::collections::BTreeSet<_>>().len();
    let n = points.len();
    let mut within = 0.0;
    let mut pairs = 0usize;
    let mut all = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let d = distance(&points[i], &points[j]);
            all.push(d);
            if assignments[i] == assignments[j] {
                within += d;
                pairs += 1;
            }
        }
    }
    if clusters < 2 || pairs == 0 {
        return Err(LabelingError::DegenerateClustering);
    }
    all.sort_by(f64::total_cmp);
    let s_min: f64 = all[..pairs].iter().sum();
    let s_max: f64 = all[all.len() - pairs..].iter().sum();
    if s_max == s_min {
        return Ok(0.0);
    }
    Ok(((within - s_min) / (s_max - s_min)).clamp(0.0, 1.0))
}
