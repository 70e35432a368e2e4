use serde::{Deserialize, Serialize};

use super::pca::Projection;
use crate::cohort::PatientRecord;
use crate::RiskClass;

/// Labels records that were not part of the pooled clustering: impute with the
/// training means, project, and take the nearest class centroid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentroidAssigner {
    pub columns: Vec<String>,
    pub means: Vec<f64>,
    pub projection: Projection,
    /// Embedded centroid per class, indexed by `RiskClass::index`.
    pub centroids: Vec<[f64; 2]>,
}

impl CentroidAssigner {
    pub fn embed(&self, record: &PatientRecord) -> [f64; 2] {
        let row: Vec<f64> = self
            .columns
            .iter()
            .zip(&self.means)
            .map(|(name, mean)| record.value(name).unwrap_or(*mean))
            .collect();
        self.projection.transform(&row)
    }

    /// Nearest centroid; ties go to the lower class.
    pub fn assign(&self, record: &PatientRecord) -> RiskClass {
        let p = self.embed(record);
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, c) in self.centroids.iter().enumerate() {
            let d = (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        RiskClass::from_index(best)
    }
}
