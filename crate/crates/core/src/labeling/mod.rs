//! Ordinal risk labels from unsupervised structure.
//!
//! Records are mean-imputed, standardized and projected onto two principal
//! components. Agglomerative clustering of the embedding gives `k` groups
//! (chosen by the elbow of the within-cluster sum of squares unless fixed),
//! and groups are numbered by their observed event rate for one outcome.

mod assign;
mod cindex;
mod cluster;
mod elbow;
mod impute;
mod pca;
mod risk;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cohort::{FeatureSet, PatientRecord};
use crate::Outcome;

pub use assign::CentroidAssigner;
pub use cindex::c_index;
pub use cluster::{agglomerative_cluster, ClusterModel, Hierarchy, Linkage, Merge};
pub use elbow::{elbow_from_curve, elbow_select_k, Elbow, DEFAULT_K_MAX};
pub use impute::{impute_mean, Imputed};
pub use pca::{pca_project, Projection};
pub use risk::{
    category_name, derive_risk_classes, probability_bands, ClassSummary, EventRate, ProbabilityBand,
    RiskLabeling,
};

#[derive(Debug, Error)]
pub enum LabelingError {
    #[error("no records to label")]
    EmptyCohort,
    #[error("matrix has no variance to project")]
    DegenerateMatrix,
    #[error("cannot form {k} clusters from {n} points")]
    KTooLarge { k: usize, n: usize },
    #[error("C-index needs at least two clusters and one within-cluster pair")]
    DegenerateClustering,
    #[error("cluster {0} has no records with a known outcome")]
    EmptyCluster(usize),
    #[error("record `{0}` was not clustered")]
    UnknownRecord(String),
}

/// A record's position in principal-component space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedPoint {
    pub record_id: String,
    pub coords: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LabelOptions {
    /// Fixed number of clusters; the elbow recommendation when unset.
    pub k: Option<usize>,
    pub k_max: usize,
    pub linkage: Linkage,
    pub standardize: bool,
}

impl Default for LabelOptions {
    fn default() -> Self {
        LabelOptions { k: None, k_max: DEFAULT_K_MAX, linkage: Linkage::Ward, standardize: true }
    }
}

/// Outcome-independent part of the labeling pipeline.
#[derive(Debug, Clone)]
pub struct Clustering {
    pub feature_set: String,
    pub imputed: Imputed,
    pub projection: Projection,
    pub points: Vec<EmbeddedPoint>,
    pub hierarchy: Hierarchy,
    pub elbow: Elbow,
    pub model: ClusterModel,
    /// `None` when the clustering has a single group.
    pub c_index: Option<f64>,
}

pub fn cluster_records(
    records: &[PatientRecord],
    feature_set: &FeatureSet,
    options: &LabelOptions,
) -> Result<Clustering, LabelingError> {
    let imputed = impute_mean(records, feature_set)?;
    let (projection, coords) = pca_project(&imputed.matrix, options.standardize)?;
    let points: Vec<EmbeddedPoint> = records
        .iter()
        .zip(coords)
        .map(|(r, coords)| EmbeddedPoint { record_id: r.record_id.clone(), coords })
        .collect();
    let hierarchy = Hierarchy::build(&points, options.linkage);
    let k_max = options.k_max.clamp(2, points.len().max(2)).min(points.len());
    let elbow = elbow_from_curve(&hierarchy.wss_curve(&points, k_max));
    let k = options.k.unwrap_or(elbow.recommended);
    let model = ClusterModel::from_hierarchy(&points, &hierarchy, k)?;
    let c_index = c_index(&points, &model.assignments).ok();
    Ok(Clustering { feature_set: feature_set.name.clone(), imputed, projection, points, hierarchy, elbow, model, c_index })
}

impl Clustering {
    pub fn label(&self, records: &[PatientRecord], outcome: Outcome) -> Result<RiskLabeling, LabelingError> {
        derive_risk_classes(&self.model, records, outcome, &self.feature_set)
    }

    /// Nearest-centroid assigner for the classes of `labeling`.
    pub fn assigner(&self, labeling: &RiskLabeling) -> CentroidAssigner {
        let mut sums = vec![[0.0, 0.0, 0.0]; self.model.k];
        for (p, &c) in self.points.iter().zip(&self.model.assignments) {
            let class = labeling.class_of_cluster[c].index();
            sums[class][0] += p.coords[0];
            sums[class][1] += p.coords[1];
            sums[class][2] += 1.0;
        }
        CentroidAssigner {
            columns: self.imputed.columns.clone(),
            means: self.imputed.means.clone(),
            projection: self.projection.clone(),
            centroids: sums.iter().map(|s| [s[0] / s[2], s[1] / s[2]]).collect(),
        }
    }
}
