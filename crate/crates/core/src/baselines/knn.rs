use serde::{Deserialize, Serialize};

use crate::RiskClass;

/// Nearest neighbours under Euclidean distance on features z-scored with the
/// training means and standard deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knn {
    pub k_neighbors: usize,
    pub means: Vec<f64>,
    /// Population standard deviations; 1 for constant columns.
    pub scales: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<RiskClass>,
    pub k: usize,
}

impl Knn {
    pub fn fit(rows: &[Vec<f64>], labels: &[RiskClass], k: usize, k_neighbors: usize) -> Knn {
        let n = rows.len() as f64;
        let d = rows.first().map_or(0, Vec::len);
        let means: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
        let scales: Vec<f64> = (0..d)
            .map(|j| {
                let sd = (rows.iter().map(|r| (r[j] - means[j]).powi(2)).sum::<f64>() / n).sqrt();
                if sd > 0.0 { sd } else { 1.0 }
            })
            .collect();
        let mut model = Knn { k_neighbors, means, scales, points: Vec::new(), labels: labels.to_vec(), k };
        model.points = rows.iter().map(|r| model.standardize(r)).collect();
        model
    }

    fn standardize(&self, row: &[f64]) -> Vec<f64> {
        row.iter().zip(&self.means).zip(&self.scales).map(|((v, m), s)| (v - m) / s).collect()
    }

    /// Neighbour shares per class. Equal distances keep training order.
    pub fn proba(&self, row: &[f64]) -> Vec<f64> {
        let z = self.standardize(row);
        let mut dist: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.iter().zip(&z).map(|(a, b)| (a - b).powi(2)).sum::<f64>(), i))
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let m = self.k_neighbors.min(dist.len());
        let mut votes = vec![0.0; self.k];
        for &(_, i) in &dist[..m] {
            votes[self.labels[i].index()] += 1.0;
        }
        votes.iter().map(|v| v / m as f64).collect()
    }
}
