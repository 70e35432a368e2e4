use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::LabelingError;

/// Learned two-component projection: `coords = ((x - center) / scale) · components`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub center: Vec<f64>,
    pub scale: Vec<f64>,
    pub components: [Vec<f64>; 2],
    /// Share of total variance carried by each component.
    pub explained_variance: [f64; 2],
}

impl Projection {
    pub fn transform(&self, row: &[f64]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (c, component) in self.components.iter().enumerate() {
            out[c] = row
                .iter()
                .zip(&self.center)
                .zip(&self.scale)
                .zip(component)
                .map(|(((x, m), s), w)| (x - m) / s * w)
                .sum();
        }
        out
    }

    /// Maps coordinates back into the centered (and scaled) input space.
    pub fn back_project(&self, coords: [f64; 2]) -> Vec<f64> {
        (0..self.center.len())
            .map(|j| coords[0] * self.components[0][j] + coords[1] * self.components[1][j])
            .collect()
    }
}

/// Centers (and optionally standardizes) the columns, then keeps the two
/// leading principal axes. Returns the projection and one coordinate
/// pair per row.
pub fn pca_project(matrix: &DMatrix<f64>, standardize: bool) -> Result<(Projection, Vec<[f64; 2]>), LabelingError> {
    let (n, d) = matrix.shape();
    if n < 2 || d == 0 {
        return Err(LabelingError::DegenerateMatrix);
    }
    let center: Vec<f64> = (0..d).map(|j| matrix.column(j).sum() / n as f64).collect();
    let scale: Vec<f64> = (0..d)
        .map(|j| {
            if !standardize {
                return 1.0;
            }
            let sd = (matrix.column(j).iter().map(|v| (v - center[j]).powi(2)).sum::<f64>() / n as f64).sqrt();
            if sd > 0.0 { sd } else { 1.0 }
        })
        .collect();
    let x = DMatrix::from_fn(n, d, |i, j| (matrix[(i, j)] - center[j]) / scale[j]);

    // Eigenvectors of the Gram matrix are the right singular vectors. The
    // library SVD loses accuracy on some rank-deficient wide inputs.
    let eigen = (x.transpose() * &x).symmetric_eigen();
    let values: Vec<f64> = eigen.eigenvalues.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = values.iter().sum();
    if !(total > 0.0) {
        return Err(LabelingError::DegenerateMatrix);
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

    let mut components = [vec![0.0; d], vec![0.0; d]];
    let mut explained_variance = [0.0; 2];
    for (c, &idx) in order.iter().take(2).enumerate() {
        let mut w: Vec<f64> = eigen.eigenvectors.column(idx).iter().copied().collect();
        // Sign convention: the largest-magnitude loading is positive.
        let pivot = w
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()).then(b.0.cmp(&a.0)))
            .map(|(_, v)| v)
            .unwrap_or(0.0);
        if pivot < 0.0 {
            w.iter_mut().for_each(|v| *v = -*v);
        }
        explained_variance[c] = values[idx] / total;
        components[c] = w;
    }
    let projection = Projection { center, scale, components, explained_variance };
    let coords = (0..n)
        .map(|i| {
            let row: Vec<f64> = matrix.row(i).iter().copied().collect();
            projection.transform(&row)
        })
        .collect();
    Ok((projection, coords))
}
