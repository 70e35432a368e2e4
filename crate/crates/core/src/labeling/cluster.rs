use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{EmbeddedPoint, LabelingError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    /// Variance-minimizing merges on squared Euclidean distance.
    #[default]
    Ward,
    Average,
    Complete,
}

impl Linkage {
    pub fn name(self) -> &'static str {
        match self {
            Linkage::Ward => "ward",
            Linkage::Average => "average",
            Linkage::Complete => "complete",
        }
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Linkage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ward" => Ok(Linkage::Ward),
            "average" => Ok(Linkage::Average),
            "complete" => Ok(Linkage::Complete),
            other => Err(format!("unknown linkage `{other}`")),
        }
    }
}

/// One merge step. Leaves are numbered `0..n`; the cluster formed at step `s`
/// is numbered `n + s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub distance: f64,
    pub size: usize,
}

/// Full bottom-up merge history over `n` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hierarchy {
    pub n: usize,
    pub linkage: Linkage,
    pub merges: Vec<Merge>,
}

fn condensed(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    n * i - i * (i + 1) / 2 + (j - i - 1)
}

impl Hierarchy {
    /// Builds the merge history. The closest pair merges first; among equal
    /// distances the lowest `(i, j)` slot pair wins.
    pub fn build(points: &[EmbeddedPoint], linkage: Linkage) -> Hierarchy {
        let n = points.len();
        let d2 = |a: &[f64; 2], b: &[f64; 2]| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
        let mut dist = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                let sq = d2(&points[i].coords, &points[j].coords);
                dist.push(if linkage == Linkage::Ward { sq } else { sq.sqrt() });
            }
        }
        let get = |dist: &[f64], i: usize, j: usize| {
            if i < j { dist[condensed(n, i, j)] } else { dist[condensed(n, j, i)] }
        };

        let mut active = vec![true; n];
        let mut size = vec![1usize; n];
        let mut id: Vec<usize> = (0..n).collect();
        let mut nn = vec![usize::MAX; n];
        let mut nn_d = vec![f64::INFINITY; n];
        let rescan = |i: usize, dist: &[f64], active: &[bool], nn: &mut [usize], nn_d: &mut [f64]| {
            nn[i] = usize::MAX;
            nn_d[i] = f64::INFINITY;
            for j in i + 1..n {
                if active[j] {
                    let d = dist[condensed(n, i, j)];
                    if d < nn_d[i] {
                        nn_d[i] = d;
                        nn[i] = j;
                    }
                }
            }
        };
        for i in 0..n {
            rescan(i, &dist, &active, &mut nn, &mut nn_d);
        }

        let mut merges = Vec::with_capacity(n.saturating_sub(1));
        for step in 0..n.saturating_sub(1) {
            let mut i = usize::MAX;
            let mut best = f64::INFINITY;
            for s in 0..n {
                if active[s] && nn[s] != usize::MAX && (i == usize::MAX || nn_d[s] < best) {
                    best = nn_d[s];
                    i = s;
                }
            }
            let j = nn[i];
            let dij = best;
            let (ni, nj) = (size[i] as f64, size[j] as f64);
            for k in 0..n {
                if !active[k] || k == i || k == j {
                    continue;
                }
                let (dki, dkj) = (get(&dist, k, i), get(&dist, k, j));
                let nk = size[k] as f64;
                let updated = match linkage {
                    // Exact arithmetic never goes below `dij`; the max guards rounding.
                    Linkage::Ward => (((ni + nk) * dki + (nj + nk) * dkj - nk * dij) / (ni + nj + nk)).max(dij),
                    Linkage::Average => (ni * dki + nj * dkj) / (ni + nj),
                    Linkage::Complete => dki.max(dkj),
                };
                let slot = if k < i { condensed(n, k, i) } else { condensed(n, i, k) };
                dist[slot] = updated;
            }
            let (a, b) = (id[i].min(id[j]), id[i].max(id[j]));
            merges.push(Merge {
                left: a,
                right: b,
                distance: if linkage == Linkage::Ward { dij.sqrt() } else { dij },
                size: size[i] + size[j],
            });
            active[j] = false;
            size[i] += size[j];
            id[i] = n + step;

            rescan(i, &dist, &active, &mut nn, &mut nn_d);
            for k in 0..j {
                if !active[k] || k == i {
                    continue;
                }
                if nn[k] == i || nn[k] == j {
                    rescan(k, &dist, &active, &mut nn, &mut nn_d);
                } else if k < i {
                    let d = dist[condensed(n, k, i)];
                    if d < nn_d[k] || (d == nn_d[k] && i < nn[k]) {
                        nn_d[k] = d;
                        nn[k] = i;
                    }
                }
            }
        }
        Hierarchy { n, linkage, merges }
    }

    /// Cluster index per point after applying the first `n - k` merges.
    /// Clusters are numbered by first appearance in point order.
    pub fn cut(&self, k: usize) -> Result<Vec<usize>, LabelingError> {
        let n = self.n;
        if k == 0 || k > n {
            return Err(LabelingError::KTooLarge { k, n });
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut leaf_of: Vec<usize> = (0..n).collect();
        for merge in &self.merges[..n - k] {
            let (a, b) = (find(&mut parent, leaf_of[merge.left]), find(&mut parent, leaf_of[merge.right]));
            let root = a.min(b);
            parent[a.max(b)] = root;
            leaf_of.push(root);
        }
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        (0..n)
            .map(|p| {
                let root = find(&mut parent, p);
                if label[root] == usize::MAX {
                    label[root] = next;
                    next += 1;
                }
                Ok(label[root])
            })
            .collect()
    }

    /// Within-cluster sum of squares for `k = 1..=k_max`, replayed from the
    /// merge history so the curve is non-increasing by construction.
    pub fn wss_curve(&self, points: &[EmbeddedPoint], k_max: usize) -> Vec<f64> {
        let n = self.n;
        let mut centroid: Vec<[f64; 2]> = points.iter().map(|p| p.coords).collect();
        let mut size: Vec<f64> = vec![1.0; n];
        let mut cumulative = Vec::with_capacity(self.merges.len() + 1);
        cumulative.push(0.0);
        let mut total = 0.0;
        for merge in &self.merges {
            let (ca, cb) = (centroid[merge.left], centroid[merge.right]);
            let (na, nb) = (size[merge.left], size[merge.right]);
            let gap = (ca[0] - cb[0]).powi(2) + (ca[1] - cb[1]).powi(2);
            total += na * nb / (na + nb) * gap;
            cumulative.push(total);
            centroid.push([(na * ca[0] + nb * cb[0]) / (na + nb), (na * ca[1] + nb * cb[1]) / (na + nb)]);
            size.push(na + nb);
        }
        (1..=k_max.min(n)).map(|k| cumulative[n - k]).collect()
    }
}

/// A cut of a hierarchy at `k` clusters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub k: usize,
    pub linkage: Linkage,
    pub record_ids: Vec<String>,
    /// Cluster index in `[0, k)`, aligned with `record_ids`.
    pub assignments: Vec<usize>,
    pub merge_history: Vec<Merge>,
}

impl ClusterModel {
    pub fn from_hierarchy(points: &[EmbeddedPoint], hierarchy: &Hierarchy, k: usize) -> Result<Self, LabelingError> {
        Ok(ClusterModel {
            k,
            linkage: hierarchy.linkage,
            record_ids: points.iter().map(|p| p.record_id.clone()).collect(),
            assignments: hierarchy.cut(k)?,
            merge_history: hierarchy.merges.clone(),
        })
    }

    pub fn cluster_of(&self, record_id: &str) -> Option<usize> {
        self.record_ids.iter().position(|r| r == record_id).map(|i| self.assignments[i])
    }
}

pub fn agglomerative_cluster(points: &[EmbeddedPoint], k: usize, linkage: Linkage) -> Result<ClusterModel, LabelingError> {
    if k == 0 || k > points.len() {
        return Err(LabelingError::KTooLarge { k, n: points.len() });
    }
    ClusterModel::from_hierarchy(points, &Hierarchy::build(points, linkage), k)
}
