use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{DecisionTree, TreeParams};
use crate::cohort::FeatureSpec;
use crate::RiskClass;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Features tried per split; `None` means ⌈√D⌉.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
    pub tree: TreeParams,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { n_trees: 100, max_features: None, bootstrap: true, tree: TreeParams::default() }
    }
}

impl ForestParams {
    pub fn features_per_split(&self, d: usize) -> usize {
        self.max_features.unwrap_or_else(|| (d as f64).sqrt().ceil() as usize).clamp(1, d.max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
    pub k: usize,
}

/// Generator for tree `t`: the root seed on its own ChaCha stream.
fn tree_rng(seed: u64, t: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t as u64);
    rng
}

impl RandomForest {
    pub fn fit(
        rows: &[Vec<f64>],
        labels: &[RiskClass],
        k: usize,
        features: &[FeatureSpec],
        params: &ForestParams,
        seed: u64,
    ) -> RandomForest {
        let n = rows.len();
        let m = params.features_per_split(features.len());
        let trees = (0..params.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = tree_rng(seed, t);
                if params.bootstrap {
                    let picks: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                    let r: Vec<Vec<f64>> = picks.iter().map(|&i| rows[i].clone()).collect();
                    let l: Vec<RiskClass> = picks.iter().map(|&i| labels[i]).collect();
                    DecisionTree::fit(&r, &l, k, features, &params.tree, Some((&mut rng, m)))
                } else {
                    DecisionTree::fit(rows, labels, k, features, &params.tree, Some((&mut rng, m)))
                }
            })
            .collect();
        RandomForest { trees, k }
    }

    /// Share of trees voting for each class.
    pub fn proba(&self, row: &[f64]) -> Vec<f64> {
        let mut votes = vec![0.0; self.k];
        for t in &self.trees {
            votes[t.predict(row).index()] += 1.0;
        }
        let n = self.trees.len() as f64;
        votes.iter().map(|v| v / n).collect()
    }
}
