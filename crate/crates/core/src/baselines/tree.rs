use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cohort::FeatureSpec;
use crate::train::{impurity_of_counts, Criterion, SplitRule};
use crate::RiskClass;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeParams {
    pub criterion: Criterion,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { criterion: Criterion::Gini, max_depth: None, min_samples_leaf: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TreeNode {
    Leaf { class: RiskClass, distribution: Vec<f64> },
    Split { feature: usize, rule: SplitRule, children: [usize; 2] },
}

/// CART-style binary tree on dense rows. Node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<TreeNode>,
}

struct Builder<'a> {
    rows: &'a [Vec<f64>],
    labels: &'a [RiskClass],
    k: usize,
    features: &'a [FeatureSpec],
    params: &'a TreeParams,
    /// Random subset size per split, with its generator.
    sampler: Option<(&'a mut ChaCha8Rng, usize)>,
    nodes: Vec<TreeNode>,
}

struct Best {
    feature: usize,
    rule: SplitRule,
    impurity: f64,
}

fn counts(labels: &[RiskClass], idx: &[usize], k: usize) -> Vec<f64> {
    let mut c = vec![0.0; k];
    for &i in idx {
        c[labels[i].index()] += 1.0;
    }
    c
}

fn children_impurity(left: &[f64], right: &[f64], criterion: Criterion) -> f64 {
    let wl: f64 = left.iter().sum();
    let wr: f64 = right.iter().sum();
    (wl * impurity_of_counts(left, criterion) + wr * impurity_of_counts(right, criterion)) / (wl + wr)
}

impl Builder<'_> {
    fn leaf(&mut self, hist: &[f64]) -> usize {
        let mut best = 0;
        for c in 1..hist.len() {
            if hist[c] > hist[best] {
                best = c;
            }
        }
        let total: f64 = hist.iter().sum();
        self.nodes.push(TreeNode::Leaf {
            class: RiskClass::from_index(best),
            distribution: hist.iter().map(|h| h / total).collect(),
        });
        self.nodes.len() - 1
    }

    fn candidates(&mut self) -> Vec<usize> {
        let d = self.features.len();
        match &mut self.sampler {
            Some((rng, m)) if *m < d => {
                let mut f = sample(*rng, d, *m).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..d).collect(),
        }
    }

    fn threshold_split(&self, idx: &[usize], feature: usize, total: &[f64]) -> Option<(SplitRule, f64)> {
        let min_leaf = self.params.min_samples_leaf as f64;
        let mut order = idx.to_vec();
        order.sort_by(|&a, &b| self.rows[a][feature].total_cmp(&self.rows[b][feature]));
        let mut left = vec![0.0; self.k];
        let mut best: Option<(SplitRule, f64)> = None;
        let mut pos = 0;
        while pos < order.len() {
            let v = self.rows[order[pos]][feature];
            while pos < order.len() && self.rows[order[pos]][feature] == v {
                left[self.labels[order[pos]].index()] += 1.0;
                pos += 1;
            }
            if pos == order.len() {
                break;
            }
            let next = self.rows[order[pos]][feature];
            let right: Vec<f64> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
            if (pos as f64) < min_leaf || ((order.len() - pos) as f64) < min_leaf {
                continue;
            }
            let score = children_impurity(&left, &right, self.params.criterion);
            if best.is_none_or(|b| score < b.1) {
                let mid = v + (next - v) / 2.0;
                best = Some((SplitRule::Threshold(if mid >= next { v } else { mid }), score));
            }
        }
        best
    }

    fn category_split(&self, idx: &[usize], feature: usize) -> Option<(SplitRule, f64)> {
        let min_leaf = self.params.min_samples_leaf as f64;
        let mut codes: Vec<i64> = self.features[feature].categories.iter().map(|c| c.code).collect();
        codes.sort_unstable();
        let mut best: Option<(SplitRule, f64)> = None;
        for code in codes {
            let rule = SplitRule::OneVsRest(code);
            let (mut inside, mut outside) = (vec![0.0; self.k], vec![0.0; self.k]);
            for &i in idx {
                let side = if rule.side(self.rows[i][feature]) == 0 { &mut inside } else { &mut outside };
                side[self.labels[i].index()] += 1.0;
            }
            let (wi, wo): (f64, f64) = (inside.iter().sum(), outside.iter().sum());
            if wi < min_leaf || wo < min_leaf || wi == 0.0 || wo == 0.0 {
                continue;
            }
            let score = children_impurity(&inside, &outside, self.params.criterion);
            if best.is_none_or(|b| score < b.1) {
                best = Some((rule, score));
            }
        }
        best
    }

    fn build(&mut self, idx: &[usize], depth: usize) -> usize {
        let hist = counts(self.labels, idx, self.k);
        let parent = impurity_of_counts(&hist, self.params.criterion);
        let deep_enough = self.params.max_depth.is_some_and(|d| depth >= d);
        if parent <= 0.0 || deep_enough || (idx.len() as f64) < 2.0 * self.params.min_samples_leaf as f64 {
            return self.leaf(&hist);
        }
        let mut best: Option<Best> = None;
        for feature in self.candidates() {
            let found = if self.features[feature].is_categorical() {
                self.category_split(idx, feature)
            } else {
                self.threshold_split(idx, feature, &hist)
            };
            if let Some((rule, impurity)) = found {
                if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                    best = Some(Best { feature, rule, impurity });
                }
            }
        }
        let Some(best) = best.filter(|b| parent - b.impurity > 1e-12) else {
            return self.leaf(&hist);
        };
        let id = self.nodes.len();
        self.nodes.push(TreeNode::Leaf { class: RiskClass(1), distribution: Vec::new() });
        let (left, right): (Vec<usize>, Vec<usize>) =
            idx.iter().partition(|&&i| best.rule.side(self.rows[i][best.feature]) == 0);
        let l = self.build(&left, depth + 1);
        let r = self.build(&right, depth + 1);
        self.nodes[id] = TreeNode::Split { feature: best.feature, rule: best.rule, children: [l, r] };
        id
    }
}

impl DecisionTree {
    /// Grows on all rows. `sampler` draws a sorted random feature subset of
    /// the given size at every split.
    pub fn fit(
        rows: &[Vec<f64>],
        labels: &[RiskClass],
        k: usize,
        features: &[FeatureSpec],
        params: &TreeParams,
        sampler: Option<(&mut ChaCha8Rng, usize)>,
    ) -> DecisionTree {
        assert!(!rows.is_empty(), "a tree needs rows");
        let mut b = Builder { rows, labels, k, features, params, sampler, nodes: Vec::new() };
        let idx: Vec<usize> = (0..rows.len()).collect();
        b.build(&idx, 0);
        DecisionTree { nodes: b.nodes }
    }

    fn leaf_of(&self, row: &[f64]) -> &TreeNode {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                TreeNode::Split { feature, rule, children } => at = children[rule.side(row[*feature])],
                leaf => return leaf,
            }
        }
    }

    pub fn predict(&self, row: &[f64]) -> RiskClass {
        match self.leaf_of(row) {
            TreeNode::Leaf { class, .. } => *class,
            TreeNode::Split { .. } => unreachable!(),
        }
    }

    /// Class proportions of the leaf reached by `row`.
    pub fn proba(&self, row: &[f64]) -> &[f64] {
        match self.leaf_of(row) {
            TreeNode::Leaf { distribution, .. } => distribution,
            TreeNode::Split { .. } => unreachable!(),
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &DecisionTree, at: usize) -> usize {
            match &t.nodes[at] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { children, .. } => 1 + go(t, children[0]).max(go(t, children[1])),
            }
        }
        go(self, 0)
    }
}
