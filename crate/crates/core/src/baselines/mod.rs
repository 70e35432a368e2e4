//! Reference classifiers trained on median-imputed rows: k-nearest
//! neighbours, a CART decision tree and a random forest.

mod forest;
mod impute;
mod knn;
mod tree;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cohort::PatientRecord;
use crate::eval::EvalReport;
use crate::train::{assign_folds, Scored, TrainingSet};
use crate::{Outcome, RiskClass};

pub use forest::{ForestParams, RandomForest};
pub use impute::{impute_median, median};
pub use knn::Knn;
pub use tree::{DecisionTree, TreeNode, TreeParams};

#[derive(Debug, Error, PartialEq)]
pub enum BaselineError {
    #[error("feature `{0}` has no present values")]
    EmptyFeature(String),
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparam(String),
    #[error("no training records")]
    NoData,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    Knn,
    DecisionTree,
    RandomForest,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 3] = [BaselineKind::Knn, BaselineKind::DecisionTree, BaselineKind::RandomForest];

    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::Knn => "knn",
            BaselineKind::DecisionTree => "decision_tree",
            BaselineKind::RandomForest => "random_forest",
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "knn" => Ok(BaselineKind::Knn),
            "dt" | "decision_tree" => Ok(BaselineKind::DecisionTree),
            "rf" | "random_forest" => Ok(BaselineKind::RandomForest),
            other => Err(format!("unknown baseline `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Hyperparams {
    Knn { k_neighbors: usize },
    DecisionTree(TreeParams),
    RandomForest(ForestParams),
}

impl Hyperparams {
    pub fn defaults(kind: BaselineKind) -> Self {
        match kind {
            BaselineKind::Knn => Hyperparams::Knn { k_neighbors: 5 },
            BaselineKind::DecisionTree => Hyperparams::DecisionTree(TreeParams::default()),
            BaselineKind::RandomForest => Hyperparams::RandomForest(ForestParams::default()),
        }
    }

    pub fn kind(&self) -> BaselineKind {
        match self {
            Hyperparams::Knn { .. } => BaselineKind::Knn,
            Hyperparams::DecisionTree(_) => BaselineKind::DecisionTree,
            Hyperparams::RandomForest(_) => BaselineKind::RandomForest,
        }
    }

    fn check(&self, n: usize, d: usize) -> Result<(), BaselineError> {
        let bad = |m: &str| Err(BaselineError::InvalidHyperparam(m.to_string()));
        let tree_ok = |t: &TreeParams| t.min_samples_leaf >= 1;
        match self {
            Hyperparams::Knn { k_neighbors } if *k_neighbors == 0 || *k_neighbors > n => {
                bad(&format!("k_neighbors must be in 1..={n}"))
            }
            Hyperparams::DecisionTree(t) if !tree_ok(t) => bad("min_samples_leaf must be at least 1"),
            Hyperparams::RandomForest(f) if !tree_ok(&f.tree) => bad("min_samples_leaf must be at least 1"),
            Hyperparams::RandomForest(f) if f.n_trees == 0 => bad("n_trees must be at least 1"),
            Hyperparams::RandomForest(ForestParams { max_features: Some(m), .. }) if *m == 0 || *m > d => {
                bad(&format!("max_features must be in 1..={d}"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "state", rename_all = "snake_case")]
pub enum Fitted {
    Knn(Knn),
    DecisionTree(DecisionTree),
    RandomForest(RandomForest),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineModel {
    pub hyperparams: Hyperparams,
    pub feature_set: String,
    pub outcome: Outcome,
    pub k: usize,
    pub seed: u64,
    pub features: Vec<String>,
    /// Fit-time medians, reused for absent values at prediction.
    pub medians: BTreeMap<String, f64>,
    pub fitted: Fitted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub class: RiskClass,
    pub scores: Vec<f64>,
}

/// Highest score, lowest class on ties.
pub fn argmax(scores: &[f64]) -> RiskClass {
    let mut best = 0;
    for (c, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = c;
        }
    }
    RiskClass::from_index(best)
}

impl BaselineModel {
    pub fn fit(hyperparams: &Hyperparams, data: &TrainingSet, seed: u64) -> Result<BaselineModel, BaselineError> {
        if data.is_empty() {
            return Err(BaselineError::NoData);
        }
        hyperparams.check(data.len(), data.features.len())?;
        let (rows, medians) = impute_median(data)?;
        let fitted = match hyperparams {
            Hyperparams::Knn { k_neighbors } => Fitted::Knn(Knn::fit(&rows, &data.labels, data.k, *k_neighbors)),
            Hyperparams::DecisionTree(p) => {
                Fitted::DecisionTree(DecisionTree::fit(&rows, &data.labels, data.k, &data.features, p, None))
            }
            Hyperparams::RandomForest(p) => {
                Fitted::RandomForest(RandomForest::fit(&rows, &data.labels, data.k, &data.features, p, seed))
            }
        };
        Ok(BaselineModel {
            hyperparams: hyperparams.clone(),
            feature_set: data.feature_set.clone(),
            outcome: data.outcome,
            k: data.k,
            seed,
            features: data.features.iter().map(|f| f.name.clone()).collect(),
            medians: data.features.iter().map(|f| f.name.clone()).zip(medians).collect(),
            fitted,
        })
    }

    pub fn kind(&self) -> BaselineKind {
        self.hyperparams.kind()
    }

    /// Dense row in training feature order with medians for absent values.
    pub fn row(&self, value: impl Fn(&str) -> Option<f64>) -> Vec<f64> {
        self.features.iter().map(|f| value(f).unwrap_or(self.medians[f])).collect()
    }

    pub fn predict_row(&self, row: &[f64]) -> Prediction {
        let scores = match &self.fitted {
            Fitted::Knn(m) => m.proba(row),
            Fitted::DecisionTree(t) => t.proba(row).to_vec(),
            Fitted::RandomForest(f) => f.proba(row),
        };
        let class = match &self.fitted {
            Fitted::DecisionTree(t) => t.predict(row),
            _ => argmax(&scores),
        };
        Prediction { class, scores }
    }

    pub fn predict(&self, record: &PatientRecord) -> Prediction {
        self.predict_row(&self.row(|f| record.value(f)))
    }

    /// Scores every row of `data`; baselines never refuse a record.
    pub fn score_set(&self, data: &TrainingSet) -> Scored {
        let mut out = Scored { truth: vec![], predictions: vec![], scores: vec![], indeterminate: 0 };
        for (row, label) in data.rows.iter().zip(&data.labels) {
            let lookup = |name: &str| data.features.iter().position(|f| f.name == name).and_then(|i| row[i]);
            let p = self.predict_row(&self.row(lookup));
            out.truth.push(*label);
            out.predictions.push(p.class);
            out.scores.push(p.scores);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineFold {
    pub fold: usize,
    pub model: BaselineModel,
    pub validation: EvalReport,
    pub validation_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineCv {
    pub folds: Vec<BaselineFold>,
    pub selected: usize,
}

/// Fits one model per fold on the same fold assignment as diagram training
/// and selects the best validation weighted AUC (ties to the lower fold).
pub fn cross_validate_baseline(
    hyperparams: &Hyperparams,
    data: &TrainingSet,
    folds: usize,
    seed: u64,
    stratified: bool,
) -> Result<BaselineCv, BaselineError> {
    if folds < 2 || data.len() < folds {
        return Err(BaselineError::InvalidHyperparam(format!("cannot make {folds} folds from {} records", data.len())));
    }
    let fold_of = assign_folds(&data.labels, folds, seed, stratified);
    let results: Vec<Result<BaselineFold, BaselineError>> = (0..folds)
        .into_par_iter()
        .map(|fold| {
            let (val, train): (Vec<usize>, Vec<usize>) = (0..data.len()).partition(|&i| fold_of[i] == fold);
            let model = BaselineModel::fit(hyperparams, &data.subset(&train), seed)?;
            let validation = model.score_set(&data.subset(&val)).report(data.k);
            Ok(BaselineFold { fold, model, validation, validation_size: val.len() })
        })
        .collect();
    let folds: Vec<BaselineFold> = results.into_iter().collect::<Result<_, _>>()?;
    let auc = |f: &BaselineFold| f.validation.auc.value.unwrap_or(f64::NEG_INFINITY);
    let mut selected = 0;
    for (i, f) in folds.iter().enumerate() {
        if auc(f) > auc(&folds[selected]) {
            selected = i;
        }
    }
    Ok(BaselineCv { folds, selected })
}
