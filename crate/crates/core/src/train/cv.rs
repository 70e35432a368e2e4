use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::data::TrainingSet;
use super::grow::{grow_mvdd, TrainParams};
use super::TrainError;
use crate::eval::{evaluate_predictions, EvalReport};
use crate::mvdd::Mvdd;
use crate::RiskClass;

/// Minimum rise in validation weighted AUC that justifies one more level.
pub const DEPTH_IMPROVEMENT: f64 = 0.001;

/// Fold index of every record. Shuffled with `seed`; the first `n % folds`
/// folds receive one extra record. Stratified assignment deals each class's
/// shuffled members round-robin, continuing across classes.
pub fn assign_folds(labels: &[RiskClass], folds: usize, seed: u64, stratified: bool) -> Vec<usize> {
    let n = labels.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut fold_of = vec![0; n];
    if stratified {
        order.sort_by_key(|&i| labels[i]);
        for (slot, &i) in order.iter().enumerate() {
            fold_of[i] = slot % folds;
        }
        return fold_of;
    }
    let (base, extra) = (n / folds, n % folds);
    let mut start = 0;
    for f in 0..folds {
        let size = base + usize::from(f < extra);
        for &i in &order[start..start + size] {
            fold_of[i] = f;
        }
        start += size;
    }
    fold_of
}

/// Predictions of `model` on `data`. Records it cannot score are left out.
#[derive(Debug, Clone, PartialEq)]
pub struct Scored {
    pub truth: Vec<RiskClass>,
    pub predictions: Vec<RiskClass>,
    pub scores: Vec<Vec<f64>>,
    pub indeterminate: usize,
}

impl Scored {
    pub fn report(&self, k: usize) -> EvalReport {
        evaluate_predictions(&self.truth, &self.predictions, Some(&self.scores), k)
    }

    pub fn coverage(&self) -> f64 {
        let total = self.truth.len() + self.indeterminate;
        if total == 0 { 1.0 } else { self.truth.len() as f64 / total as f64 }
    }
}

pub fn score_set(model: &Mvdd, data: &TrainingSet) -> Scored {
    let mut out = Scored { truth: vec![], predictions: vec![], scores: vec![], indeterminate: 0 };
    for (row, label) in data.rows.iter().zip(&data.labels) {
        let lookup = |name: &str| data.features.iter().position(|f| f.name == name).and_then(|i| row[i]);
        match model.evaluate_with(lookup) {
            Ok(e) => {
                out.truth.push(*label);
                out.predictions.push(e.class);
                out.scores.push(e.distribution);
            }
            Err(_) => out.indeterminate += 1,
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    /// Depth limit the schedule settled on.
    pub depth: usize,
    pub model: Mvdd,
    pub train: EvalReport,
    pub validation: EvalReport,
    pub validation_size: usize,
    /// Validation records the model could not score.
    pub indeterminate: usize,
    pub coverage: f64,
}

impl FoldResult {
    fn validation_auc(&self) -> f64 {
        self.validation.auc.value.unwrap_or(f64::NEG_INFINITY)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub folds: Vec<FoldResult>,
    pub fold_of: Vec<usize>,
    /// Fold whose model has the best validation weighted AUC.
    pub selected: usize,
}

impl CrossValidation {
    pub fn selected_model(&self) -> &Mvdd {
        &self.folds[self.selected].model
    }

    pub fn into_selected_model(mut self) -> Mvdd {
        self.folds.swap_remove(self.selected).model
    }
}

fn validation_auc(model: &Mvdd, data: &TrainingSet) -> f64 {
    score_set(model, data).report(data.k).auc.value.unwrap_or(f64::NEG_INFINITY)
}

/// Grows with depth limits 1, 2, ... (capped by `params.max_depth`) until the
/// validation weighted AUC stops rising by more than [`DEPTH_IMPROVEMENT`] or
/// the diagram stops changing. Returns the last improving model and its limit.
fn grow_with_schedule(
    train: &TrainingSet,
    validation: &TrainingSet,
    params: &TrainParams,
) -> Result<(usize, Mvdd), TrainError> {
    let cap = params.max_depth.unwrap_or(usize::MAX);
    let at_depth = |d: usize| grow_mvdd(train, &TrainParams { max_depth: Some(d), ..params.clone() });
    let mut depth = 1.min(cap);
    let mut best = at_depth(depth)?;
    let mut best_auc = validation_auc(&best, validation);
    while depth < cap {
        let next = at_depth(depth + 1)?;
        if next.nodes == best.nodes {
            break;
        }
        let auc = validation_auc(&next, validation);
        if !(auc - best_auc > DEPTH_IMPROVEMENT) {
            break;
        }
        depth += 1;
        best = next;
        best_auc = auc;
    }
    Ok((depth, best))
}

pub fn cross_validate(data: &TrainingSet, params: &TrainParams) -> Result<CrossValidation, TrainError> {
    params.check()?;
    let n = data.len();
    let folds = params.folds;
    let smallest_train = n - n.div_ceil(folds);
    if n < folds || smallest_train < params.min_samples_leaf {
        return Err(TrainError::InsufficientData {
            needed: folds.max(params.min_samples_leaf + params.min_samples_leaf.div_ceil(folds - 1)),
            found: n,
        });
    }
    let fold_of = assign_folds(&data.labels, folds, params.seed, params.stratified);
    let results: Vec<Result<FoldResult, TrainError>> = (0..folds)
        .into_par_iter()
        .map(|fold| {
            let (val_idx, train_idx): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| fold_of[i] == fold);
            let train = data.subset(&train_idx);
            let validation = data.subset(&val_idx);
            let (depth, model) = grow_with_schedule(&train, &validation, params)?;
            let mut model = model;
            model.metadata.fold = Some(fold);
            let on_train = score_set(&model, &train);
            let on_validation = score_set(&model, &validation);
            Ok(FoldResult {
                fold,
                depth,
                train: on_train.report(data.k),
                validation: on_validation.report(data.k),
                validation_size: val_idx.len(),
                indeterminate: on_validation.indeterminate,
                coverage: on_validation.coverage(),
                model,
            })
        })
        .collect();
    let folds: Vec<FoldResult> = results.into_iter().collect::<Result<_, _>>()?;
    let mut selected = 0;
    for (i, f) in folds.iter().enumerate() {
        if f.validation_auc() > folds[selected].validation_auc() {
            selected = i;
        }
    }
    Ok(CrossValidation { folds, fold_of, selected })
}

/// Per-fold table: fold, depth, sizes, the share of validation records the
/// model could score, and validation metrics on those records.
pub fn fold_table(cv: &CrossValidation) -> String {
    let header = format!(
        "{:<5} {:<6} {:<8} {:<9} {:<16} {:<16} {:<16} {:<16}",
        "Fold", "Depth", "N valid", "Coverage", "Averaged AUC", "Accuracy", "Sensitivity", "Specificity"
    );
    let mut out = format!("{}\n", header.trim_end());
    for f in &cv.folds {
        let v = &f.validation;
        let line = format!(
            "{:<5} {:<6} {:<8} {:<9} {:<16} {:<16} {:<16} {:<16}",
            f.fold + 1,
            f.depth,
            f.validation_size,
            format!("{:.3}", f.coverage),
            v.auc.display(),
            v.accuracy.display(),
            v.sensitivity.display(),
            v.specificity.display()
        );
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohort::{FeatureSet, FeatureSpec, PatientRecord};
    use crate::Outcome;

    fn dataset(n: usize) -> TrainingSet {
        let fs = FeatureSet::new("s", vec![FeatureSpec::continuous("x", "", -1e6, 1e6)]).unwrap();
        let mut d = TrainingSet::empty(&fs, Outcome::DeLvTx, 2);
        for i in 0..n {
            let r = PatientRecord::new(format!("r{i}"), "c").with_value("x", i as f64);
            d.push(&r, RiskClass(if i < n / 2 { 1 } else { 2 })).unwrap();
        }
        d
    }

    #[test]
    fn hundred_records_five_folds() {
        let labels = dataset(100).labels;
        let fold_of = assign_folds(&labels, 5, 42, false);
        for f in 0..5 {
            assert_eq!(fold_of.iter().filter(|&&x| x == f).count(), 20);
        }
    }

    #[test]
    fn uneven_sizes() {
        let fold_of = assign_folds(&[RiskClass(1); 4], 2, 1, false);
        assert_eq!(fold_of.iter().filter(|&&x| x == 0).count(), 2);
        let fold_of = assign_folds(&[RiskClass(1); 7], 3, 1, false);
        let sizes: Vec<usize> = (0..3).map(|f| fold_of.iter().filter(|&&x| x == f).count()).collect();
        assert_eq!(sizes, [3, 2, 2]);
    }

    #[test]
    fn stratified_balances_classes() {
        let labels: Vec<RiskClass> = (0..50).map(|i| RiskClass(if i < 10 { 1 } else { 2 })).collect();
        let fold_of = assign_folds(&labels, 5, 3, true);
        for f in 0..5 {
            let ones = (0..10).filter(|&i| fold_of[i] == f).count();
            assert_eq!(ones, 2);
        }
    }

    #[test]
    fn selects_and_reports_every_fold() {
        let d = dataset(100);
        let p = TrainParams { min_samples_leaf: 2, ..TrainParams::default() };
        let cv = cross_validate(&d, &p).unwrap();
        assert_eq!(cv.folds.len(), 5);
        assert!(cv.folds.iter().all(|f| f.validation_size == 20 && f.coverage == 1.0));
        assert_eq!(cv.selected_model().metadata.fold, Some(cv.selected));
        assert_eq!(cv.folds[cv.selected].validation.auc.value, Some(1.0));
        assert_eq!(fold_table(&cv).lines().count(), 6);
    }

    #[test]
    fn deterministic() {
        let d = dataset(60);
        let p = TrainParams { min_samples_leaf: 2, seed: 9, ..TrainParams::default() };
        let a = cross_validate(&d, &p).unwrap();
        let b = cross_validate(&d, &p).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn too_few_records() {
        let d = dataset(4);
        assert!(matches!(
            cross_validate(&d, &TrainParams::default()),
            Err(TrainError::InsufficientData { .. })
        ));
    }
}
