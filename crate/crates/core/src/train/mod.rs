//! Learning diagrams from labeled records.

mod cv;
mod data;
mod grow;
mod impurity;
mod split;

use thiserror::Error;

pub use cv::{assign_folds, cross_validate, fold_table, score_set, CrossValidation, FoldResult, Scored, DEPTH_IMPROVEMENT};
pub use data::TrainingSet;
pub use grow::{grow_mvdd, TrainParams};
pub use impurity::{impurity, impurity_of_counts, Criterion};
pub use split::{best_category, best_split, best_threshold, Candidate, Item, SplitRule};

#[derive(Debug, Error, PartialEq)]
pub enum TrainError {
    #[error("impurity of an empty label set")]
    EmptyLabelSet,
    #[error("invalid training parameters: {0}")]
    InvalidParams(String),
    #[error("not enough records: need at least {needed}, found {found}")]
    InsufficientData { needed: usize, found: usize },
    #[error("label {label} outside 1..={k}")]
    LabelOutOfRange { label: u8, k: usize },
    #[error("internal error: {0}")]
    Internal(String),
}
