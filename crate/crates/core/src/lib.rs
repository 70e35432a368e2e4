//! Explainable risk stratification with multi-valued decision diagrams.
//!
//! The crate covers the whole pipeline:
//!
//! * [`cohort`] loads delimited cohort files into sparse [`cohort::PatientRecord`]s,
//!   splits baseline/discharge timepoints, derives noninvasive hemodynamics and
//!   removes outliers.
//! * [`labeling`] turns a pooled cohort into ordinal risk classes: mean imputation,
//!   two-component PCA, agglomerative clustering, elbow selection of `k`, C-index
//!   scoring and ordering of clusters by observed event rate.
//! * [`mvdd`] is the diagram itself. Evaluation tolerates missing features through
//!   OR-linked substitute tests and returns a readable phenotype for every prediction.
//! * [`train`] grows diagrams with an ID3-style splitter and picks AND/OR operators
//!   per edge, under k-fold cross-validation.
//! * [`baselines`] holds median-imputed KNN, decision tree and random forest models.
//! * [`eval`] computes per-class ROC curves, weighted summaries, calibration tables
//!   and paired DeLong tests.
//! * [`synth`] generates seeded synthetic cohorts with latent risk strata.
//! * [`cli`] and [`service`] expose everything as a command line tool and an HTTP API.

pub mod baselines;
pub mod cli;
pub mod cohort;
pub mod eval;
pub mod labeling;
pub mod model;
pub mod mvdd;
pub mod predict;
pub mod service;
pub mod synth;
pub mod train;

mod class;

pub use class::{Outcome, RiskClass};
pub use cohort::{Cohort, FeatureSet, FeatureSpec, PatientRecord};
pub use mvdd::{Mvdd, Phenotype};

/// Version written into every model document and service response.
pub const SCHEMA_VERSION: u32 = 1;
