//! Command line front end: `generate`, `label`, `train`, `evaluate`,
//! `compare`, `predict`, `export` and `serve`.
//!
//! Settings come from an optional TOML file (`--config`); flags win over file
//! values. Every random component draws from a named substream of one root
//! seed. Outputs land under `--out` (default `out`):
//!
//! ```text
//! out/
//!   synthetic/cohort.csv, strata.csv
//!   labels/<set>__<outcome>.json        labeling document
//!   labels/<set>__<outcome>.csv         record_id,cohort,class
//!   labels/<set>__<outcome>.summary.txt class table
//!   labels/<set>.elbow.csv, <set>.embedding.csv
//!   models/<set>__<outcome>.mvdd.json   selected diagram
//!   models/<set>__<outcome>.folds.txt, .folds.csv
//!   models/<set>__<outcome>.<baseline>.json
//!   eval/<model>/report.json, performance.txt, performance.csv,
//!                classes.csv, roc.csv, calibration.csv
//!   compare/<model>/comparison.txt, comparison.csv
//! ```
//!
//! Exit codes: 0 success, 2 configuration, 3 data, 4 compatibility,
//! 5 indeterminate prediction.

mod commands;
mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use config::{substream_seed, RunConfig, Settings};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("incompatible inputs: {0}")]
    Compatibility(String),
    #[error("{0}")]
    Indeterminate(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Compatibility(_) => 4,
            CliError::Indeterminate(_) => 5,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "mvdd-risk", version, about = "Risk labeling, diagram training, evaluation and serving")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Root seed for every random component.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Feature set name or manifest path; repeatable.
    #[arg(long = "feature-set", global = true)]
    pub feature_sets: Vec<String>,
    /// Outcome (DeLvTx or Rehospitalization); repeatable.
    #[arg(long = "outcome", global = true)]
    pub outcomes: Vec<String>,
    /// Number of risk classes; the elbow choice when unset.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Splitting criterion: gini or entropy.
    #[arg(long, global = true)]
    pub criterion: Option<String>,
    /// Cross-validation folds.
    #[arg(long, global = true)]
    pub folds: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a seeded synthetic cohort and its stratum sidecar.
    Generate(GenerateArgs),
    /// Derive risk classes for every (feature set, outcome) pair.
    Label(LabelArgs),
    /// Cross-validate diagrams (and optionally baselines) on labeled data.
    Train(TrainArgs),
    /// Score a model on cohorts and write metric tables.
    Evaluate(EvaluateArgs),
    /// Paired DeLong comparison of a reference model against others.
    Compare(CompareArgs),
    /// Score one patient given as NAME=VALUE pairs, or every row of a file.
    Predict(PredictArgs),
    /// Export a diagram as DOT or canonical JSON.
    Export(ExportArgs),
    /// Run the HTTP prediction service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Number of records.
    #[arg(long)]
    pub n: Option<usize>,
    /// Share of feature values removed completely at random.
    #[arg(long)]
    pub missing_rate: Option<f64>,
    /// Also write the substitution train/test fixture.
    #[arg(long)]
    pub substitution_fixture: bool,
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    /// Cohort files, pooled for clustering.
    #[arg(long = "data", required = false)]
    pub data: Vec<PathBuf>,
    /// Cluster linkage: ward, average or complete.
    #[arg(long)]
    pub linkage: Option<String>,
    /// Largest number of clusters tried by the elbow search.
    #[arg(long)]
    pub k_max: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Labeled cohort files.
    #[arg(long = "data")]
    pub data: Vec<PathBuf>,
    /// Directory of labeling documents (default `<out>/labels`).
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Smallest number of training records in a leaf.
    #[arg(long)]
    pub min_samples_leaf: Option<usize>,
    /// Depth limit for the schedule; unlimited when unset.
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Slack allowed for OR substitutes; 0 disables OR edges.
    #[arg(long)]
    pub or_gain_threshold: Option<f64>,
    /// Also cross-validate these baselines: knn, dt, rf.
    #[arg(long = "baseline")]
    pub baselines: Vec<String>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Model document (diagram or baseline).
    #[arg(long)]
    pub model: PathBuf,
    /// Cohort files to score.
    #[arg(long = "data")]
    pub data: Vec<PathBuf>,
    /// Labeling document or directory of them (default `<out>/labels`).
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Percentile bootstrap resamples for the AUC interval instead of DeLong.
    #[arg(long)]
    pub bootstrap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Reference model first, then the models it is compared against.
    #[arg(long = "model", num_args = 1.., required = true)]
    pub models: Vec<PathBuf>,
    /// Cohort files to score.
    #[arg(long = "data")]
    pub data: Vec<PathBuf>,
    /// Labeling document or directory of them (default `<out>/labels`).
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model document (diagram or baseline).
    #[arg(long)]
    pub model: PathBuf,
    /// Feature values as NAME=VALUE.
    #[arg(value_name = "NAME=VALUE")]
    pub values: Vec<String>,
    /// Score every row of a cohort file instead.
    #[arg(long)]
    pub record_file: Option<PathBuf>,
    /// Print JSON responses.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// Diagram document.
    #[arg(long)]
    pub model: PathBuf,
    /// dot or json.
    #[arg(long, default_value = "dot")]
    pub format: String,
    /// Output file; standard output when unset.
    #[arg(long)]
    pub to: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Directory of model documents to serve.
    #[arg(long, env = "MVDD_MODEL_DIR")]
    pub model_dir: Option<PathBuf>,
    /// Listen address.
    #[arg(long, env = "MVDD_BIND", default_value = "127.0.0.1:8080")]
    pub bind: String,
}

/// Runs one parsed command line.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let settings = Settings::resolve(&cli.global)?;
    match cli.command {
        Command::Generate(a) => commands::generate(&settings, &a),
        Command::Label(a) => commands::label(&settings, &a),
        Command::Train(a) => commands::train(&settings, &a),
        Command::Evaluate(a) => commands::evaluate(&settings, &a),
        Command::Compare(a) => commands::compare(&settings, &a),
        Command::Predict(a) => commands::predict(&settings, &a),
        Command::Export(a) => commands::export(&a),
        Command::Serve(a) => commands::serve(&settings, &a),
    }
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
