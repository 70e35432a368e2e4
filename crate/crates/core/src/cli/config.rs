use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{CliError, GlobalArgs};
use crate::cohort::{FeatureSet, OutlierRule, SchemaOptions, BUILTIN_FEATURE_SETS};
use crate::labeling::LabelOptions;
use crate::synth::SynthSpec;
use crate::train::{Criterion, TrainParams};
use crate::Outcome;

/// Contents of a `--config` TOML file. Every field is optional.
///
/// ```toml
/// seed = 7
/// out = "runs/a"
/// data = ["cohorts/trial.csv", "cohorts/registry.csv"]
/// feature_sets = ["invasive-hemodynamics", "all-features"]
/// outcomes = ["DeLvTx"]
///
/// [labeling]
/// k = 5
/// linkage = "ward"
///
/// [train]
/// criterion = "entropy"
/// min_samples_leaf = 10
///
/// [outliers]
/// rule = "z_score"
/// threshold = 4.0
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub data: Vec<PathBuf>,
    pub feature_sets: Vec<String>,
    pub outcomes: Vec<Outcome>,
    /// Directory of labeling documents; `<out>/labels` when unset.
    pub labels: Option<PathBuf>,
    pub model_dir: Option<PathBuf>,
    pub schema: SchemaOptions,
    pub outliers: OutlierRule,
    pub labeling: LabelOptions,
    pub train: TrainParams,
    pub synth: SynthSpec,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        // Relative paths in the file are relative to the file.
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        config.data.iter_mut().for_each(rebase);
        config.out.iter_mut().for_each(rebase);
        config.labels.iter_mut().for_each(rebase);
        config.model_dir.iter_mut().for_each(rebase);
        Ok(config)
    }
}

/// Effective settings after merging the config file and flags.
#[derive(Debug, Clone)]
pub struct Settings {
    pub seed: u64,
    pub out: PathBuf,
    pub data: Vec<PathBuf>,
    pub feature_sets: Vec<FeatureSet>,
    pub outcomes: Vec<Outcome>,
    pub labels: PathBuf,
    pub model_dir: Option<PathBuf>,
    pub schema: SchemaOptions,
    pub outliers: OutlierRule,
    pub labeling: LabelOptions,
    /// Training parameters with `seed` already set to the training substream.
    pub train: TrainParams,
    pub synth: SynthSpec,
}

pub const DEFAULT_SEED: u64 = 42;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of the named component stream derived from `root`.
pub fn substream_seed(root: u64, name: &str) -> u64 {
    // FNV-1a over the name keeps streams stable across releases.
    let tag = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3));
    splitmix64(root ^ tag)
}

impl Settings {
    pub fn resolve(flags: &GlobalArgs) -> Result<Self, CliError> {
        let config = match &flags.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        Self::merge(config, flags)
    }

    pub fn merge(config: RunConfig, flags: &GlobalArgs) -> Result<Self, CliError> {
        let seed = flags.seed.or(config.seed).unwrap_or(DEFAULT_SEED);
        let out = flags.out.clone().or(config.out).unwrap_or_else(|| PathBuf::from("out"));

        let set_names = if !flags.feature_sets.is_empty() {
            flags.feature_sets.clone()
        } else if !config.feature_sets.is_empty() {
            config.feature_sets
        } else {
            vec![BUILTIN_FEATURE_SETS[0].to_string()]
        };
        let mut feature_sets: Vec<FeatureSet> = Vec::new();
        for name in &set_names {
            let set = FeatureSet::resolve(name).map_err(|e| CliError::Config(format!("feature set `{name}`: {e}")))?;
            if !feature_sets.iter().any(|s| s.name == set.name) {
                feature_sets.push(set);
            }
        }

        let outcomes = if !flags.outcomes.is_empty() {
            let mut v = Vec::new();
            for o in &flags.outcomes {
                let o: Outcome = o.parse().map_err(CliError::Config)?;
                if !v.contains(&o) {
                    v.push(o);
                }
            }
            v
        } else if !config.outcomes.is_empty() {
            config.outcomes
        } else {
            Outcome::ALL.to_vec()
        };

        let mut labeling = config.labeling;
        if flags.k.is_some() {
            labeling.k = flags.k;
        }
        if labeling.k.is_some_and(|k| k < 2) {
            return Err(CliError::Config("k must be at least 2".into()));
        }

        let mut train = config.train;
        if let Some(c) = &flags.criterion {
            train.criterion = c.parse::<Criterion>().map_err(CliError::Config)?;
        }
        if let Some(f) = flags.folds {
            train.folds = f;
        }
        train.seed = substream_seed(seed, "train");
        train.check().map_err(|e| CliError::Config(e.to_string()))?;

        let mut synth = config.synth;
        synth.seed = seed;
        if let Some(first) = flags.feature_sets.first() {
            synth.feature_set = first.clone();
        }

        Ok(Settings {
            seed,
            labels: config.labels.unwrap_or_else(|| out.join("labels")),
            out,
            data: config.data,
            feature_sets,
            outcomes,
            model_dir: config.model_dir,
            schema: config.schema,
            outliers: config.outliers,
            labeling,
            train,
            synth,
        })
    }

    /// A configured feature set by name, else a built-in one.
    pub fn feature_set(&self, name: &str) -> Option<FeatureSet> {
        self.feature_sets.iter().find(|s| s.name == name).cloned().or_else(|| FeatureSet::builtin(name))
    }

    /// Seed of a named component stream.
    pub fn stream(&self, name: &str) -> u64 {
        substream_seed(self.seed, name)
    }
}
