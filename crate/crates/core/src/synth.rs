//! Seeded synthetic cohorts with latent risk strata.
//!
//! Every record belongs to one of `n_strata` strata whose centres sit on a
//! regular polygon in a two-dimensional latent plane. Each continuous feature
//! is a noisy projection of the latent point onto its own direction, rescaled
//! into the feature's valid range; categorical features bucket that projection.
//! Outcomes are Bernoulli draws at the stratum's rate.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::cohort::{Cohort, FeatureSet, FeatureSpec, PatientRecord};
use crate::{Outcome, RiskClass};

#[derive(Debug, Error, PartialEq)]
#[error("invalid synthetic cohort spec: {0}")]
pub struct InvalidSpec(pub String);

/// `b = a + offset` before masking; never both absent in one record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatedPair {
    pub a: String,
    pub b: String,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub n_records: usize,
    pub n_strata: usize,
    /// Built-in name or manifest path.
    pub feature_set: String,
    pub missing_rate: f64,
    pub correlated_pairs: Vec<CorrelatedPair>,
    /// Event probability per stratum, strictly increasing.
    pub outcome_rates: Vec<f64>,
    /// Distance of stratum centres from the latent origin, in units of the
    /// within-stratum standard deviation.
    pub separation: f64,
    /// Standard deviation of each feature around its latent projection.
    pub feature_noise: f64,
    pub cohort_id: String,
    pub seed: u64,
}

pub const DEFAULT_SEPARATION: f64 = 4.0;

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n_records: 2000,
            n_strata: 5,
            feature_set: "invasive-hemodynamics".to_string(),
            missing_rate: 0.1,
            correlated_pairs: vec![CorrelatedPair { a: "PAS".into(), b: "PCWP".into(), offset: -40.0 }],
            outcome_rates: vec![0.05, 0.15, 0.25, 0.35, 0.6],
            separation: DEFAULT_SEPARATION,
            feature_noise: 0.5,
            cohort_id: "synthetic".to_string(),
            seed: 42,
        }
    }
}

/// A generated cohort with the stratum (1-based) of every record.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthCohort {
    pub cohort: Cohort,
    pub strata: BTreeMap<String, RiskClass>,
}

impl SynthCohort {
    /// `record_id,stratum` rows in record order.
    pub fn write_sidecar<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writeln!(writer, "record_id,stratum")?;
        for r in &self.cohort.records {
            writeln!(writer, "{},{}", r.record_id, self.strata[&r.record_id])?;
        }
        Ok(())
    }
}

/// Standard normal CDF.
fn phi(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Where a continuous feature's values live: centre and spread of its
/// latent-driven part, and the admissible interval.
#[derive(Debug, Clone, Copy)]
struct Scale {
    lo: f64,
    hi: f64,
    centre: f64,
    spread: f64,
}

impl Scale {
    fn over(lo: f64, hi: f64) -> Scale {
        Scale { lo, hi, centre: (lo + hi) / 2.0, spread: (hi - lo) / 16.0 }
    }

    fn value(&self, z: f64) -> f64 {
        let v = (self.centre + self.spread * z).clamp(self.lo, self.hi);
        (v * 1000.0).round() / 1000.0
    }
}

fn range_of(spec: &FeatureSpec) -> (f64, f64) {
    spec.valid_range.map_or((0.0, 1.0), |[lo, hi]| (lo, hi))
}

impl SynthSpec {
    pub fn check(&self, fs: &FeatureSet) -> Result<(), InvalidSpec> {
        let bad = |m: String| Err(InvalidSpec(m));
        if self.n_records == 0 || self.n_strata == 0 {
            return bad("n_records and n_strata must be positive".into());
        }
        if !(0.0..1.0).contains(&self.missing_rate) {
            return bad(format!("missing_rate {} outside [0, 1)", self.missing_rate));
        }
        if self.outcome_rates.len() != self.n_strata {
            return bad(format!("{} outcome rates for {} strata", self.outcome_rates.len(), self.n_strata));
        }
        if self.outcome_rates.iter().any(|r| !(0.0..=1.0).contains(r))
            || self.outcome_rates.windows(2).any(|w| w[0] >= w[1])
        {
            return bad("outcome rates must lie in [0, 1] and increase strictly".into());
        }
        if !(self.separation >= 0.0 && self.feature_noise >= 0.0) {
            return bad("separation and feature_noise must be non-negative".into());
        }
        let mut used = Vec::new();
        for p in &self.correlated_pairs {
            for name in [&p.a, &p.b] {
                match fs.get(name) {
                    Some(s) if !s.is_categorical() => {}
                    _ => return bad(format!("pair feature `{name}` is not a continuous feature of the set")),
                }
                if used.contains(name) {
                    return bad(format!("`{name}` appears in more than one pair"));
                }
                used.push(name.clone());
            }
            if p.a == p.b {
                return bad(format!("pair ({}, {}) repeats a feature", p.a, p.b));
            }
            let (alo, ahi) = range_of(fs.get(&p.a).unwrap());
            let (blo, bhi) = range_of(fs.get(&p.b).unwrap());
            if alo.max(blo - p.offset) >= ahi.min(bhi - p.offset) {
                return bad(format!("no value of `{}` keeps `{}` in range", p.a, p.b));
            }
        }
        Ok(())
    }
}

/// Generates the cohort described by `spec`.
pub fn generate(spec: &SynthSpec) -> Result<SynthCohort, InvalidSpec> {
    let fs = FeatureSet::resolve(&spec.feature_set).map_err(|e| InvalidSpec(e.to_string()))?;
    spec.check(&fs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let d = fs.len();

    let direction: Vec<f64> = (0..d).map(|j| 2.0 * PI * j as f64 / d as f64 + 0.1).collect();
    let second: BTreeMap<&str, &CorrelatedPair> =
        spec.correlated_pairs.iter().map(|p| (p.b.as_str(), p)).collect();
    let scales: Vec<Scale> = fs
        .features
        .iter()
        .map(|f| {
            let (lo, hi) = range_of(f);
            match spec.correlated_pairs.iter().find(|p| p.a == f.name) {
                Some(p) => {
                    let (blo, bhi) = range_of(fs.get(&p.b).unwrap());
                    Scale::over(lo.max(blo - p.offset), hi.min(bhi - p.offset))
                }
                None => Scale::over(lo, hi),
            }
        })
        .collect();
    let centres: Vec<[f64; 2]> = (0..spec.n_strata)
        .map(|s| {
            let angle = PI / 2.0 + 2.0 * PI * s as f64 / spec.n_strata as f64;
            [spec.separation * angle.cos(), spec.separation * angle.sin()]
        })
        .collect();

    let width = spec.n_records.to_string().len().max(4);
    let mut records = Vec::with_capacity(spec.n_records);
    let mut strata = BTreeMap::new();
    for i in 0..spec.n_records {
        let s = rng.random_range(0..spec.n_strata);
        let x = centres[s][0] + rng.sample::<f64, _>(StandardNormal);
        let y = centres[s][1] + rng.sample::<f64, _>(StandardNormal);
        let mut record = PatientRecord::new(format!("S{:0width$}", i + 1), spec.cohort_id.clone());

        for (j, f) in fs.features.iter().enumerate() {
            if second.contains_key(f.name.as_str()) {
                continue;
            }
            let noise: f64 = rng.sample(StandardNormal);
            let z = direction[j].cos() * x + direction[j].sin() * y + spec.feature_noise * noise;
            let value = if f.is_categorical() {
                let spread = (spec.separation.powi(2) / 2.0 + 1.0 + spec.feature_noise.powi(2)).sqrt();
                let m = f.categories.len();
                let bucket = ((phi(z / spread) * m as f64) as usize).min(m - 1);
                f.categories[bucket].code as f64
            } else {
                scales[j].value(z)
            };
            record.values.insert(f.name.clone(), value);
        }
        for p in &spec.correlated_pairs {
            let a = record.values[&p.a];
            record.values.insert(p.b.clone(), ((a + p.offset) * 1000.0).round() / 1000.0);
        }

        let r = spec.missing_rate;
        let draws: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let mut missing: Vec<bool> = draws.iter().map(|u| *u < r).collect();
        // The second member of a pair is masked only when the first is present,
        // with probability r / (1 - r), so each still goes missing at rate r.
        for p in &spec.correlated_pairs {
            let (ia, ib) = (fs.position(&p.a).unwrap(), fs.position(&p.b).unwrap());
            missing[ib] = !missing[ia] && draws[ib] < r / (1.0 - r);
        }
        for (j, f) in fs.features.iter().enumerate() {
            if missing[j] {
                record.values.remove(&f.name);
            }
        }
        for outcome in Outcome::ALL {
            let event = rng.random::<f64>() < spec.outcome_rates[s];
            record.outcomes.insert(outcome, event);
        }
        strata.insert(record.record_id.clone(), RiskClass::from_index(s));
        records.push(record);
    }
    Ok(SynthCohort { cohort: Cohort::new(spec.cohort_id.clone(), fs, records), strata })
}

/// Train and test cohorts where one feature carries all the signal and a
/// perfectly correlated partner can stand in for it.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstitutionFixture {
    pub train: SynthCohort,
    pub test: SynthCohort,
    /// Feature to mask at test time.
    pub masked: String,
    pub substitute: String,
    pub threshold: f64,
}

/// Two classes split at `PAS > 60`, with about 30% of records above the
/// threshold, so the median of PAS sits on the class-1 side. `PCWP = PAS - 40`
/// is absent in 5% of training records; every other feature is noise with 10%
/// absent values. PAS is always present.
pub fn substitution_fixture(n_train: usize, n_test: usize, seed: u64) -> SubstitutionFixture {
    let fs = FeatureSet::invasive_hemodynamics();
    let threshold = 60.0;
    let make = |n: usize, seed: u64, prefix: &str, pcwp_missing: f64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut records = Vec::with_capacity(n);
        let mut strata = BTreeMap::new();
        for i in 0..n {
            let high = rng.random::<f64>() < 0.3;
            let pas = if high { rng.random_range(61.0..100.0) } else { rng.random_range(42.0..59.0) };
            let pas: f64 = (pas * 10.0_f64).round() / 10.0;
            let mut r = PatientRecord::new(format!("{prefix}{:05}", i + 1), "fixture");
            for f in &fs.features {
                let value = match f.name.as_str() {
                    "PAS" => pas,
                    "PCWP" => ((pas - 40.0) * 10.0).round() / 10.0,
                    _ if f.is_categorical() => f.categories[rng.random_range(0..f.categories.len())].code as f64,
                    _ => Scale::over(range_of(f).0, range_of(f).1).value(rng.sample(StandardNormal)),
                };
                let rate = match f.name.as_str() {
                    "PAS" => 0.0,
                    "PCWP" => pcwp_missing,
                    _ => 0.1,
                };
                if rng.random::<f64>() >= rate {
                    r.values.insert(f.name.clone(), value);
                }
            }
            for outcome in Outcome::ALL {
                let event = rng.random::<f64>() < if high { 0.5 } else { 0.1 };
                r.outcomes.insert(outcome, event);
            }
            strata.insert(r.record_id.clone(), RiskClass(if high { 2 } else { 1 }));
            records.push(r);
        }
        SynthCohort { cohort: Cohort::new("fixture", fs.clone(), records), strata }
    };
    SubstitutionFixture {
        train: make(n_train, seed, "T", 0.05),
        test: make(n_test, seed.wrapping_add(1), "V", 0.0),
        masked: "PAS".into(),
        substitute: "PCWP".into(),
        threshold,
    }
}
