use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::json;

use super::config::Settings;
use super::{CliError, CompareArgs, EvaluateArgs, ExportArgs, GenerateArgs, LabelArgs, PredictArgs, ServeArgs, TrainArgs};
use crate::baselines::{cross_validate_baseline, BaselineKind, Hyperparams};
use crate::cohort::{
    derive_noninvasive_hemodynamics, load_cohort, project, remove_outliers, write_cohort, CohortError, FeatureSet, PatientRecord, BUILTIN_FEATURE_SETS,
};
use crate::eval::{
    bootstrap_auc_ci, calibration, calibration_csv, class_table_csv, comparison_csv, comparison_table,
    delong_multiclass, evaluate_predictions, performance_csv, performance_table, roc_points_csv, ComparisonRow,
    EvalReport, PerformanceRow,
};
use crate::labeling::{cluster_records, probability_bands, Linkage};
use crate::model::{Document, LabelingDocument, ModelError};
use crate::mvdd::{canonicalize, export_dot, EvalError as MvddEvalError};
use crate::predict::{predict_request, predict_values, render_text, PredictError, RawValue};
use crate::service::{ServiceError, ServiceState};
use crate::synth::{generate as generate_cohort, substitution_fixture, SynthCohort};
use crate::train::{cross_validate, fold_table, TrainError, TrainingSet};
use crate::{Outcome, RiskClass};

fn data_err(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| CliError::Data(format!("cannot create {}: {e}", parent.display())))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

fn pair_stem(feature_set: &str, outcome: Outcome) -> String {
    format!("{feature_set}__{outcome}")
}

fn model_error(e: ModelError) -> CliError {
    match e {
        ModelError::SchemaVersionMismatch { .. } => CliError::Compatibility(e.to_string()),
        _ => CliError::Data(e.to_string()),
    }
}

/// A document that predicts: a diagram or a baseline.
fn load_model(path: &Path) -> Result<Document, CliError> {
    let doc = Document::load(path).map_err(model_error)?;
    if let Document::Labeling(_) = doc {
        return Err(CliError::Compatibility(format!("{} is a labeling document, not a model", path.display())));
    }
    Ok(doc)
}

fn model_name(path: &Path) -> String {
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    name.strip_suffix(".json").unwrap_or(&name).to_string()
}

fn known_feature(settings: &Settings, column: &str) -> bool {
    let builtin = BUILTIN_FEATURE_SETS.iter().filter_map(|n| FeatureSet::builtin(n));
    settings.feature_sets.iter().cloned().chain(builtin).any(|s| s.find_ignore_case(column).is_some())
}

fn cohort_error(settings: &Settings, feature_set: &FeatureSet, e: CohortError) -> CliError {
    match &e {
        CohortError::UnknownColumn(c) if known_feature(settings, c) => CliError::Compatibility(format!(
            "column `{c}` belongs to another feature set than `{}`",
            feature_set.name
        )),
        _ => data_err(e),
    }
}

/// Derived indices for the records when the schema asks for them. Values
/// outside `feature_set` are dropped again.
fn with_derived(settings: &Settings, records: Vec<PatientRecord>, feature_set: &FeatureSet) -> Vec<PatientRecord> {
    if !settings.schema.derive {
        return records;
    }
    records.iter().map(|r| project(&derive_noninvasive_hemodynamics(r), feature_set)).collect()
}

/// Loads every file with `feature_set`, removes outliers, derives indices
/// when configured and pools the records. Record ids must be unique across files.
fn load_records(settings: &Settings, paths: &[PathBuf], feature_set: &FeatureSet) -> Result<Vec<PatientRecord>, CliError> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for path in paths {
        let (cohort, report) =
            load_cohort(path, feature_set, &settings.schema).map_err(|e| cohort_error(settings, feature_set, e))?;
        let (cohort, outliers) = remove_outliers(&cohort, settings.outliers);
        tracing::info!(
            source = %report.source,
            records = report.records,
            outliers = outliers.removals.len(),
            "loaded cohort"
        );
        for r in with_derived(settings, cohort.records, feature_set) {
            if !seen.insert(r.record_id.clone()) {
                return Err(CliError::Data(format!("record id `{}` appears twice ({})", r.record_id, path.display())));
            }
            records.push(r);
        }
    }
    Ok(records)
}

/// Every configured and built-in feature, so one file can feed several sets.
fn union_set(settings: &Settings) -> FeatureSet {
    let builtin = BUILTIN_FEATURE_SETS.iter().filter_map(|n| FeatureSet::builtin(n));
    let mut features = Vec::new();
    let mut seen = HashSet::new();
    for set in settings.feature_sets.iter().cloned().chain(builtin) {
        for f in set.features {
            if seen.insert(f.name.to_ascii_lowercase()) {
                features.push(f);
            }
        }
    }
    FeatureSet { name: "pooled".into(), features }
}

fn data_paths(settings: &Settings, flags: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let paths = if flags.is_empty() { settings.data.clone() } else { flags.to_vec() };
    if paths.is_empty() {
        return Err(CliError::Config("no cohort files: pass --data or set `data` in the config".into()));
    }
    Ok(paths)
}

fn labels_path(settings: &Settings, flag: Option<&PathBuf>, feature_set: &str, outcome: Outcome) -> PathBuf {
    let base = flag.cloned().unwrap_or_else(|| settings.labels.clone());
    if base.extension().is_some_and(|e| e == "json") {
        base
    } else {
        base.join(format!("{}.json", pair_stem(feature_set, outcome)))
    }
}

fn load_labels(path: &Path, feature_set: &str, outcome: Outcome, k: Option<usize>) -> Result<LabelingDocument, CliError> {
    if !path.exists() {
        return Err(CliError::Data(format!("labels {} not found; run `label` first", path.display())));
    }
    let doc = match Document::load(path).map_err(model_error)? {
        Document::Labeling(l) => l,
        other => {
            return Err(CliError::Compatibility(format!("{} holds a {} document, not labels", path.display(), other.kind())))
        }
    };
    let l = &doc.labeling;
    if l.feature_set != feature_set || l.outcome != outcome || k.is_some_and(|k| k != l.k) {
        return Err(CliError::Compatibility(format!(
            "labels {} are for ({}, {}, k = {}), expected ({feature_set}, {outcome}{})",
            path.display(),
            l.feature_set,
            l.outcome,
            l.k,
            k.map_or(String::new(), |k| format!(", k = {k}"))
        )));
    }
    Ok(doc)
}

pub(super) fn generate(settings: &Settings, args: &GenerateArgs) -> Result<(), CliError> {
    let mut spec = settings.synth.clone();
    if let Some(n) = args.n {
        spec.n_records = n;
    }
    if let Some(m) = args.missing_rate {
        spec.missing_rate = m;
    }
    let synth = generate_cohort(&spec).map_err(|e| CliError::Config(e.to_string()))?;
    let dir = settings.out.join("synthetic");
    write_synth(&dir, "cohort", &synth)?;
    println!(
        "wrote {} records ({} features, {:.1}% missing) to {}",
        synth.cohort.records.len(),
        synth.cohort.feature_set.len(),
        100.0 * synth.cohort.missing_fraction(),
        dir.join("cohort.csv").display()
    );
    if args.substitution_fixture {
        let f = substitution_fixture(1000, 500, settings.stream("synth"));
        write_synth(&dir, "substitution_train", &f.train)?;
        write_synth(&dir, "substitution_test", &f.test)?;
        println!("wrote substitution fixture ({} masked, {} substitute)", f.masked, f.substitute);
    }
    Ok(())
}

fn write_synth(dir: &Path, stem: &str, synth: &SynthCohort) -> Result<(), CliError> {
    let mut csv = Vec::new();
    write_cohort(&synth.cohort, &Outcome::ALL, &mut csv).map_err(data_err)?;
    write_file(&dir.join(format!("{stem}.csv")), &String::from_utf8_lossy(&csv))?;
    let mut sidecar = Vec::new();
    synth.write_sidecar(&mut sidecar).map_err(data_err)?;
    let name = if stem == "cohort" { "strata.csv".to_string() } else { format!("{stem}.strata.csv") };
    write_file(&dir.join(name), &String::from_utf8_lossy(&sidecar))
}

/// Class table of one labeling with per-cohort event rates.
pub fn labeling_summary(doc: &LabelingDocument) -> String {
    let l = &doc.labeling;
    let cohorts: Vec<&String> = {
        let mut c: Vec<&String> = l.classes.iter().flat_map(|c| c.per_cohort.keys()).collect();
        c.sort();
        c.dedup();
        c
    };
    let mut out = format!(
        "Feature set: {}\nOutcome: {}\nClasses: {} (elbow {}{})\nC-index: {}\n\n",
        l.feature_set,
        l.outcome,
        l.k,
        doc.elbow_k,
        if doc.elbow_low_confidence { ", low confidence" } else { "" },
        doc.c_index.map_or("n/a".to_string(), |c| format!("{c:.4}"))
    );
    let _ = write!(out, "{:<6} {:<20} {:<10} {:>6} {:>7} {:>7}", "Class", "Name", "Band", "N", "Events", "Rate");
    for c in &cohorts {
        let _ = write!(out, " {:>12}", c);
    }
    out.push('\n');
    for c in &l.classes {
        let _ = write!(
            out,
            "{:<6} {:<20} {:<10} {:>6} {:>7} {:>7.3}",
            c.class.0,
            c.name,
            c.band.label(),
            c.overall.n,
            c.overall.events,
            c.overall.mean()
        );
        for cohort in &cohorts {
            match c.per_cohort.get(*cohort) {
                Some(r) => {
                    let _ = write!(out, " {:>12.3}", r.mean());
                }
                None => {
                    let _ = write!(out, " {:>12}", "nan");
                }
            }
        }
        out.push('\n');
    }
    if !l.excluded.is_empty() {
        let _ = writeln!(out, "\n{} records without a known outcome were excluded", l.excluded.len());
    }
    out
}

pub(super) fn label(settings: &Settings, args: &LabelArgs) -> Result<(), CliError> {
    let paths = data_paths(settings, &args.data)?;
    let records = load_records(settings, &paths, &union_set(settings))?;
    let mut options = settings.labeling.clone();
    if let Some(l) = &args.linkage {
        options.linkage = l.parse::<Linkage>().map_err(CliError::Config)?;
    }
    if let Some(k_max) = args.k_max {
        options.k_max = k_max;
    }
    for fs in &settings.feature_sets {
        let projected: Vec<PatientRecord> = records.iter().map(|r| project(r, fs)).collect();
        let clustering = cluster_records(&projected, fs, &options).map_err(data_err)?;
        let dir = &settings.labels;
        let mut elbow = String::from("k,wss\n");
        for (k, w) in &clustering.elbow.curve {
            let _ = writeln!(elbow, "{k},{w}");
        }
        write_file(&dir.join(format!("{}.elbow.csv", fs.name)), &elbow)?;
        let mut embedding = String::from("record_id,pc1,pc2,cluster\n");
        for (p, c) in clustering.points.iter().zip(&clustering.model.assignments) {
            let _ = writeln!(embedding, "{},{},{},{}", p.record_id, p.coords[0], p.coords[1], c);
        }
        write_file(&dir.join(format!("{}.embedding.csv", fs.name)), &embedding)?;

        for &outcome in &settings.outcomes {
            let doc = LabelingDocument::from_clustering(&clustering, &projected, outcome).map_err(data_err)?;
            let stem = pair_stem(&fs.name, outcome);
            let mut classes = String::from("record_id,cohort,class\n");
            for r in &projected {
                if let Some(c) = doc.labeling.class_of.get(&r.record_id) {
                    let _ = writeln!(classes, "{},{},{}", r.record_id, r.cohort_id, c);
                }
            }
            write_file(&dir.join(format!("{stem}.csv")), &classes)?;
            let summary = labeling_summary(&doc);
            write_file(&dir.join(format!("{stem}.summary.txt")), &summary)?;
            Document::Labeling(doc).save(&dir.join(format!("{stem}.json"))).map_err(model_error)?;
            println!("{summary}");
        }
    }
    Ok(())
}

fn train_error(e: TrainError) -> CliError {
    match e {
        TrainError::InvalidParams(_) => CliError::Config(e.to_string()),
        _ => data_err(e),
    }
}

fn folds_csv(rows: impl Iterator<Item = (usize, usize, usize, EvalReport, f64)>) -> String {
    let mut out = String::from("fold,depth,n_validation,coverage,auc,auc_ci,accuracy,accuracy_ci,sensitivity,sensitivity_ci,specificity,specificity_ci\n");
    let cell = |v: Option<f64>| v.map_or_else(String::new, |v| v.to_string());
    for (fold, depth, n, r, coverage) in rows {
        let _ = write!(out, "{},{depth},{n},{coverage}", fold + 1);
        for m in [&r.auc, &r.accuracy, &r.sensitivity, &r.specificity] {
            let _ = write!(out, ",{},{}", cell(m.value), cell(m.ci));
        }
        out.push('\n');
    }
    out
}

pub(super) fn train(settings: &Settings, args: &TrainArgs) -> Result<(), CliError> {
    let paths = data_paths(settings, &args.data)?;
    let mut params = settings.train.clone();
    if let Some(m) = args.min_samples_leaf {
        params.min_samples_leaf = m;
    }
    if args.max_depth.is_some() {
        params.max_depth = args.max_depth;
    }
    if let Some(t) = args.or_gain_threshold {
        params.or_gain_threshold = t;
    }
    params.check().map_err(train_error)?;
    let baselines: Vec<BaselineKind> =
        args.baselines.iter().map(|b| b.parse()).collect::<Result<_, _>>().map_err(CliError::Config)?;

    let records = load_records(settings, &paths, &union_set(settings))?;
    let dir = settings.out.join("models");
    for fs in &settings.feature_sets {
        let projected: Vec<PatientRecord> = records.iter().map(|r| project(r, fs)).collect();
        for &outcome in &settings.outcomes {
            let labels = load_labels(&labels_path(settings, args.labels.as_ref(), &fs.name, outcome), &fs.name, outcome, None)?;
            let data =
                TrainingSet::from_records(&projected, &labels.labeling.class_of, fs, outcome, labels.labeling.k)
                    .map_err(train_error)?;
            let stem = pair_stem(&fs.name, outcome);
            let cv = cross_validate(&data, &params).map_err(train_error)?;
            let table = fold_table(&cv);
            write_file(&dir.join(format!("{stem}.folds.txt")), &table)?;
            write_file(
                &dir.join(format!("{stem}.folds.csv")),
                &folds_csv(cv.folds.iter().map(|f| (f.fold, f.depth, f.validation_size, f.validation.clone(), f.coverage))),
            )?;
            let selected = cv.selected;
            Document::Mvdd(cv.into_selected_model())
                .save(&dir.join(format!("{stem}.mvdd.json")))
                .map_err(model_error)?;
            println!("{stem}: selected fold {}\n{table}", selected + 1);

            for &kind in &baselines {
                let mut hyper = Hyperparams::defaults(kind);
                if let Hyperparams::DecisionTree(p) = &mut hyper {
                    p.criterion = params.criterion;
                    p.min_samples_leaf = params.min_samples_leaf;
                    p.max_depth = params.max_depth;
                }
                let bcv = cross_validate_baseline(&hyper, &data, params.folds, params.seed, params.stratified)
                    .map_err(data_err)?;
                write_file(
                    &dir.join(format!("{stem}.{}.folds.csv", kind.name())),
                    &folds_csv(bcv.folds.iter().map(|f| (f.fold, 0, f.validation_size, f.validation.clone(), 1.0))),
                )?;
                let model = bcv.folds.into_iter().nth(bcv.selected).expect("selected fold exists").model;
                Document::Baseline(model).save(&dir.join(format!("{stem}.{}.json", kind.name()))).map_err(model_error)?;
            }
        }
    }
    Ok(())
}

/// Class and per-class scores of a record; `None` when the model cannot score it.
fn score(doc: &Document, record: &PatientRecord) -> Result<Option<(RiskClass, Vec<f64>)>, CliError> {
    match doc {
        Document::Mvdd(m) => match m.evaluate(record) {
            Ok(e) => Ok(Some((e.class, e.distribution))),
            Err(MvddEvalError::IndeterminatePrediction { .. }) => Ok(None),
            Err(e) => Err(CliError::Data(format!("record `{}`: {e}", record.record_id))),
        },
        Document::Baseline(b) => {
            let p = b.predict(record);
            Ok(Some((p.class, p.scores)))
        }
        Document::Labeling(_) => Err(CliError::Compatibility("labeling documents do not predict".into())),
    }
}

fn model_feature_set(settings: &Settings, doc: &Document) -> Result<FeatureSet, CliError> {
    settings.feature_set(doc.feature_set()).ok_or_else(|| {
        CliError::Compatibility(format!(
            "model feature set `{}` is unknown; pass its manifest with --feature-set",
            doc.feature_set()
        ))
    })
}

/// Scored records of one cohort.
#[derive(Default)]
struct Scores {
    truth: Vec<RiskClass>,
    predictions: Vec<RiskClass>,
    scores: Vec<Vec<f64>>,
    probabilities: Vec<f64>,
    events: Vec<bool>,
    records: usize,
    indeterminate: Vec<String>,
}

impl Scores {
    fn report(&self, k: usize, bootstrap: Option<(usize, u64)>) -> EvalReport {
        let mut r = evaluate_predictions(&self.truth, &self.predictions, Some(&self.scores), k);
        if let Some((reps, seed)) = bootstrap {
            r.auc.ci = bootstrap_auc_ci(&self.truth, &self.scores, k, reps, seed);
            r.ci_method = format!("normal approximation for proportions; percentile bootstrap ({reps} resamples) for AUC");
        }
        r
    }
}

pub(super) fn evaluate(settings: &Settings, args: &EvaluateArgs) -> Result<(), CliError> {
    let doc = load_model(&args.model)?;
    let fs = model_feature_set(settings, &doc)?;
    let (k, outcome) = (doc.k(), doc.outcome());
    let labels = load_labels(&labels_path(settings, args.labels.as_ref(), &fs.name, outcome), &fs.name, outcome, Some(k))?;
    let paths = data_paths(settings, &args.data)?;
    let records = load_records(settings, &paths, &fs)?;
    let bands = probability_bands(k);

    let mut by_cohort: BTreeMap<String, Scores> = BTreeMap::new();
    let mut pooled = Scores::default();
    for record in &records {
        let entry = by_cohort.entry(record.cohort_id.clone()).or_default();
        for s in [&mut *entry, &mut pooled] {
            s.records += 1;
        }
        let Some((class, scores)) = score(&doc, record)? else {
            entry.indeterminate.push(record.record_id.clone());
            pooled.indeterminate.push(record.record_id.clone());
            continue;
        };
        let truth = labels.class_of(record);
        let event = record.outcome(outcome);
        for s in [&mut *entry, &mut pooled] {
            s.truth.push(truth);
            s.predictions.push(class);
            s.scores.push(scores.clone());
            if let Some(e) = event {
                s.probabilities.push(bands[class.index()].midpoint());
                s.events.push(e);
            }
        }
    }

    let bootstrap = args.bootstrap.map(|reps| (reps, settings.stream("eval")));
    let name = model_name(&args.model);
    let reports: Vec<(String, &Scores, EvalReport)> = by_cohort
        .iter()
        .map(|(c, s)| (c.clone(), s, s.report(k, bootstrap)))
        .chain(std::iter::once(("pooled".to_string(), &pooled, pooled.report(k, bootstrap))))
        .collect();
    let table_rows: Vec<PerformanceRow> =
        reports.iter().map(|(label, _, report)| PerformanceRow { label: label.clone(), report }).collect();
    let calib = calibration(&pooled.probabilities, &pooled.events);

    let mut text = format!("Model: {name} ({}, {outcome}, k = {k})\n\n", fs.name);
    text.push_str(&performance_table(&table_rows));
    for (label, s, _) in &reports {
        if !s.indeterminate.is_empty() {
            let _ = writeln!(text, "{label}: {} of {} records indeterminate", s.indeterminate.len(), s.records);
        }
    }
    let mut classes = String::from("cohort,");
    let mut roc = String::from("cohort,");
    for (i, (label, _, report)) in reports.iter().enumerate() {
        for (j, line) in class_table_csv(report).lines().enumerate() {
            if j == 0 && i > 0 {
                continue;
            }
            let _ = writeln!(classes, "{}{line}", if j == 0 { String::new() } else { format!("{label},") });
        }
        for (j, line) in roc_points_csv(&report.per_class).lines().enumerate() {
            if j == 0 && i > 0 {
                continue;
            }
            let _ = writeln!(roc, "{}{line}", if j == 0 { String::new() } else { format!("{label},") });
        }
    }
    let json_report = json!({
        "model": name,
        "kind": doc.kind(),
        "feature_set": fs.name,
        "outcome": outcome,
        "k": k,
        "cohorts": reports.iter().map(|(label, s, report)| json!({
            "cohort": label,
            "records": s.records,
            "scored": s.truth.len(),
            "indeterminate": s.indeterminate,
            "report": report,
        })).collect::<Vec<_>>(),
        "calibration": calib,
    });

    let dir = settings.out.join("eval").join(&name);
    write_file(&dir.join("report.json"), &(serde_json::to_string_pretty(&json_report).map_err(data_err)? + "\n"))?;
    write_file(&dir.join("performance.txt"), &text)?;
    write_file(&dir.join("performance.csv"), &performance_csv(&table_rows))?;
    write_file(&dir.join("classes.csv"), &classes)?;
    write_file(&dir.join("roc.csv"), &roc)?;
    write_file(&dir.join("calibration.csv"), &calibration_csv(&calib))?;
    print!("{text}");
    Ok(())
}

pub(super) fn compare(settings: &Settings, args: &CompareArgs) -> Result<(), CliError> {
    if args.models.len() < 2 {
        return Err(CliError::Config("compare needs a reference model and at least one other".into()));
    }
    let docs = args.models.iter().map(|p| load_model(p)).collect::<Result<Vec<_>, _>>()?;
    let reference = &docs[0];
    for (doc, path) in docs.iter().zip(&args.models).skip(1) {
        if doc.feature_set() != reference.feature_set() || doc.outcome() != reference.outcome() || doc.k() != reference.k() {
            return Err(CliError::Compatibility(format!(
                "{} is for ({}, {}, k = {}), the reference for ({}, {}, k = {})",
                path.display(),
                doc.feature_set(),
                doc.outcome(),
                doc.k(),
                reference.feature_set(),
                reference.outcome(),
                reference.k()
            )));
        }
    }
    let fs = model_feature_set(settings, reference)?;
    let (k, outcome) = (reference.k(), reference.outcome());
    let labels = load_labels(&labels_path(settings, args.labels.as_ref(), &fs.name, outcome), &fs.name, outcome, Some(k))?;
    let records = load_records(settings, &data_paths(settings, &args.data)?, &fs)?;

    let mut truth = Vec::new();
    let mut scores: Vec<Vec<Vec<f64>>> = vec![Vec::new(); docs.len()];
    let mut skipped = 0;
    'records: for record in &records {
        let mut row = Vec::with_capacity(docs.len());
        for doc in &docs {
            match score(doc, record)? {
                Some((_, s)) => row.push(s),
                None => {
                    skipped += 1;
                    continue 'records;
                }
            }
        }
        truth.push(labels.class_of(record));
        for (col, s) in scores.iter_mut().zip(row) {
            col.push(s);
        }
    }
    let names: Vec<String> = args.models.iter().map(|p| model_name(p)).collect();
    let mut rows = Vec::new();
    for j in 1..docs.len() {
        let result = delong_multiclass(&truth, &scores[0], &scores[j], k).map_err(data_err)?;
        rows.push(ComparisonRow { label: format!("{} vs {}", names[0], names[j]), result });
    }
    let mut text = format!("{} records ({outcome}); {skipped} not scored by every model\n\n", truth.len());
    text.push_str(&comparison_table(&rows));
    let dir = settings.out.join("compare").join(&names[0]);
    write_file(&dir.join("comparison.txt"), &text)?;
    write_file(&dir.join("comparison.csv"), &comparison_csv(&rows))?;
    print!("{text}");
    Ok(())
}

fn predict_error(e: PredictError) -> CliError {
    match e {
        PredictError::Indeterminate { .. } => CliError::Indeterminate(e.to_string()),
        PredictError::NotAModel(_) => CliError::Compatibility(e.to_string()),
        _ => data_err(e),
    }
}

pub(super) fn predict(settings: &Settings, args: &PredictArgs) -> Result<(), CliError> {
    let doc = load_model(&args.model)?;
    let fs = model_feature_set(settings, &doc)?;
    let Some(path) = &args.record_file else {
        let mut raw = BTreeMap::new();
        for pair in &args.values {
            let (name, value) = pair
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("expected NAME=VALUE, got `{pair}`")))?;
            raw.insert(name.trim().to_string(), RawValue::Text(value.trim().to_string()));
        }
        let response = predict_request(&doc, &fs, &raw).map_err(predict_error)?;
        if args.json {
            println!("{}", serde_json::to_string_pretty(&response).map_err(data_err)?);
        } else {
            print!("{}", render_text(&response));
        }
        return Ok(());
    };
    let mut schema = settings.schema.clone();
    schema.outcomes.clear();
    let (cohort, _) = load_cohort(path, &fs, &schema).map_err(|e| cohort_error(settings, &fs, e))?;
    let records = with_derived(settings, cohort.records, &fs);
    let mut indeterminate = Vec::new();
    for record in &records {
        let warnings = record
            .values
            .iter()
            .filter(|(name, v)| fs.get(name).is_some_and(|s| !s.admits(**v)))
            .map(|(name, v)| format!("{name} = {v} is outside its declared values"))
            .collect();
        match predict_values(&doc, &record.values, warnings) {
            Ok(r) if args.json => println!(
                "{}",
                serde_json::to_string(&json!({ "record_id": record.record_id, "prediction": r })).map_err(data_err)?
            ),
            Ok(r) => print!("{}: {}", record.record_id, render_text(&r)),
            Err(PredictError::Indeterminate { features }) => {
                if args.json {
                    println!(
                        "{}",
                        json!({ "record_id": record.record_id, "indeterminate": true, "missing_features": features })
                    );
                } else {
                    println!("{}: indeterminate, no value for any of {}", record.record_id, features.join(", "));
                }
                indeterminate.push(record.record_id.clone());
            }
            Err(e) => return Err(predict_error(e)),
        }
    }
    if !indeterminate.is_empty() {
        return Err(CliError::Indeterminate(format!(
            "{} of {} records could not be scored: {}",
            indeterminate.len(),
            records.len(),
            indeterminate.join(", ")
        )));
    }
    Ok(())
}

pub(super) fn export(args: &ExportArgs) -> Result<(), CliError> {
    let mvdd = match Document::load(&args.model).map_err(model_error)? {
        Document::Mvdd(m) => m,
        other => return Err(CliError::Compatibility(format!("cannot export a {} document", other.kind()))),
    };
    let text = match args.format.to_ascii_lowercase().as_str() {
        "dot" => export_dot(&mvdd),
        "json" => Document::Mvdd(canonicalize(&mvdd)).to_json(),
        other => return Err(CliError::Config(format!("unknown export format `{other}` (dot or json)"))),
    };
    match &args.to {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub(super) fn serve(settings: &Settings, args: &ServeArgs) -> Result<(), CliError> {
    let dir = args
        .model_dir
        .clone()
        .or_else(|| settings.model_dir.clone())
        .unwrap_or_else(|| settings.out.join("models"));
    let addr: std::net::SocketAddr =
        args.bind.parse().map_err(|e| CliError::Config(format!("bind address `{}`: {e}", args.bind)))?;
    let mut state = ServiceState::load_dir(&dir).map_err(|e| match e {
        ServiceError::DuplicateModel { .. } => CliError::Config(e.to_string()),
        _ => data_err(e),
    })?;
    for set in &settings.feature_sets {
        state.add_feature_set(set.clone());
    }
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::Config(format!("cannot start runtime: {e}")))?;
    runtime
        .block_on(crate::service::serve(addr, state))
        .map_err(|e| CliError::Config(format!("cannot serve on {addr}: {e}")))
}
