//! Delimited cohort files.
//!
//! One header row, one data row per patient (or per patient and timepoint).
//! Recognised columns, matched case-insensitively:
//!
//! * `record_id`: optional, rows are numbered `row-1`, `row-2`, ... otherwise
//! * `cohort`: optional, defaults to [`SchemaOptions::cohort_id`]
//! * `timepoint`: optional `baseline`/`discharge`
//! * one column per outcome in [`SchemaOptions::outcomes`] (`1/0`, `true/false`, `yes/no`)
//! * feature columns named as in the feature set, or suffixed with the
//!   timepoint suffixes when [`SchemaOptions::timepoint_suffixes`] is set

use std::collections::{BTreeMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Cohort, CohortError, FeatureSet, OutlierRemoval, PatientRecord, Timepoint};
use crate::Outcome;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SchemaOptions {
    pub delimiter: char,
    /// Cell contents treated as absent values.
    pub sentinels: Vec<String>,
    /// Outcome columns that must be present. Empty declares outcomes absent.
    pub outcomes: Vec<Outcome>,
    /// Cohort id for rows without a `cohort` column; the file stem when unset.
    pub cohort_id: Option<String>,
    /// Baseline and discharge column suffixes, e.g. `("_bl", "_dc")`.
    pub timepoint_suffixes: Option<(String, String)>,
    /// Fill MAP, PP, CPI and PAPI from their inputs. Callers apply it after
    /// outlier removal; [`read_cohort`] itself never derives.
    pub derive: bool,
}

impl Default for SchemaOptions {
    fn default() -> Self {
        SchemaOptions {
            delimiter: ',',
            sentinels: vec![String::new(), "NA".to_string()],
            outcomes: Outcome::ALL.to_vec(),
            cohort_id: None,
            timepoint_suffixes: None,
            derive: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedTimepoint {
    pub record_id: String,
    pub timepoint: Timepoint,
}

/// Summary of one ingest run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub source: String,
    pub rows_read: usize,
    pub records: usize,
    /// Absent cells per column.
    pub absent_cells: BTreeMap<String, usize>,
    pub skipped_timepoints: Vec<SkippedTimepoint>,
    pub removed_outliers: Vec<OutlierRemoval>,
    pub missing_fraction: f64,
}

impl IngestReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

/// One input row before timepoint splitting.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawRow {
    pub record_id: String,
    pub cohort_id: String,
    /// Values from unsuffixed columns, copied into every emitted record.
    pub shared: BTreeMap<String, f64>,
    pub baseline: BTreeMap<String, f64>,
    pub discharge: BTreeMap<String, f64>,
    pub outcomes: BTreeMap<Outcome, bool>,
}

/// Emits one record per timepoint that has at least one timepoint-specific
/// value. Skipped timepoints are appended to `report`.
pub fn split_timepoints(rows: &[RawRow], report: &mut IngestReport) -> Vec<PatientRecord> {
    let mut out = Vec::new();
    for row in rows {
        for (timepoint, values) in
            [(Timepoint::Baseline, &row.baseline), (Timepoint::Discharge, &row.discharge)]
        {
            if values.is_empty() {
                report.skipped_timepoints.push(SkippedTimepoint {
                    record_id: row.record_id.clone(),
                    timepoint,
                });
                continue;
            }
            let mut merged = row.shared.clone();
            merged.extend(values.iter().map(|(k, v)| (k.clone(), *v)));
            out.push(PatientRecord {
                record_id: format!("{}@{}", row.record_id, timepoint.name()),
                cohort_id: row.cohort_id.clone(),
                timepoint,
                values: merged,
                outcomes: row.outcomes.clone(),
            });
        }
    }
    out
}

#[derive(Debug, Clone)]
enum Column {
    RecordId,
    Cohort,
    Timepoint,
    Outcome(Outcome),
    Feature { index: usize, side: Option<Timepoint> },
}

fn classify(
    header: &str,
    feature_set: &FeatureSet,
    options: &SchemaOptions,
) -> Result<Column, CohortError> {
    let h = header.trim();
    let lower = h.to_ascii_lowercase();
    match lower.as_str() {
        "record_id" | "id" => return Ok(Column::RecordId),
        "cohort" | "cohort_id" => return Ok(Column::Cohort),
        "timepoint" => return Ok(Column::Timepoint),
        _ => {}
    }
    if let Ok(outcome) = h.parse::<Outcome>() {
        return Ok(Column::Outcome(outcome));
    }
    let lookup = |name: &str| {
        feature_set.features.iter().position(|f| f.name.eq_ignore_ascii_case(name))
    };
    if let Some((bl, dc)) = &options.timepoint_suffixes {
        for (suffix, side) in [(bl, Timepoint::Baseline), (dc, Timepoint::Discharge)] {
            let suffix = suffix.to_ascii_lowercase();
            if !suffix.is_empty() && lower.ends_with(&suffix) {
                if let Some(index) = lookup(&h[..h.len() - suffix.len()]) {
                    return Ok(Column::Feature { index, side: Some(side) });
                }
            }
        }
    }
    match lookup(h) {
        Some(index) => Ok(Column::Feature { index, side: None }),
        None => Err(CohortError::UnknownColumn(h.to_string())),
    }
}

fn parse_outcome(text: &str) -> Option<bool> {
    match text.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "1.0" => Some(true),
        "0" | "false" | "no" | "0.0" => Some(false),
        _ => None,
    }
}

/// Reads a cohort file from disk. See [`read_cohort`].
pub fn load_cohort(
    path: &Path,
    feature_set: &FeatureSet,
    options: &SchemaOptions,
) -> Result<(Cohort, IngestReport), CohortError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CohortError::Io { path: path.display().to_string(), message: e.to_string() })?;
    let mut options = options.clone();
    if options.cohort_id.is_none() {
        options.cohort_id =
            Some(path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
    }
    let (cohort, mut report) = read_cohort(file, feature_set, &options)?;
    report.source = path.display().to_string();
    Ok((cohort, report))
}

/// Parses delimited text into a cohort. Row order is preserved; empty cells and
/// sentinel tokens become absent values.
pub fn read_cohort<R: Read>(
    reader: R,
    feature_set: &FeatureSet,
    options: &SchemaOptions,
) -> Result<(Cohort, IngestReport), CohortError> {
    let delimiter = u8::try_from(options.delimiter)
        .map_err(|_| CohortError::Format("delimiter must be a single-byte character".into()))?;
    let mut csv = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = csv.headers().map_err(|e| CohortError::Format(e.to_string()))?.clone();
    let columns = headers
        .iter()
        .map(|h| classify(h, feature_set, options))
        .collect::<Result<Vec<_>, _>>()?;
    for outcome in &options.outcomes {
        if !columns.iter().any(|c| matches!(c, Column::Outcome(o) if o == outcome)) {
            return Err(CohortError::MissingOutcomeColumn(outcome.name().to_string()));
        }
    }
    let default_cohort = options.cohort_id.clone().unwrap_or_else(|| "cohort".to_string());
    let split = options.timepoint_suffixes.is_some();
    let is_sentinel = |cell: &str| options.sentinels.iter().any(|s| s == cell);

    let mut report = IngestReport::default();
    let mut raw_rows = Vec::new();
    let mut records = Vec::new();
    let mut seen_ids = HashSet::new();

    for (row_index, row) in csv.records().enumerate() {
        let row = row.map_err(|e| CohortError::Format(e.to_string()))?;
        let line = row_index + 1;
        report.rows_read += 1;
        let mut raw = RawRow {
            record_id: format!("row-{line}"),
            cohort_id: default_cohort.clone(),
            ..RawRow::default()
        };
        let mut timepoint = Timepoint::Baseline;
        for ((cell, column), header) in row.iter().zip(&columns).zip(headers.iter()) {
            match column {
                Column::RecordId => {
                    if !cell.is_empty() {
                        raw.record_id = cell.to_string();
                    }
                }
                Column::Cohort => {
                    if !cell.is_empty() {
                        raw.cohort_id = cell.to_string();
                    }
                }
                Column::Timepoint => {
                    timepoint = Timepoint::parse(cell).ok_or_else(|| CohortError::MalformedNumber {
                        row: line,
                        column: header.to_string(),
                        value: cell.to_string(),
                    })?;
                }
                Column::Outcome(outcome) => {
                    if is_sentinel(cell) {
                        continue;
                    }
                    let value = parse_outcome(cell).ok_or_else(|| CohortError::MalformedNumber {
                        row: line,
                        column: header.to_string(),
                        value: cell.to_string(),
                    })?;
                    raw.outcomes.insert(*outcome, value);
                }
                Column::Feature { index, side } => {
                    if is_sentinel(cell) {
                        *report.absent_cells.entry(header.to_string()).or_default() += 1;
                        continue;
                    }
                    let spec = &feature_set.features[*index];
                    let value = spec.parse_value(cell).ok_or_else(|| CohortError::MalformedNumber {
                        row: line,
                        column: header.to_string(),
                        value: cell.to_string(),
                    })?;
                    let target = match side {
                        None => &mut raw.shared,
                        Some(Timepoint::Baseline) => &mut raw.baseline,
                        Some(Timepoint::Discharge) => &mut raw.discharge,
                    };
                    target.insert(spec.name.clone(), value);
                }
            }
        }
        if !seen_ids.insert(raw.record_id.clone()) {
            return Err(CohortError::DuplicateRecordId(raw.record_id));
        }
        if split {
            raw_rows.push(raw);
        } else {
            records.push(PatientRecord {
                record_id: raw.record_id,
                cohort_id: raw.cohort_id,
                timepoint,
                values: raw.shared,
                outcomes: raw.outcomes,
            });
        }
    }
    if split {
        records = split_timepoints(&raw_rows, &mut report);
    }
    let cohort = Cohort::new(default_cohort, feature_set.clone(), records);
    report.records = cohort.records.len();
    report.missing_fraction = cohort.missing_fraction();
    Ok((cohort, report))
}

fn format_value(value: f64) -> String {
    format!("{value}")
}

/// Writes records in the format [`read_cohort`] accepts, with `record_id`,
/// `cohort` and `timepoint` columns, one column per feature of the cohort's
/// set and one per outcome in `outcomes`.
pub fn write_cohort<W: Write>(cohort: &Cohort, outcomes: &[Outcome], writer: W) -> Result<(), CohortError> {
    let mut out = csv::Writer::from_writer(writer);
    let io_err = |e: csv::Error| CohortError::Io { path: "<writer>".into(), message: e.to_string() };
    let mut header = vec!["record_id".to_string(), "cohort".to_string(), "timepoint".to_string()];
    header.extend(cohort.feature_set.names().map(str::to_string));
    header.extend(outcomes.iter().map(|o| o.name().to_string()));
    out.write_record(&header).map_err(io_err)?;
    for record in &cohort.records {
        let mut row = vec![
            record.record_id.clone(),
            record.cohort_id.clone(),
            record.timepoint.name().to_string(),
        ];
        row.extend(
            cohort
                .feature_set
                .names()
                .map(|n| record.value(n).map(format_value).unwrap_or_default()),
        );
        row.extend(outcomes.iter().map(|o| match record.outcome(*o) {
            Some(true) => "1".to_string(),
            Some(false) => "0".to_string(),
            None => String::new(),
        }));
        out.write_record(&row).map_err(io_err)?;
    }
    out.flush().map_err(|e| CohortError::Io { path: "<writer>".into(), message: e.to_string() })?;
    Ok(())
}
