//! Delimited and plain-text tables for evaluation results.

use std::fmt::Write as _;

use super::calibration::CalibrationTable;
use super::delong::MulticlassDeLong;
use super::roc::ClassRoc;
use super::summary::{EvalReport, Metric};

/// `"<0.001"` below the floor, three decimals otherwise.
pub fn format_p_value(p: f64) -> String {
    if p < 0.001 {
        "<0.001".to_string()
    } else {
        format!("{p:.3}")
    }
}

fn raw(value: Option<f64>) -> String {
    value.map_or_else(String::new, |v| format!("{v}"))
}

fn metric_cells(m: &Metric) -> [String; 2] {
    [raw(m.value), raw(m.ci)]
}

/// One labelled row of a performance table.
pub struct PerformanceRow<'a> {
    pub label: String,
    pub report: &'a EvalReport,
}

const PERFORMANCE_HEADER: [&str; 4] = ["Averaged AUC", "Accuracy", "Sensitivity", "Specificity"];

/// Fixed-width table in the "value ± half-width" style.
pub fn performance_table(rows: &[PerformanceRow]) -> String {
    let width = rows.iter().map(|r| r.label.len()).max().unwrap_or(0).max(5);
    let mut out = format!("{:<width$}", "Model");
    for h in PERFORMANCE_HEADER {
        let _ = write!(out, "  {h:<15}");
    }
    out = out.trim_end().to_string();
    out.push('\n');
    for row in rows {
        let r = row.report;
        let mut line = format!("{:<width$}", row.label);
        for m in [&r.auc, &r.accuracy, &r.sensitivity, &r.specificity] {
            let _ = write!(line, "  {:<15}", m.display());
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// Raw values for export: one row per model, value and half-width columns.
pub fn performance_csv(rows: &[PerformanceRow]) -> String {
    let mut out = String::from("model,n,auc,auc_ci,accuracy,accuracy_ci,sensitivity,sensitivity_ci,specificity,specificity_ci,ci_method\n");
    for row in rows {
        let r = row.report;
        let mut cells = vec![row.label.clone(), r.n.to_string()];
        for m in [&r.auc, &r.accuracy, &r.sensitivity, &r.specificity] {
            cells.extend(metric_cells(m));
        }
        cells.push(format!("\"{}\"", r.ci_method));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Per-class AUC and support; classes without data render as `nan`.
pub fn class_table_csv(report: &EvalReport) -> String {
    let mut out = String::from("class,support,auc,accuracy,sensitivity,specificity\n");
    for (roc, m) in report.per_class.iter().zip(&report.class_metrics) {
        let nan = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), |v| format!("{v}"));
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            roc.class,
            roc.support,
            nan(roc.auc),
            m.accuracy,
            nan(m.sensitivity),
            nan(m.specificity)
        );
    }
    out
}

pub fn roc_points_csv(per_class: &[ClassRoc]) -> String {
    let mut out = String::from("class,threshold,fpr,tpr\n");
    for roc in per_class {
        for p in &roc.points {
            let _ = writeln!(out, "{},{},{},{}", roc.class, p.threshold, p.fpr, p.tpr);
        }
    }
    out
}

pub fn calibration_csv(table: &CalibrationTable) -> String {
    let mut out = String::from("lower,upper,count,mean_predicted,fraction_positive,empty\n");
    for b in &table.bins {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            b.lower,
            b.upper,
            b.count,
            raw(b.mean_predicted),
            raw(b.fraction_positive),
            b.is_empty()
        );
    }
    out
}

/// One row of a hypothesis-testing table: first model minus second.
pub struct ComparisonRow {
    pub label: String,
    pub result: MulticlassDeLong,
}

pub fn comparison_table(rows: &[ComparisonRow]) -> String {
    let width = rows.iter().map(|r| r.label.len()).max().unwrap_or(0).max(10);
    let mut out = format!("{:<width$}  {:>8}  {:>8}\n", "Comparison", "ΔAUC", "p-value");
    for row in rows {
        let _ = writeln!(
            out,
            "{:<width$}  {:>8.3}  {:>8}",
            row.label,
            row.result.delta,
            format_p_value(row.result.p_value)
        );
    }
    out
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("comparison,auc_a,auc_b,delta,variance,z,p_value\n");
    for row in rows {
        let r = &row.result;
        let _ = writeln!(out, "{},{},{},{},{},{},{}", row.label, r.auc_a, r.auc_b, r.delta, r.variance, r.z, r.p_value);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_value_floor() {
        assert_eq!(format_p_value(0.0004), "<0.001");
        assert_eq!(format_p_value(0.001), "0.001");
        assert_eq!(format_p_value(1.0), "1.000");
    }

    #[test]
    fn raw_p_kept_in_csv() {
        let result = MulticlassDeLong {
            per_class: vec![],
            auc_a: 0.9,
            auc_b: 0.7,
            delta: 0.2,
            variance: 0.001,
            z: 6.3,
            p_value: 2.5e-10,
        };
        let rows = [ComparisonRow { label: "mvdd vs knn".into(), result }];
        let csv = comparison_csv(&rows);
        let p: f64 = csv.lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap();
        assert_eq!(p, 2.5e-10);
        assert!(comparison_table(&rows).contains("<0.001"));
    }
}
