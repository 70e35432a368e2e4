//! Loads a small wide-format cohort with baseline and discharge columns,
//! drops implausible values and derives the integrated hemodynamic indices.

use mvdd_risk::cohort::{derive_noninvasive_hemodynamics, read_cohort, remove_outliers, OutlierRule, SchemaOptions};
use mvdd_risk::{Cohort, FeatureSet};

const CSV: &str = "\
record_id,cohort,Sex,BPSYS_bl,BPDIAS_bl,CO_bl,BSA_bl,PAS_bl,PAD_bl,RAP_bl,BPSYS_dc,BPDIAS_dc,CO_dc,BSA_dc,DeLvTx,Rehospitalization
p1,trial,Male,112,70,4.1,1.9,48,22,9,118,74,4.6,1.9,0,1
p2,trial,Female,96,58,3.2,1.7,61,30,14,,,,,1,1
p3,registry,1,135,80,5.0,2.0,39,18,6,130,78,5.2,2.0,0,0
p4,registry,0,900,60,2.9,1.6,55,27,11,NA,NA,NA,NA,NA,0
";

fn main() {
    let features = FeatureSet::invasive_hemodynamics();
    let options = SchemaOptions {
        timepoint_suffixes: Some(("_bl".into(), "_dc".into())),
        cohort_id: Some("demo".into()),
        ..SchemaOptions::default()
    };
    let (cohort, report) = read_cohort(CSV.as_bytes(), &features, &options).expect("valid cohort");
    println!("{} rows -> {} records", report.rows_read, report.records);
    for skipped in &report.skipped_timepoints {
        println!("  no {:?} values for {}", skipped.timepoint, skipped.record_id);
    }

    // Outliers go first so that no index is computed from an implausible input.
    let (clean, outliers) = remove_outliers(&cohort, OutlierRule::Range);
    for removal in &outliers.removals {
        println!("  dropped {} = {} from {}", removal.feature, removal.value, removal.record_id);
    }
    let derived = Cohort::new(
        clean.cohort_id.clone(),
        clean.feature_set.clone(),
        clean.records.iter().map(derive_noninvasive_hemodynamics).collect(),
    );

    println!("\nrecord          cohort    MAP     CPI    PAPI");
    let show = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.3}"));
    for r in &derived.records {
        println!(
            "{:<15} {:<9} {:<7} {:<6} {}",
            r.record_id,
            r.cohort_id,
            show(r.value("MAP")),
            show(r.value("CPI")),
            show(r.value("PAPI"))
        );
    }
    println!("\nmissing fraction {:.3}", derived.missing_fraction());
}
