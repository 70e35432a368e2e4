//! Turns a pooled cohort into ordinal risk classes: imputation, a
//! two-dimensional embedding, Ward clustering with an elbow choice of the
//! number of classes, then ordering by observed event rate.

use mvdd_risk::labeling::{cluster_records, LabelOptions};
use mvdd_risk::synth::{generate, SynthSpec};
use mvdd_risk::{FeatureSet, Outcome};

fn main() {
    let synth = generate(&SynthSpec { n_records: 1500, seed: 11, ..SynthSpec::default() }).unwrap();
    let records = &synth.cohort.records;
    let clustering = cluster_records(records, &FeatureSet::invasive_hemodynamics(), &LabelOptions::default()).unwrap();

    let [first, second] = clustering.projection.explained_variance;
    println!("embedding keeps {:.1}% + {:.1}% of the variance", 100.0 * first, 100.0 * second);
    println!("within-cluster sum of squares by k:");
    for &(k, wss) in &clustering.elbow.curve {
        let mark = if k == clustering.elbow.recommended { "  <- elbow" } else { "" };
        println!("  k = {k:<2} {wss:>12.1}{mark}");
    }
    println!("C-index {:.4}\n", clustering.c_index.unwrap_or(f64::NAN));

    let labeling = clustering.label(records, Outcome::DeLvTx).unwrap();
    println!("class  band        n  events  rate");
    for class in &labeling.classes {
        println!(
            "{:>5}  {:<9} {:>4} {:>7}  {:.3}",
            class.class.0,
            class.band.label(),
            class.overall.n,
            class.overall.events,
            class.overall.mean()
        );
    }

    // New patients are placed by their nearest class centroid in the embedding.
    let assigner = clustering.assigner(&labeling);
    let agree = records.iter().filter(|r| assigner.assign(r) == labeling.class_of[&r.record_id]).count();
    println!("\ncentroid assignment agrees with the clustering on {agree} of {} records", records.len());
}
