//! Labels a synthetic cohort, grows a diagram under five-fold
//! cross-validation and explains a few of its predictions.

use mvdd_risk::labeling::{cluster_records, LabelOptions};
use mvdd_risk::synth::{generate, SynthSpec};
use mvdd_risk::train::{cross_validate, fold_table, TrainParams, TrainingSet};
use mvdd_risk::{FeatureSet, Outcome};

fn main() {
    let features = FeatureSet::invasive_hemodynamics();
    let synth = generate(&SynthSpec { n_records: 1500, seed: 3, ..SynthSpec::default() }).unwrap();
    let records = &synth.cohort.records;
    let labeling = cluster_records(records, &features, &LabelOptions::default())
        .and_then(|c| c.label(records, Outcome::DeLvTx))
        .unwrap();

    let data = TrainingSet::from_records(records, &labeling.class_of, &features, Outcome::DeLvTx, labeling.k).unwrap();
    let cv = cross_validate(&data, &TrainParams::default()).unwrap();
    println!("{}", fold_table(&cv));

    let model = cv.selected_model();
    println!(
        "selected fold {}: {} nodes, depth {}, OR edges: {}",
        cv.selected + 1,
        model.nodes.len(),
        model.depth(),
        model.has_or_edges()
    );
    println!("features used: {}\n", model.features().join(", "));

    for record in records.iter().take(6) {
        match model.evaluate(record) {
            Ok(e) => {
                println!("{} (labelled {}): {}", record.record_id, labeling.class_of[&record.record_id], e.phenotype);
                for s in &e.phenotype.used_substitution {
                    println!("    {} missing, tested {} instead", s.missing, s.substitute);
                }
            }
            Err(err) => println!("{}: {err}", record.record_id),
        }
    }
}
