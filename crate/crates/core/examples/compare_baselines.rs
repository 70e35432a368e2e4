//! Trains the diagram and the three baselines on the same split, tabulates
//! weighted performance and tests each baseline against the diagram with a
//! paired DeLong test on the records the diagram can score.

use mvdd_risk::baselines::{BaselineKind, BaselineModel, Hyperparams};
use mvdd_risk::eval::{delong_multiclass, evaluate_predictions, format_p_value, performance_table, PerformanceRow};
use mvdd_risk::labeling::{cluster_records, LabelOptions};
use mvdd_risk::synth::{generate, SynthSpec};
use mvdd_risk::train::{grow_mvdd, TrainParams, TrainingSet};
use mvdd_risk::{FeatureSet, Outcome, RiskClass};

fn main() {
    let features = FeatureSet::invasive_hemodynamics();
    let synth = generate(&SynthSpec { n_records: 2000, seed: 5, ..SynthSpec::default() }).unwrap();
    let records = &synth.cohort.records;
    let labeling = cluster_records(records, &features, &LabelOptions::default())
        .and_then(|c| c.label(records, Outcome::DeLvTx))
        .unwrap();
    let k = labeling.k;
    let (train, test) = records.split_at(records.len() * 4 / 5);
    let data = TrainingSet::from_records(train, &labeling.class_of, &features, Outcome::DeLvTx, k).unwrap();
    let mvdd = grow_mvdd(&data, &TrainParams { max_depth: Some(6), ..TrainParams::default() }).unwrap();

    // Keep test records the diagram can score so every model sees the same rows.
    let scored: Vec<_> = test.iter().filter_map(|r| mvdd.evaluate(r).ok().map(|e| (r, e))).collect();
    println!("{} of {} test records scored by the diagram\n", scored.len(), test.len());
    let truth: Vec<RiskClass> = scored.iter().map(|(r, _)| labeling.class_of[&r.record_id]).collect();
    let mvdd_classes: Vec<RiskClass> = scored.iter().map(|(_, e)| e.class).collect();
    let mvdd_scores: Vec<Vec<f64>> = scored.iter().map(|(_, e)| e.distribution.clone()).collect();

    let mut reports = vec![("MVDD".to_string(), evaluate_predictions(&truth, &mvdd_classes, Some(&mvdd_scores), k))];
    let mut tests = Vec::new();
    for kind in BaselineKind::ALL {
        let model = BaselineModel::fit(&Hyperparams::defaults(kind), &data, 1).unwrap();
        let predictions: Vec<_> = scored.iter().map(|(r, _)| model.predict(r)).collect();
        let classes: Vec<RiskClass> = predictions.iter().map(|p| p.class).collect();
        let scores: Vec<Vec<f64>> = predictions.into_iter().map(|p| p.scores).collect();
        reports.push((kind.to_string(), evaluate_predictions(&truth, &classes, Some(&scores), k)));
        tests.push((kind, delong_multiclass(&truth, &mvdd_scores, &scores, k).unwrap()));
    }

    let rows: Vec<PerformanceRow> = reports.iter().map(|(label, report)| PerformanceRow { label: label.clone(), report }).collect();
    println!("{}", performance_table(&rows));
    println!("\nDeLong, diagram minus baseline:");
    for (kind, t) in tests {
        println!("  {:<14} ΔAUC {:+.3}  z {:+.2}  p {}", kind.name(), t.delta, t.z, format_p_value(t.p_value));
    }
}
