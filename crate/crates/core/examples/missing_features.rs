//! Two correlated features carry the same signal. Masking one of them in
//! every test record leaves the diagram untouched, since its OR edge falls
//! back to the other, while a plain decision tree with median imputation
//! loses accuracy.

use mvdd_risk::baselines::{BaselineKind, BaselineModel, Hyperparams};
use mvdd_risk::synth::substitution_fixture;
use mvdd_risk::train::{grow_mvdd, TrainParams, TrainingSet};
use mvdd_risk::{FeatureSet, Outcome, PatientRecord};

fn main() {
    let fixture = substitution_fixture(1000, 500, 42);
    let features = FeatureSet::invasive_hemodynamics();
    let data =
        TrainingSet::from_records(&fixture.train.cohort.records, &fixture.train.strata, &features, Outcome::DeLvTx, 2)
            .unwrap();

    let mvdd = grow_mvdd(&data, &TrainParams::default()).unwrap();
    let tree = BaselineModel::fit(&Hyperparams::defaults(BaselineKind::DecisionTree), &data, 42).unwrap();

    let test = &fixture.test.cohort.records;
    let masked: Vec<PatientRecord> = test
        .iter()
        .cloned()
        .map(|mut r| {
            r.values.remove(&fixture.masked);
            r
        })
        .collect();
    let truth = |r: &PatientRecord| fixture.test.strata[&r.record_id];
    let accuracy = |hits: usize| hits as f64 / test.len() as f64;
    let mvdd_hits = |set: &[PatientRecord]| set.iter().filter(|r| mvdd.evaluate(r).is_ok_and(|e| e.class == truth(r))).count();
    let tree_hits = |set: &[PatientRecord]| set.iter().filter(|r| tree.predict(r).class == truth(r)).count();

    println!("{} removed from all {} test records\n", fixture.masked, test.len());
    println!("model           complete   masked");
    println!("diagram         {:>8.3} {:>8.3}", accuracy(mvdd_hits(test)), accuracy(mvdd_hits(&masked)));
    println!("decision tree   {:>8.3} {:>8.3}", accuracy(tree_hits(test)), accuracy(tree_hits(&masked)));

    let e = mvdd.evaluate(&masked[0]).unwrap();
    println!("\nfirst masked record: {}", e.phenotype);
}
