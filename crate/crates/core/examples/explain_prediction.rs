//! Scores one patient with a small hand-built diagram, then again with
//! pulmonary artery systolic pressure missing and with sex missing.

use std::collections::BTreeMap;

use mvdd_risk::mvdd::{demo_diagram, PhenotypeStyle};

fn main() {
    let model = demo_diagram();
    let patient: BTreeMap<String, f64> =
        [("Sex", 1.0), ("BPSYS", 110.0), ("CPI", 0.7), ("PAS", 80.0), ("PCWP", 30.0)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();

    let full = model.evaluate_values(&patient).unwrap();
    println!("complete record");
    println!("  {}", full.phenotype);
    println!("  {}", full.phenotype.render(PhenotypeStyle::Ascii));

    let mut no_pas = patient.clone();
    no_pas.remove("PAS");
    let e = model.evaluate_values(&no_pas).unwrap();
    println!("\nwithout PAS");
    println!("  {}", e.phenotype);
    for s in &e.phenotype.used_substitution {
        println!("  {} was missing; {} decided the branch", s.missing, s.substitute);
    }

    let mut no_sex = patient;
    no_sex.remove("Sex");
    println!("\nwithout Sex");
    match model.evaluate_values(&no_sex) {
        Ok(e) => println!("  {}", e.phenotype),
        Err(err) => println!("  {err}"),
    }
}
