use std::fmt;

use serde::{Deserialize, Serialize};

use crate::RiskClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Connective {
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "in")]
    In,
}

impl Comparator {
    pub fn symbol(self, style: PhenotypeStyle) -> &'static str {
        match (self, style) {
            (Comparator::Le, PhenotypeStyle::Unicode) => "≤",
            (Comparator::Le, PhenotypeStyle::Ascii) => "<=",
            (Comparator::Gt, _) => ">",
            (Comparator::Eq, _) => "=",
            (Comparator::In, PhenotypeStyle::Unicode) => "∈",
            (Comparator::In, PhenotypeStyle::Ascii) => "in",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClauseValue {
    Number(f64),
    Labels(Vec<String>),
}

/// One condition of a phenotype. `connective` joins it to the next clause and
/// is `None` on the last one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub feature: String,
    pub comparator: Comparator,
    pub value: ClauseValue,
    pub connective: Option<Connective>,
}

impl Clause {
    pub fn text(&self, style: PhenotypeStyle) -> String {
        let value = match &self.value {
            ClauseValue::Number(v) => readable(*v),
            ClauseValue::Labels(labels) if self.comparator == Comparator::In => format!("{{{}}}", labels.join(", ")),
            ClauseValue::Labels(labels) => labels.join(", "),
        };
        format!("{} {} {}", self.feature, self.comparator.symbol(style), value)
    }

    /// Checks the clause against a numeric value; category clauses need the
    /// label of the value's code.
    pub fn holds(&self, value: f64, label: Option<&str>) -> bool {
        match (&self.value, self.comparator) {
            (ClauseValue::Number(t), Comparator::Le) => value <= *t,
            (ClauseValue::Number(t), Comparator::Gt) => value > *t,
            (ClauseValue::Labels(labels), _) => label.is_some_and(|l| labels.iter().any(|x| x == l)),
            _ => false,
        }
    }
}

/// Shortest text for `v` at ten significant digits, so midpoints such as
/// `21.212000000000003` read `21.212`.
fn readable(v: f64) -> String {
    let rounded: f64 = format!("{v:.9e}").parse().unwrap_or(v);
    format!("{rounded}")
}

/// A missing feature and the test evaluated in its place. `assumed` is the
/// skipped node's OR-arm condition: any value satisfying it reproduces the
/// substituted path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Substitution {
    pub missing: String,
    pub substitute: String,
    pub assumed: Clause,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhenotypeStyle {
    /// `∧`, `∨`, `≤`
    #[default]
    Unicode,
    /// `AND`, `OR`, `<=`
    Ascii,
}

/// The conditions on the path that produced a prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phenotype {
    pub clauses: Vec<Clause>,
    pub class: RiskClass,
    pub used_substitution: Vec<Substitution>,
}

impl Phenotype {
    /// Clause text alone, e.g. `PCWP ≤ 33 ∧ (PAS > 74.5 ∨ CO ≤ 4)`.
    pub fn expression(&self, style: PhenotypeStyle) -> String {
        let (and, or) = match style {
            PhenotypeStyle::Unicode => (" ∧ ", " ∨ "),
            PhenotypeStyle::Ascii => (" AND ", " OR "),
        };
        let mut groups: Vec<Vec<String>> = Vec::new();
        let mut open = false;
        for clause in &self.clauses {
            if !open {
                groups.push(Vec::new());
            }
            groups.last_mut().unwrap().push(clause.text(style));
            open = clause.connective == Some(Connective::Or);
        }
        groups
            .into_iter()
            .map(|g| if g.len() > 1 { format!("({})", g.join(or)) } else { g.concat() })
            .collect::<Vec<_>>()
            .join(and)
    }

    /// `"<expression> = Score c"`, or `"Score c"` for an empty path.
    pub fn render(&self, style: PhenotypeStyle) -> String {
        if self.clauses.is_empty() {
            format!("Score {}", self.class)
        } else {
            format!("{} = Score {}", self.expression(style), self.class)
        }
    }
}

impl fmt::Display for Phenotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(PhenotypeStyle::Unicode))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clause(feature: &str, comparator: Comparator, v: f64, connective: Option<Connective>) -> Clause {
        Clause { feature: feature.into(), comparator, value: ClauseValue::Number(v), connective }
    }

    #[test]
    fn thresholds_drop_float_noise() {
        let text = |v: f64| clause("PAPI", Comparator::Le, v, None).text(PhenotypeStyle::Unicode);
        assert_eq!(text(21.212000000000003), "PAPI ≤ 21.212");
        assert_eq!(text(3.9720000000000004), "PAPI ≤ 3.972");
        assert_eq!(text(0.621), "PAPI ≤ 0.621");
        assert_eq!(text(33.0), "PAPI ≤ 33");
        assert_eq!(text(1.0 / 3.0), "PAPI ≤ 0.3333333333");
        assert_eq!(text(-1e-12), "PAPI ≤ -0.000000000001");
    }

    #[test]
    fn empty_path() {
        let p = Phenotype { clauses: vec![], class: RiskClass(2), used_substitution: vec![] };
        assert_eq!(p.render(PhenotypeStyle::Unicode), "Score 2");
    }

    #[test]
    fn single_clause() {
        let p = Phenotype {
            clauses: vec![clause("PCWP", Comparator::Le, 33.0, None)],
            class: RiskClass(4),
            used_substitution: vec![],
        };
        assert_eq!(p.to_string(), "PCWP ≤ 33 = Score 4");
        assert_eq!(p.render(PhenotypeStyle::Ascii), "PCWP <= 33 = Score 4");
    }

    #[test]
    fn groups_are_parenthesized() {
        let p = Phenotype {
            clauses: vec![
                Clause {
                    feature: "Sex".into(),
                    comparator: Comparator::Eq,
                    value: ClauseValue::Labels(vec!["Male".into()]),
                    connective: Some(Connective::And),
                },
                clause("BPSYS", Comparator::Gt, 103.5, Some(Connective::And)),
                clause("PAS", Comparator::Gt, 74.5, Some(Connective::Or)),
                clause("PCWP", Comparator::Le, 33.0, None),
            ],
            class: RiskClass(5),
            used_substitution: vec![],
        };
        assert_eq!(p.expression(PhenotypeStyle::Unicode), "Sex = Male ∧ BPSYS > 103.5 ∧ (PAS > 74.5 ∨ PCWP ≤ 33)");
        assert_eq!(
            p.render(PhenotypeStyle::Ascii),
            "Sex = Male AND BPSYS > 103.5 AND (PAS > 74.5 OR PCWP <= 33) = Score 5"
        );
    }

    #[test]
    fn set_membership() {
        let c = Clause {
            feature: "Race".into(),
            comparator: Comparator::In,
            value: ClauseValue::Labels(vec!["Black".into(), "Other".into()]),
            connective: None,
        };
        assert_eq!(c.text(PhenotypeStyle::Unicode), "Race ∈ {Black, Other}");
        assert!(c.holds(2.0, Some("Other")));
        assert!(!c.holds(0.0, Some("White")));
    }
}
