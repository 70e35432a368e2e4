//! Feature-set manifests.
//!
//! A manifest is a TOML document naming every feature of a set together with its
//! kind, unit and admissible values. Two manifests ship with the crate.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CohortError;

const INVASIVE_HEMODYNAMICS: &str = include_str!("../../manifests/invasive-hemodynamics.toml");
const ALL_FEATURES: &str = include_str!("../../manifests/all-features.toml");

/// Names of the built-in feature sets.
pub const BUILTIN_FEATURE_SETS: [&str; 2] = ["invasive-hemodynamics", "all-features"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Continuous,
    Categorical,
}

/// One admissible code of a categorical feature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub code: i64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: FeatureKind,
    #[serde(default)]
    pub unit: String,
    /// Inclusive `[min, max]`; continuous features only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valid_range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub categories: Vec<Category>,
}

impl FeatureSpec {
    pub fn continuous(name: &str, unit: &str, min: f64, max: f64) -> Self {
        FeatureSpec {
            name: name.to_string(),
            kind: FeatureKind::Continuous,
            unit: unit.to_string(),
            valid_range: Some([min, max]),
            categories: Vec::new(),
        }
    }

    pub fn categorical(name: &str, categories: &[(i64, &str)]) -> Self {
        FeatureSpec {
            name: name.to_string(),
            kind: FeatureKind::Categorical,
            unit: String::new(),
            valid_range: None,
            categories: categories
                .iter()
                .map(|&(code, label)| Category { code, label: label.to_string() })
                .collect(),
        }
    }

    pub fn is_categorical(&self) -> bool {
        self.kind == FeatureKind::Categorical
    }

    fn check(&self) -> Result<(), String> {
        match self.kind {
            FeatureKind::Continuous => {
                if !self.categories.is_empty() {
                    return Err("continuous feature declares categories".into());
                }
                if let Some([lo, hi]) = self.valid_range {
                    if !(lo < hi) {
                        return Err(format!("valid range [{lo}, {hi}] is empty"));
                    }
                }
            }
            FeatureKind::Categorical => {
                if self.categories.len() < 2 {
                    return Err("categorical feature needs at least two categories".into());
                }
                if self.valid_range.is_some() {
                    return Err("categorical feature declares a valid range".into());
                }
                let mut codes = HashSet::new();
                for c in &self.categories {
                    if !codes.insert(c.code) {
                        return Err(format!("category code {} repeated", c.code));
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether `value` is admissible: inside the valid range, or a declared code.
    pub fn admits(&self, value: f64) -> bool {
        match self.kind {
            FeatureKind::Continuous => match self.valid_range {
                Some([lo, hi]) => value >= lo && value <= hi,
                None => value.is_finite(),
            },
            FeatureKind::Categorical => self.code_for_value(value).is_some(),
        }
    }

    fn code_for_value(&self, value: f64) -> Option<&Category> {
        if value.fract() != 0.0 {
            return None;
        }
        self.categories.iter().find(|c| c.code as f64 == value)
    }

    pub fn category_label(&self, code: i64) -> Option<&str> {
        self.categories.iter().find(|c| c.code == code).map(|c| c.label.as_str())
    }

    /// Parses a cell or request value: a number, or a category label for
    /// categorical features (case-insensitive).
    pub fn parse_value(&self, text: &str) -> Option<f64> {
        let text = text.trim();
        if let Ok(v) = text.parse::<f64>() {
            return v.is_finite().then_some(v);
        }
        if self.is_categorical() {
            return self
                .categories
                .iter()
                .find(|c| c.label.eq_ignore_ascii_case(text))
                .map(|c| c.code as f64);
        }
        None
    }
}

/// Named, ordered list of features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSet {
    pub name: String,
    pub features: Vec<FeatureSpec>,
}

impl FeatureSet {
    /// Builds a set, checking every spec and the uniqueness of names.
    pub fn new(name: impl Into<String>, features: Vec<FeatureSpec>) -> Result<Self, CohortError> {
        let set = FeatureSet { name: name.into(), features };
        set.check()?;
        Ok(set)
    }

    fn check(&self) -> Result<(), CohortError> {
        let mut seen = HashSet::new();
        for spec in &self.features {
            if !seen.insert(spec.name.to_ascii_lowercase()) {
                return Err(CohortError::Manifest(format!("duplicate feature `{}`", spec.name)));
            }
            spec.check()
                .map_err(|e| CohortError::Manifest(format!("feature `{}`: {e}", spec.name)))?;
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self, CohortError> {
        let set: FeatureSet =
            toml::from_str(text).map_err(|e| CohortError::Manifest(e.to_string()))?;
        set.check()?;
        Ok(set)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("feature sets always serialize")
    }

    pub fn load(path: &Path) -> Result<Self, CohortError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CohortError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_toml_str(&text)
    }

    /// Looks up a built-in manifest by name.
    pub fn builtin(name: &str) -> Option<Self> {
        let text = match name {
            "invasive-hemodynamics" => INVASIVE_HEMODYNAMICS,
            "all-features" => ALL_FEATURES,
            _ => return None,
        };
        Some(Self::from_toml_str(text).expect("built-in manifests are valid"))
    }

    pub fn invasive_hemodynamics() -> Self {
        Self::builtin("invasive-hemodynamics").unwrap()
    }

    pub fn all_features() -> Self {
        Self::builtin("all-features").unwrap()
    }

    /// Resolves a built-in name or a path to a manifest file.
    pub fn resolve(name_or_path: &str) -> Result<Self, CohortError> {
        match Self::builtin(name_or_path) {
            Some(set) => Ok(set),
            None => Self::load(Path::new(name_or_path)),
        }
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|f| f.name.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&FeatureSpec> {
        self.features.iter().find(|f| f.name == name)
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    /// Case-insensitive lookup, used for file headers and request keys.
    pub fn find_ignore_case(&self, name: &str) -> Option<&FeatureSpec> {
        let name = name.trim();
        self.features.iter().find(|f| f.name.eq_ignore_ascii_case(name))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.get(name).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_sizes() {
        assert_eq!(FeatureSet::invasive_hemodynamics().len(), 28);
        assert_eq!(FeatureSet::all_features().len(), 66);
    }

    #[test]
    fn all_features_covers_hemodynamics() {
        let all = FeatureSet::all_features();
        for name in FeatureSet::invasive_hemodynamics().names() {
            assert!(all.contains(name), "{name}");
        }
        for name in ["BPSYS", "CPI", "PAS", "PCWP", "Sex"] {
            assert!(all.contains(name));
        }
    }

    #[test]
    fn sex_coding() {
        let set = FeatureSet::invasive_hemodynamics();
        let sex = set.get("Sex").unwrap();
        assert_eq!(sex.parse_value("male"), Some(1.0));
        assert_eq!(sex.parse_value("Female"), Some(0.0));
        assert_eq!(sex.category_label(1), Some("Male"));
        assert!(sex.admits(1.0));
        assert!(!sex.admits(2.0));
        assert!(!sex.admits(0.5));
    }

    #[test]
    fn rejects_bad_specs() {
        let bad_range = FeatureSpec::continuous("X", "", 5.0, 5.0);
        assert!(FeatureSet::new("s", vec![bad_range]).is_err());
        let one_cat = FeatureSpec::categorical("C", &[(0, "a")]);
        assert!(FeatureSet::new("s", vec![one_cat]).is_err());
        let dup = vec![
            FeatureSpec::continuous("X", "", 0.0, 1.0),
            FeatureSpec::continuous("x", "", 0.0, 1.0),
        ];
        assert!(FeatureSet::new("s", dup).is_err());
    }

    #[test]
    fn toml_round_trip() {
        let set = FeatureSet::all_features();
        let back = FeatureSet::from_toml_str(&set.to_toml_string()).unwrap();
        assert_eq!(set, back);
    }
}
