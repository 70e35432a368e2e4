use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Ordinal risk class, numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RiskClass(pub u8);

impl RiskClass {
    /// Builds a class from a zero-based index.
    pub fn from_index(index: usize) -> Self {
        RiskClass(u8::try_from(index + 1).expect("risk class index out of range"))
    }

    /// Zero-based position of this class in per-class vectors.
    pub fn index(self) -> usize {
        usize::from(self.0).saturating_sub(1)
    }
}

impl fmt::Display for RiskClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Binary adverse outcomes tracked per record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Outcome {
    /// Death, LVAD implantation or heart transplantation.
    DeLvTx,
    /// Rehospitalization within six months.
    Rehospitalization,
}

impl Outcome {
    pub const ALL: [Outcome; 2] = [Outcome::DeLvTx, Outcome::Rehospitalization];

    pub fn name(self) -> &'static str {
        match self {
            Outcome::DeLvTx => "DeLvTx",
            Outcome::Rehospitalization => "Rehospitalization",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Outcome {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Outcome::ALL
            .into_iter()
            .find(|o| o.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown outcome `{s}`"))
    }
}
