//! Multi-valued decision diagrams.
//!
//! A diagram is a DAG of feature tests. Each arm of a test carries an operator:
//! an AND edge leads on to the next test (or a terminal), an OR edge names a
//! substitute test that can stand in when the feature is missing. Evaluation
//! returns the terminal's risk class together with the readable phenotype of
//! the path that produced it.

mod canon;
mod dot;
mod eval;
mod phenotype;
mod validate;

use serde::{Deserialize, Serialize};

use crate::{Outcome, RiskClass};

pub use canon::canonicalize;
pub use dot::export_dot;
pub use eval::{EvalError, Evaluation};
pub use phenotype::{Clause, ClauseValue, Comparator, Connective, Phenotype, PhenotypeStyle, Substitution};
pub use validate::{ValidationReport, Violation};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Operator {
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub operator: Operator,
    pub target: NodeId,
}

impl Edge {
    pub fn and(target: NodeId) -> Self {
        Edge { operator: Operator::And, target }
    }

    pub fn or(target: NodeId) -> Self {
        Edge { operator: Operator::Or, target }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryGroup {
    pub codes: Vec<i64>,
    /// Display label per code.
    pub labels: Vec<String>,
}

impl CategoryGroup {
    pub fn new(members: &[(i64, &str)]) -> Self {
        CategoryGroup {
            codes: members.iter().map(|m| m.0).collect(),
            labels: members.iter().map(|m| m.1.to_string()).collect(),
        }
    }
}

/// How an internal node routes a value onto its arms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Test {
    /// Arm 0 takes `value <= threshold`, arm 1 takes `value > threshold`.
    Threshold { threshold: f64 },
    /// One arm per group of codes.
    Categories { groups: Vec<CategoryGroup> },
}

impl Test {
    pub fn arity(&self) -> usize {
        match self {
            Test::Threshold { .. } => 2,
            Test::Categories { groups } => groups.len(),
        }
    }

    /// Arm index taken by `value`, or `None` for an unlisted category.
    pub fn route(&self, value: f64) -> Option<usize> {
        match self {
            Test::Threshold { threshold } => Some(if value <= *threshold { 0 } else { 1 }),
            Test::Categories { groups } => {
                groups.iter().position(|g| g.codes.iter().any(|&c| c as f64 == value))
            }
        }
    }

    pub fn clause(&self, feature: &str, arm: usize) -> Clause {
        let (comparator, value) = match self {
            Test::Threshold { threshold } => {
                (if arm == 0 { Comparator::Le } else { Comparator::Gt }, ClauseValue::Number(*threshold))
            }
            Test::Categories { groups } => {
                let labels = groups[arm].labels.clone();
                let comparator = if labels.len() == 1 { Comparator::Eq } else { Comparator::In };
                (comparator, ClauseValue::Labels(labels))
            }
        };
        Clause { feature: feature.to_string(), comparator, value, connective: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Node {
    Internal { feature: String, test: Test, arms: Vec<Edge> },
    Terminal {
        class: RiskClass,
        /// Class frequencies of the training records that reached this leaf.
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        distribution: Vec<f64>,
    },
}

impl Node {
    pub fn terminal(class: u8) -> Self {
        Node::Terminal { class: RiskClass(class), distribution: Vec::new() }
    }

    pub fn threshold(feature: &str, threshold: f64, le: Edge, gt: Edge) -> Self {
        Node::Internal { feature: feature.to_string(), test: Test::Threshold { threshold }, arms: vec![le, gt] }
    }

    pub fn categories(feature: &str, groups: Vec<CategoryGroup>, arms: Vec<Edge>) -> Self {
        Node::Internal { feature: feature.to_string(), test: Test::Categories { groups }, arms }
    }

    /// Target of this node's OR edges, if any.
    pub fn or_target(&self) -> Option<NodeId> {
        match self {
            Node::Internal { arms, .. } => arms.iter().find(|e| e.operator == Operator::Or).map(|e| e.target),
            Node::Terminal { .. } => None,
        }
    }
}

/// Where a trained diagram came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Metadata {
    pub seed: Option<u64>,
    pub fold: Option<usize>,
    pub criterion: Option<String>,
    pub or_gain_threshold: Option<f64>,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mvdd {
    pub nodes: Vec<Node>,
    pub root: NodeId,
    /// Number of risk classes.
    pub k: usize,
    pub feature_set: String,
    pub outcome: Outcome,
    #[serde(default)]
    pub metadata: Metadata,
}

#[derive(Debug, thiserror::Error)]
#[error("invalid diagram: {0}")]
pub struct InvalidMvdd(pub ValidationReport);

impl Mvdd {
    /// Builds and validates a diagram.
    pub fn new(
        nodes: Vec<Node>,
        root: NodeId,
        k: usize,
        feature_set: impl Into<String>,
        outcome: Outcome,
    ) -> Result<Self, InvalidMvdd> {
        let mvdd = Mvdd { nodes, root, k, feature_set: feature_set.into(), outcome, metadata: Metadata::default() };
        let report = mvdd.validate();
        if report.is_valid() { Ok(mvdd) } else { Err(InvalidMvdd(report)) }
    }

    pub fn with_metadata(mut self, metadata: Metadata) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn validate(&self) -> ValidationReport {
        validate::validate(self)
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    /// Features tested anywhere in the diagram, sorted.
    pub fn features(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .nodes
            .iter()
            .filter_map(|n| match n {
                Node::Internal { feature, .. } => Some(feature.clone()),
                Node::Terminal { .. } => None,
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Whether any arm carries an OR edge.
    pub fn has_or_edges(&self) -> bool {
        self.nodes.iter().any(|n| n.or_target().is_some())
    }

    pub fn depth(&self) -> usize {
        fn go(m: &Mvdd, id: NodeId) -> usize {
            match &m.nodes[id] {
                Node::Terminal { .. } => 0,
                Node::Internal { arms, .. } => 1 + arms.iter().map(|e| go(m, e.target)).max().unwrap_or(0),
            }
        }
        go(self, self.root)
    }
}

/// Small hand-built diagram over the hemodynamic features. A male patient with
/// systolic pressure above 103.5 and cardiac power index above 0.621 scores 5
/// when either PAS exceeds 74.5 or, with PAS low or missing, PCWP is at most 33.
pub fn demo_diagram() -> Mvdd {
    let nodes = vec![
        Node::categories(
            "Sex",
            vec![CategoryGroup::new(&[(0, "Female")]), CategoryGroup::new(&[(1, "Male")])],
            vec![Edge::and(6), Edge::and(1)],
        ),
        Node::threshold("BPSYS", 103.5, Edge::and(7), Edge::and(2)),
        Node::threshold("CPI", 0.621, Edge::and(8), Edge::and(3)),
        Node::threshold("PAS", 74.5, Edge::or(4), Edge::and(5)),
        Node::threshold("PCWP", 33.0, Edge::and(5), Edge::and(9)),
        Node::terminal(5),
        Node::terminal(2),
        Node::terminal(3),
        Node::terminal(1),
        Node::terminal(4),
    ];
    Mvdd::new(nodes, 0, 5, "invasive-hemodynamics", Outcome::DeLvTx).expect("demo diagram is valid")
}
