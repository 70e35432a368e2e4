use std::collections::BTreeMap;

use thiserror::Error;

use super::{Connective, Mvdd, Node, NodeId, Operator, Phenotype, Substitution};
use crate::cohort::PatientRecord;
use crate::RiskClass;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    /// A tested feature and every OR substitute for it are missing.
    #[error("cannot score record: no value for any of {}", features.join(", "))]
    IndeterminatePrediction { features: Vec<String> },
    #[error("value {value} of `{feature}` matches no arm")]
    UnmatchedCategory { feature: String, value: f64 },
    #[error("malformed diagram: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub class: RiskClass,
    pub phenotype: Phenotype,
    /// Per-class scores from the terminal; one-hot when the terminal has none.
    pub distribution: Vec<f64>,
    pub terminal: NodeId,
}

impl Mvdd {
    pub fn evaluate(&self, record: &PatientRecord) -> Result<Evaluation, EvalError> {
        self.evaluate_values(&record.values)
    }

    pub fn evaluate_values(&self, values: &BTreeMap<String, f64>) -> Result<Evaluation, EvalError> {
        self.evaluate_with(|f| values.get(f).copied())
    }

    /// Walks the diagram with `value` as the feature lookup.
    ///
    /// A present feature takes its matching arm. An absent one is replaced by
    /// the first present node along its OR chain. When an AND arm leads to a
    /// node, the phenotype lists every member of the current OR chain with an
    /// AND arm to that node as one OR group.
    pub fn evaluate_with(&self, value: impl Fn(&str) -> Option<f64>) -> Result<Evaluation, EvalError> {
        let mut clauses: Vec<super::Clause> = Vec::new();
        let mut substitutions = Vec::new();
        let mut current = self.root;
        // First skipped node of a substitution; its chain forms the OR group.
        let mut head: Option<NodeId> = None;
        let budget = 2 * self.nodes.len() + 2;
        for _ in 0..budget {
            let node = self.nodes.get(current).ok_or_else(|| EvalError::Malformed(format!("no node {current}")))?;
            let (feature, test, arms) = match node {
                Node::Terminal { class, distribution } => {
                    if let Some(last) = clauses.last_mut() {
                        last.connective = None;
                    }
                    let distribution = if distribution.is_empty() {
                        (0..self.k).map(|i| if i == class.index() { 1.0 } else { 0.0 }).collect()
                    } else {
                        distribution.clone()
                    };
                    return Ok(Evaluation {
                        class: *class,
                        phenotype: Phenotype { clauses, class: *class, used_substitution: substitutions },
                        distribution,
                        terminal: current,
                    });
                }
                Node::Internal { feature, test, arms } => (feature, test, arms),
            };
            let Some(v) = value(feature) else {
                let substitute = self.substitute_for(current, &value)?;
                let mut skipped = current;
                while skipped != substitute {
                    let Node::Internal { feature, test, arms } = &self.nodes[skipped] else { unreachable!() };
                    let or_arm = arms.iter().position(|e| e.operator == Operator::Or).expect("chain nodes have OR arms");
                    substitutions.push(Substitution {
                        missing: feature.clone(),
                        substitute: self.feature_of(substitute).to_string(),
                        assumed: test.clause(feature, or_arm),
                    });
                    skipped = arms[or_arm].target;
                }
                head = Some(current);
                current = substitute;
                continue;
            };
            let arm = test
                .route(v)
                .ok_or_else(|| EvalError::UnmatchedCategory { feature: feature.clone(), value: v })?;
            let edge = arms[arm];
            match edge.operator {
                Operator::Or => {
                    let mut clause = test.clause(feature, arm);
                    clause.connective = Some(Connective::And);
                    clauses.push(clause);
                }
                Operator::And => {
                    let members = self.group_for(head.unwrap_or(current), edge.target, (current, arm));
                    let last = members.len() - 1;
                    for (i, (node, member_arm)) in members.into_iter().enumerate() {
                        let Node::Internal { feature, test, .. } = &self.nodes[node] else { unreachable!() };
                        let mut clause = test.clause(feature, member_arm);
                        clause.connective = Some(if i < last { Connective::Or } else { Connective::And });
                        clauses.push(clause);
                    }
                }
            }
            head = None;
            current = edge.target;
        }
        Err(EvalError::Malformed("evaluation did not reach a terminal".into()))
    }

    fn feature_of(&self, id: NodeId) -> &str {
        match &self.nodes[id] {
            Node::Internal { feature, .. } => feature,
            Node::Terminal { .. } => "",
        }
    }

    /// Nodes of the OR chain starting at `id`, in order.
    pub(crate) fn or_chain(&self, id: NodeId) -> Vec<NodeId> {
        let mut chain = vec![id];
        let mut next = self.nodes[id].or_target();
        while let Some(t) = next {
            if chain.contains(&t) || t >= self.nodes.len() {
                break;
            }
            chain.push(t);
            next = self.nodes[t].or_target();
        }
        chain
    }

    fn substitute_for(&self, start: NodeId, value: &impl Fn(&str) -> Option<f64>) -> Result<NodeId, EvalError> {
        let chain = self.or_chain(start);
        chain
            .iter()
            .copied()
            .find(|&n| matches!(&self.nodes[n], Node::Internal { feature, .. } if value(feature).is_some()))
            .ok_or_else(|| EvalError::IndeterminatePrediction {
                features: chain.iter().map(|&n| self.feature_of(n).to_string()).collect(),
            })
    }

    /// Chain members with an AND arm to `target`, each with its first such arm.
    /// The node that routed the record keeps the arm it took.
    fn group_for(&self, head: NodeId, target: NodeId, taken: (NodeId, usize)) -> Vec<(NodeId, usize)> {
        self.or_chain(head)
            .into_iter()
            .filter_map(|n| match &self.nodes[n] {
                _ if n == taken.0 => Some(taken),
                Node::Internal { arms, .. } => arms
                    .iter()
                    .position(|e| e.operator == Operator::And && e.target == target)
                    .map(|arm| (n, arm)),
                Node::Terminal { .. } => None,
            })
            .collect()
    }
}
