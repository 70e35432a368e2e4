use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Mvdd, Node, NodeId, Operator, Test};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "violation")]
pub enum Violation {
    NoClasses,
    RootOutOfRange { root: NodeId },
    DanglingEdge { node: NodeId, target: NodeId },
    CycleDetected { nodes: Vec<NodeId> },
    Unreachable { node: NodeId },
    ClassOutOfRange { node: NodeId, class: u8 },
    DistributionLength { node: NodeId, found: usize },
    ArmCount { node: NodeId, expected: usize, found: usize },
    BadThreshold { node: NodeId },
    BadCategoryGroup { node: NodeId },
    ConflictingOrTargets { node: NodeId },
    OrTargetNotInternal { node: NodeId, target: NodeId },
    SubstituteArity { node: NodeId, target: NodeId },
}

/// Every structural problem found in a diagram.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(|v| format!("{v:?}")).collect();
        f.write_str(&parts.join("; "))
    }
}

pub(super) fn validate(m: &Mvdd) -> ValidationReport {
    let mut out = Vec::new();
    let n = m.nodes.len();
    if m.k == 0 {
        out.push(Violation::NoClasses);
    }
    for (id, node) in m.nodes.iter().enumerate() {
        match node {
            Node::Terminal { class, distribution } => {
                if class.0 == 0 || usize::from(class.0) > m.k {
                    out.push(Violation::ClassOutOfRange { node: id, class: class.0 });
                }
                if !distribution.is_empty() && distribution.len() != m.k {
                    out.push(Violation::DistributionLength { node: id, found: distribution.len() });
                }
            }
            Node::Internal { test, arms, .. } => {
                match test {
                    Test::Threshold { threshold } if !threshold.is_finite() => {
                        out.push(Violation::BadThreshold { node: id });
                    }
                    Test::Categories { groups } => {
                        let mut codes: Vec<i64> = groups.iter().flat_map(|g| g.codes.iter().copied()).collect();
                        let total = codes.len();
                        codes.sort();
                        codes.dedup();
                        let malformed = groups.len() < 2
                            || codes.len() != total
                            || groups.iter().any(|g| g.codes.is_empty() || g.codes.len() != g.labels.len());
                        if malformed {
                            out.push(Violation::BadCategoryGroup { node: id });
                        }
                    }
                    Test::Threshold { .. } => {}
                }
                if arms.len() != test.arity() {
                    out.push(Violation::ArmCount { node: id, expected: test.arity(), found: arms.len() });
                }
                for e in arms {
                    if e.target >= n {
                        out.push(Violation::DanglingEdge { node: id, target: e.target });
                    }
                }
                let or_targets: Vec<NodeId> =
                    arms.iter().filter(|e| e.operator == Operator::Or).map(|e| e.target).collect();
                if or_targets.windows(2).any(|w| w[0] != w[1]) {
                    out.push(Violation::ConflictingOrTargets { node: id });
                }
                if let Some(&t) = or_targets.first() {
                    match m.nodes.get(t) {
                        Some(Node::Internal { test: sub, .. }) => {
                            if sub.arity() != test.arity() {
                                out.push(Violation::SubstituteArity { node: id, target: t });
                            }
                        }
                        Some(Node::Terminal { .. }) => out.push(Violation::OrTargetNotInternal { node: id, target: t }),
                        None => {}
                    }
                }
            }
        }
    }
    if m.root >= n {
        out.push(Violation::RootOutOfRange { root: m.root });
        return ValidationReport { violations: out };
    }

    // Iterative DFS with colors; a back edge reports the cycle's nodes.
    let mut color = vec![0u8; n];
    let mut stack: Vec<(NodeId, usize)> = vec![(m.root, 0)];
    color[m.root] = 1;
    while let Some(&mut (id, ref mut next)) = stack.last_mut() {
        let targets: Vec<NodeId> = match &m.nodes[id] {
            Node::Internal { arms, .. } => arms.iter().map(|e| e.target).filter(|&t| t < n).collect(),
            Node::Terminal { .. } => Vec::new(),
        };
        if *next < targets.len() {
            let t = targets[*next];
            *next += 1;
            match color[t] {
                0 => {
                    color[t] = 1;
                    stack.push((t, 0));
                }
                1 => {
                    let start = stack.iter().position(|(s, _)| *s == t).unwrap();
                    let nodes = stack[start..].iter().map(|(s, _)| *s).collect();
                    out.push(Violation::CycleDetected { nodes });
                }
                _ => {}
            }
        } else {
            color[id] = 2;
            stack.pop();
        }
    }
    for (id, c) in color.iter().enumerate() {
        if *c == 0 {
            out.push(Violation::Unreachable { node: id });
        }
    }
    ValidationReport { violations: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mvdd::{demo_diagram, CategoryGroup, Edge};
    use crate::Outcome;

    fn raw(nodes: Vec<Node>, k: usize) -> Mvdd {
        Mvdd { nodes, root: 0, k, feature_set: "s".into(), outcome: Outcome::DeLvTx, metadata: Default::default() }
    }

    #[test]
    fn smallest_diagram_is_valid() {
        assert!(raw(vec![Node::terminal(3)], 5).validate().is_valid());
        assert!(demo_diagram().validate().is_valid());
    }

    #[test]
    fn cycle() {
        let m = raw(
            vec![
                Node::threshold("A", 1.0, Edge::and(1), Edge::and(2)),
                Node::threshold("B", 1.0, Edge::and(0), Edge::and(2)),
                Node::terminal(1),
            ],
            2,
        );
        assert_eq!(m.validate().violations, [Violation::CycleDetected { nodes: vec![0, 1] }]);
    }

    #[test]
    fn class_out_of_range() {
        let m = raw(vec![Node::terminal(7)], 5);
        assert_eq!(m.validate().violations, [Violation::ClassOutOfRange { node: 0, class: 7 }]);
    }

    #[test]
    fn structural_violations() {
        let m = raw(
            vec![
                Node::threshold("A", f64::NAN, Edge::or(2), Edge::and(9)),
                Node::terminal(1),
                Node::categories("S", vec![CategoryGroup::new(&[(0, "a")])], vec![Edge::and(1)]),
                Node::terminal(1),
            ],
            1,
        );
        let v = m.validate().violations;
        assert!(v.contains(&Violation::BadThreshold { node: 0 }));
        assert!(v.contains(&Violation::DanglingEdge { node: 0, target: 9 }));
        assert!(v.contains(&Violation::SubstituteArity { node: 0, target: 2 }));
        assert!(v.contains(&Violation::BadCategoryGroup { node: 2 }));
        assert!(v.contains(&Violation::Unreachable { node: 3 }));
    }

    #[test]
    fn or_edges_must_name_an_internal_node() {
        let m = raw(vec![Node::threshold("A", 1.0, Edge::or(1), Edge::and(1)), Node::terminal(1)], 1);
        assert_eq!(m.validate().violations, [Violation::OrTargetNotInternal { node: 0, target: 1 }]);
    }
}
