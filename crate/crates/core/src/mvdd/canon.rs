use std::collections::HashMap;

use super::{Edge, Mvdd, Node, NodeId, Test};

#[derive(PartialEq, Eq, Hash)]
enum Key {
    Terminal(u8, Vec<u64>),
    Internal(String, Vec<u64>, Vec<(i64, String)>, Vec<Edge>),
}

fn key(node: &Node) -> Key {
    match node {
        Node::Terminal { class, distribution } => {
            Key::Terminal(class.0, distribution.iter().map(|p| p.to_bits()).collect())
        }
        Node::Internal { feature, test, arms } => {
            let (thresholds, groups) = match test {
                Test::Threshold { threshold } => (vec![threshold.to_bits()], Vec::new()),
                Test::Categories { groups } => (
                    Vec::new(),
                    groups
                        .iter()
                        .flat_map(|g| g.codes.iter().zip(&g.labels).map(|(c, l)| (*c, l.clone())).chain([(i64::MIN, String::new())]))
                        .collect(),
                ),
            };
            Key::Internal(feature.clone(), thresholds, groups, arms.clone())
        }
    }
}

/// Merges structurally identical subgraphs and drops unreachable nodes. Node
/// ids are reassigned in post-order, so the root comes last. Predictions and
/// phenotypes are unchanged.
pub fn canonicalize(mvdd: &Mvdd) -> Mvdd {
    let mut nodes: Vec<Node> = Vec::new();
    let mut seen: HashMap<Key, NodeId> = HashMap::new();
    let mut remap: HashMap<NodeId, NodeId> = HashMap::new();

    // Post-order without recursion: (node, children pushed yet).
    let mut stack = vec![(mvdd.root, false)];
    while let Some((id, expanded)) = stack.pop() {
        if remap.contains_key(&id) {
            continue;
        }
        let node = &mvdd.nodes[id];
        if !expanded {
            stack.push((id, true));
            if let Node::Internal { arms, .. } = node {
                for e in arms.iter().rev() {
                    if !remap.contains_key(&e.target) {
                        stack.push((e.target, false));
                    }
                }
            }
            continue;
        }
        let rewritten = match node {
            Node::Terminal { .. } => node.clone(),
            Node::Internal { feature, test, arms } => Node::Internal {
                feature: feature.clone(),
                test: test.clone(),
                arms: arms.iter().map(|e| Edge { operator: e.operator, target: remap[&e.target] }).collect(),
            },
        };
        let new_id = *seen.entry(key(&rewritten)).or_insert_with(|| {
            nodes.push(rewritten);
            nodes.len() - 1
        });
        remap.insert(id, new_id);
    }
    Mvdd {
        nodes,
        root: remap[&mvdd.root],
        k: mvdd.k,
        feature_set: mvdd.feature_set.clone(),
        outcome: mvdd.outcome,
        metadata: mvdd.metadata.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mvdd::demo_diagram;
    use crate::Outcome;

    #[test]
    fn merges_duplicate_subtrees() {
        let m = Mvdd::new(
            vec![
                Node::threshold("A", 1.0, Edge::and(1), Edge::and(2)),
                Node::threshold("B", 2.0, Edge::and(3), Edge::and(4)),
                Node::threshold("B", 2.0, Edge::and(5), Edge::and(6)),
                Node::terminal(1),
                Node::terminal(2),
                Node::terminal(1),
                Node::terminal(2),
            ],
            0,
            2,
            "s",
            Outcome::DeLvTx,
        )
        .unwrap();
        let c = canonicalize(&m);
        assert_eq!(c.nodes.len(), 4);
        assert!(c.validate().is_valid());
        assert_eq!(canonicalize(&c), c);
    }

    #[test]
    fn demo_is_already_minimal() {
        let m = demo_diagram();
        assert_eq!(canonicalize(&m).nodes.len(), m.nodes.len());
    }
}
