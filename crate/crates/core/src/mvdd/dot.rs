use std::fmt::Write;

use super::{Mvdd, Node, Operator, PhenotypeStyle};

fn escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering. Internal nodes are ellipses, terminals filled boxes;
/// OR edges are dashed, AND edges solid.
pub fn export_dot(mvdd: &Mvdd) -> String {
    let mut out = String::new();
    out.push_str("digraph mvdd {\n  rankdir=TB;\n");
    for (id, node) in mvdd.nodes.iter().enumerate() {
        let _ = match node {
            Node::Internal { feature, .. } => {
                writeln!(out, "  n{id} [label=\"{}\", shape=ellipse];", escape(feature))
            }
            Node::Terminal { class, .. } => {
                writeln!(out, "  n{id} [label=\"Score {class}\", shape=box, style=\"filled,bold\"];")
            }
        };
    }
    for (id, node) in mvdd.nodes.iter().enumerate() {
        if let Node::Internal { feature, test, arms } = node {
            for (arm, edge) in arms.iter().enumerate() {
                let clause = test.clause(feature, arm).text(PhenotypeStyle::Unicode);
                let condition = clause.strip_prefix(feature.as_str()).unwrap_or(&clause).trim();
                let style = match edge.operator {
                    Operator::And => "solid",
                    Operator::Or => "dashed",
                };
                let _ = writeln!(
                    out,
                    "  n{id} -> n{} [label=\"{}\", style={style}];",
                    edge.target,
                    escape(condition)
                );
            }
        }
    }
    out.push_str("}\n");
    out
}
