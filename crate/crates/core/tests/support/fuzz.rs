//! Random valid diagrams and sparse records over the hemodynamic features.

use std::collections::BTreeMap;

use mvdd_risk::mvdd::{CategoryGroup, Edge, Node};
use mvdd_risk::{Mvdd, Outcome};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CONTINUOUS: [(&str, f64, f64); 6] = [
    ("BPSYS", 60.0, 200.0),
    ("CPI", 0.1, 1.5),
    ("PAS", 15.0, 100.0),
    ("PCWP", 2.0, 50.0),
    ("RAP", 0.0, 30.0),
    ("HR", 40.0, 160.0),
];

fn terminal(rng: &mut ChaCha8Rng, k: usize) -> Node {
    let class = rng.random_range(1..=k as u8);
    if rng.random_bool(0.6) {
        let mut d: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
        d[usize::from(class) - 1] += k as f64;
        let total: f64 = d.iter().sum();
        Node::Terminal { class: mvdd_risk::RiskClass(class), distribution: d.iter().map(|v| v / total).collect() }
    } else {
        Node::terminal(class)
    }
}

fn threshold_node(rng: &mut ChaCha8Rng, avoid: Option<&str>) -> (String, f64) {
    loop {
        let (name, lo, hi) = CONTINUOUS[rng.random_range(0..CONTINUOUS.len())];
        if Some(name) != avoid {
            let t = (rng.random_range(lo..hi) * 8.0).round() / 8.0;
            return (name.to_string(), t);
        }
    }
}

fn build(rng: &mut ChaCha8Rng, nodes: &mut Vec<Node>, depth: usize, k: usize) -> usize {
    // Sometimes reuse an existing terminal to make a true DAG.
    if depth == 0 || rng.random_bool(0.25) {
        // Placeholders for unfinished internal nodes have no distribution.
        let shared = nodes.iter().position(|n| matches!(n, Node::Terminal { distribution, .. } if !distribution.is_empty()));
        if let Some(shared) = shared.filter(|_| rng.random_bool(0.3)) {
            return shared;
        }
        nodes.push(terminal(rng, k));
        return nodes.len() - 1;
    }
    let id = nodes.len();
    nodes.push(Node::terminal(1));
    if rng.random_bool(0.2) {
        let a = build(rng, nodes, depth - 1, k);
        let b = build(rng, nodes, depth - 1, k);
        nodes[id] = Node::categories(
            "Sex",
            vec![CategoryGroup::new(&[(0, "Female")]), CategoryGroup::new(&[(1, "Male")])],
            vec![Edge::and(a), Edge::and(b)],
        );
        return id;
    }
    let (feature, t) = threshold_node(rng, None);
    let node = if rng.random_bool(0.35) {
        let or_arm = rng.random_range(0..2);
        let substitute = build_substitute(rng, nodes, depth - 1, k, &feature);
        let other = build(rng, nodes, depth - 1, k);
        let (le, gt) = if or_arm == 0 { (Edge::or(substitute), Edge::and(other)) } else { (Edge::and(other), Edge::or(substitute)) };
        Node::threshold(&feature, t, le, gt)
    } else {
        let le = build(rng, nodes, depth - 1, k);
        let gt = build(rng, nodes, depth - 1, k);
        Node::threshold(&feature, t, Edge::and(le), Edge::and(gt))
    };
    nodes[id] = node;
    id
}

/// An internal two-arm node, possibly chaining to a further substitute.
fn build_substitute(rng: &mut ChaCha8Rng, nodes: &mut Vec<Node>, depth: usize, k: usize, avoid: &str) -> usize {
    let id = nodes.len();
    nodes.push(Node::terminal(1));
    let (feature, t) = threshold_node(rng, Some(avoid));
    let d = depth.saturating_sub(1);
    let node = if depth > 0 && rng.random_bool(0.3) {
        let next = build_substitute(rng, nodes, d, k, &feature);
        let other = build(rng, nodes, d, k);
        Node::threshold(&feature, t, Edge::and(other), Edge::or(next))
    } else {
        let le = build(rng, nodes, d, k);
        let gt = build(rng, nodes, d, k);
        Node::threshold(&feature, t, Edge::and(le), Edge::and(gt))
    };
    nodes[id] = node;
    id
}

/// A random valid diagram of depth at most 5.
pub fn random_mvdd(seed: u64) -> Mvdd {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.random_range(2..=5);
    let mut nodes = Vec::new();
    let root = build(&mut rng, &mut nodes, 5, k);
    Mvdd::new(nodes, root, k, "invasive-hemodynamics", Outcome::DeLvTx).expect("generated diagrams are valid")
}

/// Values for some of the fuzzed features; each is absent with probability `missing`.
pub fn random_values(rng: &mut ChaCha8Rng, missing: f64) -> BTreeMap<String, f64> {
    let mut values = BTreeMap::new();
    for (name, lo, hi) in CONTINUOUS {
        if !rng.random_bool(missing) {
            values.insert(name.to_string(), (rng.random_range(lo..hi) * 8.0).round() / 8.0);
        }
    }
    if !rng.random_bool(missing) {
        values.insert("Sex".to_string(), f64::from(rng.random_range(0..2u8)));
    }
    values
}
