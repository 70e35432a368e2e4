use serde::{Deserialize, Serialize};

use super::data::TrainingSet;
use super::impurity::{impurity_of_counts, Criterion};
use super::split::{best_category, best_threshold, weighted_impurity, Candidate, Item, SplitRule};
use super::TrainError;
use crate::cohort::FeatureSpec;
use crate::mvdd::{CategoryGroup, Edge, Metadata, Mvdd, Node, NodeId, Test};
use crate::RiskClass;

/// Smallest impurity decrease that justifies a split.
const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainParams {
    pub criterion: Criterion,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Slack allowed for OR substitutes, in impurity and in partition
    /// disagreement. Zero disables OR edges.
    pub or_gain_threshold: f64,
    pub folds: usize,
    pub seed: u64,
    /// Deal folds per class instead of from one shuffled list.
    pub stratified: bool,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            criterion: Criterion::Gini,
            max_depth: None,
            min_samples_leaf: 5,
            or_gain_threshold: 0.05,
            folds: 5,
            seed: 42,
            stratified: false,
        }
    }
}

impl TrainParams {
    pub fn check(&self) -> Result<(), TrainError> {
        if self.min_samples_leaf == 0 {
            return Err(TrainError::InvalidParams("min_samples_leaf must be at least 1".into()));
        }
        if self.folds < 2 {
            return Err(TrainError::InvalidParams("folds must be at least 2".into()));
        }
        if !(self.or_gain_threshold >= 0.0 && self.or_gain_threshold.is_finite()) {
            return Err(TrainError::InvalidParams("or_gain_threshold must be a finite value >= 0".into()));
        }
        Ok(())
    }
}

/// Row index and (possibly fractional) weight.
type Members = Vec<(usize, f64)>;

struct Scored {
    feature: usize,
    candidate: Candidate,
    /// Child impurity with absent records routed fractionally.
    routed: f64,
}

struct Grower<'a> {
    data: &'a TrainingSet,
    params: &'a TrainParams,
    nodes: Vec<Node>,
}

fn histogram(data: &TrainingSet, members: &[(usize, f64)]) -> Vec<f64> {
    let mut h = vec![0.0; data.k];
    for &(i, w) in members {
        h[data.labels[i].index()] += w;
    }
    h
}

fn share(a: f64, b: f64) -> f64 {
    if a + b > 0.0 { a / (a + b) } else { 0.5 }
}

impl<'a> Grower<'a> {
    fn value(&self, row: usize, feature: usize) -> Option<f64> {
        self.data.rows[row][feature]
    }

    fn leaf(&mut self, hist: &[f64]) -> NodeId {
        let mut best = 0;
        for (c, w) in hist.iter().enumerate() {
            if *w > hist[best] {
                best = c;
            }
        }
        let total: f64 = hist.iter().sum();
        let distribution = hist.iter().map(|w| if total > 0.0 { w / total } else { 0.0 }).collect();
        self.nodes.push(Node::Terminal { class: RiskClass::from_index(best), distribution });
        self.nodes.len() - 1
    }

    fn score(&self, members: &[(usize, f64)], feature: usize) -> Option<Scored> {
        let spec = &self.data.features[feature];
        let mut items: Vec<Item> = Vec::new();
        let mut absent = vec![0.0; self.data.k];
        for &(i, w) in members {
            match self.value(i, feature) {
                Some(v) => items.push((v, self.data.labels[i].index(), w)),
                None => absent[self.data.labels[i].index()] += w,
            }
        }
        let min_leaf = self.params.min_samples_leaf as f64;
        let candidate = if spec.is_categorical() {
            best_category(&items, spec, self.data.k, self.params.criterion, min_leaf)
        } else {
            best_threshold(&items, self.data.k, self.params.criterion, min_leaf)
        }?;
        let [s0, s1] = &candidate.sides;
        let p0 = share(s0.iter().sum(), s1.iter().sum());
        let c0: Vec<f64> = s0.iter().zip(&absent).map(|(s, a)| s + a * p0).collect();
        let c1: Vec<f64> = s1.iter().zip(&absent).map(|(s, a)| s + a * (1.0 - p0)).collect();
        let routed = weighted_impurity(&c0, &c1, self.params.criterion);
        Some(Scored { feature, candidate, routed })
    }

    /// Sends present records to their side and absent ones to both sides in
    /// proportion to the present weights.
    fn route(&self, members: &[(usize, f64)], feature: usize, rule: SplitRule) -> [Members; 2] {
        let mut sides: [Members; 2] = [Vec::new(), Vec::new()];
        let mut pending = Vec::new();
        let mut weight = [0.0; 2];
        for &(i, w) in members {
            match self.value(i, feature) {
                Some(v) => {
                    let s = rule.side(v);
                    weight[s] += w;
                    sides[s].push((i, w));
                }
                None => pending.push((i, w)),
            }
        }
        let p0 = share(weight[0], weight[1]);
        for (i, w) in pending {
            for (s, p) in [(0, p0), (1, 1.0 - p0)] {
                if w * p > 0.0 {
                    sides[s].push((i, w * p));
                }
            }
        }
        for side in &mut sides {
            side.sort_by_key(|m| m.0);
        }
        sides
    }

    /// Weighted share of both-present records on matching sides, flipped when
    /// the substitute runs the other way. `None` without overlap.
    fn concordance(&self, members: &[(usize, f64)], u: (usize, SplitRule), v: (usize, SplitRule)) -> Option<(f64, bool)> {
        let (mut agree, mut total) = (0.0, 0.0);
        for &(i, w) in members {
            if let (Some(a), Some(b)) = (self.value(i, u.0), self.value(i, v.0)) {
                total += w;
                if u.1.side(a) == v.1.side(b) {
                    agree += w;
                }
            }
        }
        if total <= 0.0 {
            return None;
        }
        let share = agree / total;
        Some(if share >= 0.5 { (share, false) } else { (1.0 - share, true) })
    }

    /// Destination of every record under an OR pair: `u` with its OR arm on
    /// side `or_side` pointing at `v`; `v`'s `shared_side` joins `u`'s AND arm.
    fn or_partition(
        &self,
        members: &[(usize, f64)],
        u: (usize, SplitRule),
        v: (usize, SplitRule),
        or_side: usize,
        shared_side: usize,
    ) -> [Members; 2] {
        let mut dest: [Members; 2] = [Vec::new(), Vec::new()];
        let mut pending = Vec::new();
        let mut at_v = [0.0; 2];
        for &(i, w) in members {
            if let Some(a) = self.value(i, u.0) {
                if u.1.side(a) != or_side {
                    dest[0].push((i, w));
                    continue;
                }
            }
            match self.value(i, v.0) {
                Some(b) => {
                    let d = usize::from(v.1.side(b) != shared_side);
                    at_v[d] += w;
                    dest[d].push((i, w));
                }
                None => pending.push((i, w)),
            }
        }
        let p0 = share(at_v[0], at_v[1]);
        for (i, w) in pending {
            for (d, p) in [(0, p0), (1, 1.0 - p0)] {
                if w * p > 0.0 {
                    dest[d].push((i, w * p));
                }
            }
        }
        for side in &mut dest {
            side.sort_by_key(|m| m.0);
        }
        dest
    }

    fn test_for(&self, feature: usize, rule: SplitRule) -> Test {
        let spec: &FeatureSpec = &self.data.features[feature];
        match rule {
            SplitRule::Threshold(threshold) => Test::Threshold { threshold },
            SplitRule::OneVsRest(code) => {
                let label = |c: i64| spec.category_label(c).unwrap_or_default().to_string();
                let mut rest: Vec<i64> = spec.categories.iter().map(|c| c.code).filter(|c| *c != code).collect();
                rest.sort();
                Test::Categories {
                    groups: vec![
                        CategoryGroup { codes: vec![code], labels: vec![label(code)] },
                        CategoryGroup { labels: rest.iter().map(|c| label(*c)).collect(), codes: rest },
                    ],
                }
            }
        }
    }

    fn internal(&mut self, feature: usize, rule: SplitRule, arms: Vec<Edge>) -> Node {
        Node::Internal { feature: self.data.features[feature].name.clone(), test: self.test_for(feature, rule), arms }
    }

    fn grow(&mut self, members: &[(usize, f64)], depth: usize) -> NodeId {
        let hist = histogram(self.data, members);
        let total: f64 = hist.iter().sum();
        let parent = impurity_of_counts(&hist, self.params.criterion);
        let depth_ok = self.params.max_depth.is_none_or(|d| depth < d);
        if parent <= 0.0 || !depth_ok || total < 2.0 * self.params.min_samples_leaf as f64 {
            return self.leaf(&hist);
        }
        let scored: Vec<Scored> = (0..self.data.features.len()).filter_map(|f| self.score(members, f)).collect();
        let Some(winner) = scored.iter().fold(None::<&Scored>, |best, s| match best {
            Some(b) if b.routed <= s.routed => Some(b),
            _ => Some(s),
        }) else {
            return self.leaf(&hist);
        };
        if parent - winner.routed <= MIN_GAIN {
            return self.leaf(&hist);
        }
        debug_assert!(winner.routed <= parent + 1e-12);
        let u = (winner.feature, winner.candidate.rule);

        let slack = self.params.or_gain_threshold;
        if slack > 0.0 {
            if let Some(node) = self.try_or(members, &scored, winner, parent, depth) {
                return node;
            }
        }

        let id = self.reserve();
        let [left, right] = self.route(members, u.0, u.1);
        let a = self.grow(&left, depth + 1);
        let b = self.grow(&right, depth + 1);
        self.nodes[id] = self.internal(u.0, u.1, vec![Edge::and(a), Edge::and(b)]);
        id
    }

    fn try_or(&mut self, members: &[(usize, f64)], scored: &[Scored], winner: &Scored, parent: f64, depth: usize) -> Option<NodeId> {
        let slack = self.params.or_gain_threshold;
        let u = (winner.feature, winner.candidate.rule);
        // Most concordant eligible runner-up; ties to lower impurity, then index.
        let mut pick: Option<(&Scored, f64, bool)> = None;
        for s in scored {
            if s.feature == winner.feature || s.routed > winner.routed + slack {
                continue;
            }
            let Some((conc, flipped)) = self.concordance(members, u, (s.feature, s.candidate.rule)) else { continue };
            if conc < 1.0 - slack {
                continue;
            }
            let better = match pick {
                None => true,
                Some((p, pc, _)) => conc > pc || (conc == pc && s.routed < p.routed),
            };
            if better {
                pick = Some((s, conc, flipped));
            }
        }
        let (runner, _, flipped) = pick?;
        let v = (runner.feature, runner.candidate.rule);

        let mut best: Option<(f64, usize, usize, [Members; 2])> = None;
        for or_side in [0, 1] {
            let and_side = 1 - or_side;
            let shared_side = if flipped { or_side } else { and_side };
            let dest = self.or_partition(members, u, v, or_side, shared_side);
            let ha = histogram(self.data, &dest[0]);
            let hb = histogram(self.data, &dest[1]);
            let (wa, wb): (f64, f64) = (ha.iter().sum(), hb.iter().sum());
            let min_leaf = self.params.min_samples_leaf as f64;
            if wa < min_leaf || wb < min_leaf {
                continue;
            }
            let score = weighted_impurity(&ha, &hb, self.params.criterion);
            if best.as_ref().is_none_or(|b| score < b.0) {
                best = Some((score, or_side, shared_side, dest));
            }
        }
        let (score, or_side, shared_side, [a_members, b_members]) = best?;
        if score - winner.routed > slack || parent - score <= MIN_GAIN {
            return None;
        }

        let u_id = self.reserve();
        let v_id = self.reserve();
        let a = self.grow(&a_members, depth + 1);
        let b = self.grow(&b_members, depth + 1);
        let mut u_arms = vec![Edge::and(a); 2];
        u_arms[or_side] = Edge::or(v_id);
        let mut v_arms = vec![Edge::and(b); 2];
        v_arms[shared_side] = Edge::and(a);
        self.nodes[u_id] = self.internal(u.0, u.1, u_arms);
        self.nodes[v_id] = self.internal(v.0, v.1, v_arms);
        Some(u_id)
    }

    fn reserve(&mut self) -> NodeId {
        self.nodes.push(Node::terminal(1));
        self.nodes.len() - 1
    }
}

/// Grows a diagram on the original (non-imputed) values.
pub fn grow_mvdd(data: &TrainingSet, params: &TrainParams) -> Result<Mvdd, TrainError> {
    params.check()?;
    if data.is_empty() || data.len() < params.min_samples_leaf {
        return Err(TrainError::InsufficientData { needed: params.min_samples_leaf.max(1), found: data.len() });
    }
    let mut grower = Grower { data, params, nodes: Vec::new() };
    let members: Members = (0..data.len()).map(|i| (i, 1.0)).collect();
    let root = grower.grow(&members, 0);
    let metadata = Metadata {
        seed: Some(params.seed),
        fold: None,
        criterion: Some(params.criterion.name().to_string()),
        or_gain_threshold: Some(params.or_gain_threshold),
        max_depth: params.max_depth,
        min_samples_leaf: Some(params.min_samples_leaf),
    };
    let mvdd = Mvdd::new(grower.nodes, root, data.k, data.feature_set.clone(), data.outcome)
        .map_err(|e| TrainError::Internal(e.to_string()))?;
    Ok(mvdd.with_metadata(metadata))
}
