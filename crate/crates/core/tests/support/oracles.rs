//! Slow, obviously-correct reference computations.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Gini or entropy from a label histogram built with a hash map.
pub fn impurity_histogram(labels: &[u8], entropy: bool) -> f64 {
    let mut counts: HashMap<u8, usize> = HashMap::new();
    for l in labels {
        *counts.entry(*l).or_default() += 1;
    }
    let n = labels.len() as f64;
    let mut keys: Vec<u8> = counts.keys().copied().collect();
    keys.sort();
    if entropy {
        -keys.iter().map(|k| counts[k] as f64 / n).map(|p| p * p.log2()).sum::<f64>()
    } else {
        1.0 - keys.iter().map(|k| (counts[k] as f64 / n).powi(2)).sum::<f64>()
    }
}

/// Tries every midpoint between consecutive distinct values; keeps the first
/// strictly better one. Returns (threshold, size-weighted child impurity).
pub fn exhaustive_split(values: &[f64], labels: &[u8], entropy: bool) -> Option<(f64, f64)> {
    let mut distinct: Vec<f64> = values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let mut best: Option<(f64, f64)> = None;
    for w in distinct.windows(2) {
        let t = (w[0] + w[1]) / 2.0;
        let score = split_score(values, labels, t, entropy);
        if best.is_none_or(|(_, b)| score < b) {
            best = Some((t, score));
        }
    }
    best
}

/// Size-weighted child impurity of the split `value <= t`.
pub fn split_score(values: &[f64], labels: &[u8], t: f64, entropy: bool) -> f64 {
    let left: Vec<u8> = values.iter().zip(labels).filter(|(v, _)| **v <= t).map(|(_, l)| *l).collect();
    let right: Vec<u8> = values.iter().zip(labels).filter(|(v, _)| **v > t).map(|(_, l)| *l).collect();
    let n = values.len() as f64;
    left.len() as f64 / n * impurity_histogram(&left, entropy) + right.len() as f64 / n * impurity_histogram(&right, entropy)
}

/// Fraction of (positive, negative) pairs ranked correctly, ties counting half.
pub fn auc_pairs(positives: &[f64], negatives: &[f64]) -> f64 {
    let mut total = 0.0;
    for p in positives {
        for n in negatives {
            total += if p > n {
                1.0
            } else if p == n {
                0.5
            } else {
                0.0
            };
        }
    }
    total / (positives.len() * negatives.len()) as f64
}

/// C-index straight from its definition, picking extreme pairs one at a time.
pub fn c_index_definition(points: &[[f64; 2]], clusters: &[usize]) -> f64 {
    let mut distances = Vec::new();
    let mut within = 0.0;
    let mut n_within = 0;
    for i in 0..points.len() {
        for j in 0..i {
            let d = ((points[i][0] - points[j][0]).powi(2) + (points[i][1] - points[j][1]).powi(2)).sqrt();
            distances.push(d);
            if clusters[i] == clusters[j] {
                within += d;
                n_within += 1;
            }
        }
    }
    let pick = |largest: bool| {
        let mut used = vec![false; distances.len()];
        let mut sum = 0.0;
        for _ in 0..n_within {
            let mut best: Option<usize> = None;
            for (i, d) in distances.iter().enumerate() {
                if used[i] {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some(b) => (largest && *d > distances[b]) || (!largest && *d < distances[b]),
                };
                if better {
                    best = Some(i);
                }
            }
            used[best.unwrap()] = true;
            sum += distances[best.unwrap()];
        }
        sum
    };
    let (lo, hi) = (pick(false), pick(true));
    if hi == lo { 0.0 } else { (within - lo) / (hi - lo) }
}

fn heaviside(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x == 0.0 {
        0.5
    } else {
        0.0
    }
}

/// Paired DeLong z statistic from explicit placement values.
pub fn delong_z(a: &[f64], b: &[f64], outcome: &[bool]) -> (f64, f64) {
    let pos: Vec<usize> = (0..outcome.len()).filter(|&i| outcome[i]).collect();
    let neg: Vec<usize> = (0..outcome.len()).filter(|&i| !outcome[i]).collect();
    let (m, n) = (pos.len() as f64, neg.len() as f64);
    let place = |s: &[f64]| {
        let v10: Vec<f64> = pos.iter().map(|&i| neg.iter().map(|&j| heaviside(s[i] - s[j])).sum::<f64>() / n).collect();
        let v01: Vec<f64> = neg.iter().map(|&j| pos.iter().map(|&i| heaviside(s[i] - s[j])).sum::<f64>() / m).collect();
        (v10, v01)
    };
    let (a10, a01) = place(a);
    let (b10, b01) = place(b);
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let cov = |x: &[f64], y: &[f64]| {
        let (mx, my) = (mean(x), mean(y));
        x.iter().zip(y).map(|(p, q)| (p - mx) * (q - my)).sum::<f64>() / (x.len() as f64 - 1.0)
    };
    let delta = mean(&a10) - mean(&b10);
    let var = (cov(&a10, &a10) + cov(&b10, &b10) - 2.0 * cov(&a10, &b10)) / m
        + (cov(&a01, &a01) + cov(&b01, &b01) - 2.0 * cov(&a01, &b01)) / n;
    (delta, if var > 0.0 { delta / var.sqrt() } else { 0.0 })
}

/// Two-sided permutation p-value: swap each record's pair of scores with
/// probability 1/2 and compare studentized statistics.
pub fn permutation_p(a: &[f64], b: &[f64], outcome: &[bool], resamples: usize, seed: u64) -> f64 {
    let (_, observed) = delong_z(a, b, outcome);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut extreme = 0;
    let (mut pa, mut pb) = (a.to_vec(), b.to_vec());
    for _ in 0..resamples {
        for i in 0..a.len() {
            if rng.random_bool(0.5) {
                pa[i] = b[i];
                pb[i] = a[i];
            } else {
                pa[i] = a[i];
                pb[i] = b[i];
            }
        }
        let (_, z) = delong_z(&pa, &pb, outcome);
        if z.abs() >= observed.abs() - 1e-12 {
            extreme += 1;
        }
    }
    extreme as f64 / resamples as f64
}
