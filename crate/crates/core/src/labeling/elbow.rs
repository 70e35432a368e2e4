use serde::{Deserialize, Serialize};

use super::cluster::{Hierarchy, Linkage};
use super::{EmbeddedPoint, LabelingError};

pub const DEFAULT_K_MAX: usize = 10;

/// Within-cluster sum of squares per `k` and the automated elbow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Elbow {
    pub recommended: usize,
    /// Set when the drop into the elbow is less than four times the drop after
    /// it, or when the choice was forced.
    pub low_confidence: bool,
    /// `(k, wss)` for `k = 1..=k_max`.
    pub curve: Vec<(usize, f64)>,
}

/// Picks the `k` farthest from the chord joining the first and last points of
/// the WSS curve. Only `2..k_max` are candidates; `k_max = 2` forces 2.
pub fn elbow_from_curve(wss: &[f64]) -> Elbow {
    let curve: Vec<(usize, f64)> = wss.iter().enumerate().map(|(i, w)| (i + 1, *w)).collect();
    let k_max = wss.len();
    if k_max <= 2 {
        return Elbow { recommended: 2, low_confidence: true, curve };
    }
    let (x0, y0) = (1.0, wss[0]);
    let (x1, y1) = (k_max as f64, wss[k_max - 1]);
    // Unnormalized distance: the chord length is a common factor.
    let distance = |k: usize| ((y1 - y0) * k as f64 - (x1 - x0) * wss[k - 1] + x1 * y0 - y1 * x0).abs();
    let mut best = 2;
    for k in 3..k_max {
        if distance(k) > distance(best) {
            best = k;
        }
    }
    let before = wss[best - 2] - wss[best - 1];
    let after = wss[best - 1] - wss[best];
    let low_confidence = !(before > 0.0) || before < 4.0 * after;
    Elbow { recommended: best, low_confidence, curve }
}

pub fn elbow_select_k(points: &[EmbeddedPoint], k_max: usize, linkage: Linkage) -> Result<Elbow, LabelingError> {
    if k_max < 2 || k_max > points.len() {
        return Err(LabelingError::KTooLarge { k: k_max, n: points.len() });
    }
    let hierarchy = Hierarchy::build(points, linkage);
    Ok(elbow_from_curve(&hierarchy.wss_curve(points, k_max)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn brute_wss(points: &[EmbeddedPoint], labels: &[usize]) -> f64 {
        let k = labels.iter().max().unwrap() + 1;
        (0..k)
            .map(|c| {
                let m: Vec<[f64; 2]> =
                    points.iter().zip(labels).filter(|(_, l)| **l == c).map(|(p, _)| p.coords).collect();
                let cx = m.iter().map(|p| p[0]).sum::<f64>() / m.len() as f64;
                let cy = m.iter().map(|p| p[1]).sum::<f64>() / m.len() as f64;
                m.iter().map(|p| (p[0] - cx).powi(2) + (p[1] - cy).powi(2)).sum::<f64>()
            })
            .sum()
    }

    #[test]
    fn five_blobs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let noise = Normal::new(0.0, 0.3).unwrap();
        let centers = [[0.0, 0.0], [10.0, 0.0], [0.0, 10.0], [10.0, 10.0], [20.0, 5.0]];
        let points: Vec<EmbeddedPoint> = (0..200)
            .map(|i| {
                let c = centers[i % 5];
                EmbeddedPoint {
                    record_id: i.to_string(),
                    coords: [c[0] + noise.sample(&mut rng), c[1] + noise.sample(&mut rng)],
                }
            })
            .collect();
        let h = Hierarchy::build(&points, Linkage::Ward);
        let truth: Vec<usize> = (0..200).map(|i| i % 5).collect();
        let wss1 = brute_wss(&points, &vec![0; 200]);
        let wss5 = brute_wss(&points, &truth);
        assert!(wss5 < 0.1 * wss1);
        let elbow = elbow_select_k(&points, 10, Linkage::Ward).unwrap();
        assert_eq!(elbow.recommended, 5);
        assert!(!elbow.low_confidence);
        assert!((elbow.curve[4].1 - brute_wss(&points, &h.cut(5).unwrap())).abs() < 1e-6);
        assert!((elbow.curve[4].1 - wss5).abs() < 1e-6);
        assert!(elbow.curve[4].1 - elbow.curve[9].1 < 0.02 * wss1);
    }

    #[test]
    fn uniform_grid_is_low_confidence() {
        let points: Vec<EmbeddedPoint> = (0..100)
            .map(|i| EmbeddedPoint { record_id: i.to_string(), coords: [(i % 10) as f64, (i / 10) as f64] })
            .collect();
        let elbow = elbow_select_k(&points, 10, Linkage::Ward).unwrap();
        assert_eq!(elbow.curve.len(), 10);
        assert!(elbow.low_confidence);
    }

    #[test]
    fn k_max_two_is_forced() {
        let elbow = elbow_from_curve(&[10.0, 1.0]);
        assert_eq!(elbow.recommended, 2);
        assert!(elbow.low_confidence);
    }

    #[test]
    fn choice_is_invariant_to_axis_scaling() {
        let wss = [100.0, 60.0, 20.0, 15.0, 12.0, 10.0, 9.0];
        let scaled: Vec<f64> = wss.iter().map(|w| w * 1e-3).collect();
        assert_eq!(elbow_from_curve(&wss).recommended, elbow_from_curve(&scaled).recommended);
        assert_eq!(elbow_from_curve(&wss).recommended, 3);
    }
}
