use serde::{Deserialize, Serialize};

pub const BINS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    /// `None` for an empty bin.
    pub mean_predicted: Option<f64>,
    pub fraction_positive: Option<f64>,
}

impl CalibrationBin {
    pub fn is_empty(&self) -> bool {
        self.count == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTable {
    pub n: usize,
    pub bins: Vec<CalibrationBin>,
}

impl CalibrationTable {
    pub fn empty_bins(&self) -> usize {
        self.bins.iter().filter(|b| b.is_empty()).count()
    }
}

/// Ten equal-width bins `[0, 0.1), ..., [0.9, 1.0]`.
pub fn calibration(probabilities: &[f64], outcomes: &[bool]) -> CalibrationTable {
    assert_eq!(probabilities.len(), outcomes.len(), "one outcome per probability");
    let mut sums = [(0usize, 0.0f64, 0usize); BINS];
    for (&p, &y) in probabilities.iter().zip(outcomes) {
        let bin = ((p * BINS as f64).floor().max(0.0) as usize).min(BINS - 1);
        sums[bin].0 += 1;
        sums[bin].1 += p;
        sums[bin].2 += usize::from(y);
    }
    let bins = sums
        .iter()
        .enumerate()
        .map(|(i, &(count, total, positives))| CalibrationBin {
            lower: i as f64 / BINS as f64,
            upper: (i + 1) as f64 / BINS as f64,
            count,
            mean_predicted: (count > 0).then(|| total / count as f64),
            fraction_positive: (count > 0).then(|| positives as f64 / count as f64),
        })
        .collect();
    CalibrationTable { n: probabilities.len(), bins }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_bin() {
        let t = calibration(&[0.05; 4], &[true, false, true, false]);
        assert_eq!(t.bins[0].count, 4);
        assert_eq!(t.bins[0].fraction_positive, Some(0.5));
        assert_eq!(t.empty_bins(), 9);
    }

    #[test]
    fn edges_land_in_end_bins() {
        let t = calibration(&[0.0, 1.0, 1.0], &[false, true, true]);
        assert_eq!(t.bins[0].fraction_positive, Some(0.0));
        assert_eq!(t.bins[9].fraction_positive, Some(1.0));
        assert_eq!(t.bins[9].mean_predicted, Some(1.0));
    }

    fn simulate(n: usize, seed: u64) -> CalibrationTable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let y: Vec<bool> = p.iter().map(|&p| rng.random::<f64>() < p).collect();
        calibration(&p, &y)
    }

    #[test]
    fn simulated_calibration_hundred_records() {
        // Each bin's positive fraction is a mean of independent Bernoulli draws
        // whose expectation is the bin's mean prediction; Hoeffding at 0.001
        // overall, split across the ten bins.
        let t = simulate(100, 42);
        assert_eq!(t.bins.iter().map(|b| b.count).sum::<usize>(), 100);
        for b in t.bins.iter().filter(|b| !b.is_empty()) {
            let bound = ((2.0 * BINS as f64 / 0.001).ln() / (2.0 * b.count as f64)).sqrt();
            assert!((b.fraction_positive.unwrap() - b.mean_predicted.unwrap()).abs() <= bound, "{b:?}");
        }
    }

    #[test]
    fn simulated_calibration_tracks_bin_midpoints() {
        let t = simulate(10_000, 42);
        assert_eq!(t.empty_bins(), 0);
        for b in &t.bins {
            let mid = (b.lower + b.upper) / 2.0;
            assert!((b.fraction_positive.unwrap() - mid).abs() <= 0.2, "{b:?}");
        }
    }
}
