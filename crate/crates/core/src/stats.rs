//! Goodness-of-fit helpers used by the sampler checks.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Total-variation distance `½ Σ |p_i − q_i|` between two weight vectors.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "distributions over different supports");
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Empirical frequencies from counts.
pub fn frequencies(counts: &[u64]) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    counts.iter().map(|&c| c as f64 / total.max(1) as f64).collect()
}

#[derive(Debug, Clone, Copy)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson chi-square test of observed counts against expected probabilities.
/// Cells with expected count below `min_expected` are pooled into one cell.
pub fn chi_square(observed: &[u64], expected_probs: &[f64], min_expected: f64) -> ChiSquare {
    assert_eq!(observed.len(), expected_probs.len());
    let total: u64 = observed.iter().sum();
    let n = total as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut pooled = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(expected_probs) {
        let e = p * n;
        if e < min_expected {
            pooled.0 += o as f64;
            pooled.1 += e;
        } else {
            cells.push((o as f64, e));
        }
    }
    if pooled.1 > 0.0 {
        cells.push(pooled);
    }
    let statistic: f64 = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = cells.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        1.0 - ChiSquared::new(dof as f64).expect("dof > 0").cdf(statistic)
    };
    ChiSquare { statistic, dof, p_value }
}

/// Running mean and variance (Welford), mergeable across replicas.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        self.mean += delta * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        (self.variance() / self.count.max(1) as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tv_and_chi_square() {
        assert_eq!(total_variation(&[0.5, 0.5], &[1.0, 0.0]), 0.5);
        let r = chi_square(&[50, 50], &[0.5, 0.5], 5.0);
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        let r = chi_square(&[90, 10], &[0.5, 0.5], 5.0);
        assert!(r.p_value < 1e-10);
    }

    #[test]
    fn moments_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..100).map(|k| (k as f64 * 0.37).sin()).collect();
        let mut all = Moments::default();
        xs.iter().for_each(|&x| all.push(x));
        let (mut a, mut b) = (Moments::default(), Moments::default());
        xs[..37].iter().for_each(|&x| a.push(x));
        xs[37..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert!((a.mean - all.mean).abs() < 1e-14);
        assert!((a.variance() - all.variance()).abs() < 1e-14);
    }
}
