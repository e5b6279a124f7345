use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// z-scoring of inter-press intervals with training-set statistics.
///
/// `sigma` is the population standard deviation (divisor `N`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingStandardizer {
    pub mu: f64,
    pub sigma: f64,
}

impl TimingStandardizer {
    pub fn fit(train_intervals: &[f64]) -> Result<Self> {
        if train_intervals.len() < 2 {
            return Err(Error::Fit(format!(
                "timing standardizer needs at least 2 intervals, got {}",
                train_intervals.len()
            )));
        }
        if train_intervals.iter().any(|t| !t.is_finite()) {
            return Err(Error::Fit("non-finite training interval".into()));
        }
        let n = train_intervals.len() as f64;
        let mu = train_intervals.iter().sum::<f64>() / n;
        let var = train_intervals.iter().map(|t| (t - mu).powi(2)).sum::<f64>() / n;
        let sigma = var.sqrt();
        if !(sigma > 0.0) {
            return Err(Error::Fit("all training intervals are identical".into()));
        }
        Ok(TimingStandardizer { mu, sigma })
    }

    pub fn standardize(&self, t: f64) -> f64 {
        (t - self.mu) / self.sigma
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point() {
        let s = TimingStandardizer::fit(&[1.0, 3.0]).unwrap();
        assert_eq!((s.mu, s.sigma), (2.0, 1.0));
        assert_eq!(s.standardize(2.0), 0.0);
    }

    #[test]
    fn population_divisor() {
        let s = TimingStandardizer::fit(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.standardize(s.mu), 0.0);
        let expected = 1.5 / 1.25f64.sqrt();
        assert!((s.standardize(4.0) - expected).abs() < 1e-12);
        assert!((s.standardize(4.0) - 1.3416).abs() < 1e-4);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(TimingStandardizer::fit(&[1.0]).is_err());
        assert!(TimingStandardizer::fit(&[2.0, 2.0, 2.0]).is_err());
        assert!(TimingStandardizer::fit(&[1.0, f64::NAN]).is_err());
    }
}
