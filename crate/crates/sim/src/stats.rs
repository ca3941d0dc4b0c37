use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Result, SimError};

/// Student-t interval around the sample mean: `mean ± t_{(1+level)/2, n-1} s/√n`.
pub fn confidence_interval(samples: &[f64], level: f64) -> Result<(f64, f64)> {
    let s = RateSummary::from_samples(samples, level)?;
    Ok((s.ci_low, s.ci_high))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RateSummary {
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator).
    pub std: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl RateSummary {
    pub fn from_samples(samples: &[f64], level: f64) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(SimError::InsufficientSamples(n));
        }
        if !(level > 0.0 && level < 1.0) {
            return Err(SimError::InvalidConfig(format!(
                "confidence level must lie in (0, 1) (got {level})"
            )));
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let std = var.sqrt();
        let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
            .expect("degrees of freedom are positive")
            .inverse_cdf((1.0 + level) / 2.0);
        let half = t * std / (n as f64).sqrt();
        Ok(RateSummary {
            mean,
            std,
            ci_low: mean - half,
            ci_high: mean + half,
        })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.ci_low <= x && x <= self.ci_high
    }
}
