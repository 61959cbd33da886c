use serde::{Deserialize, Serialize};

use crate::math::{abs, mean, sample_variance, sqrt};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Magnitude {
    Negligible,
    Small,
    Medium,
    Large,
}

impl Magnitude {
    /// Cohen's thresholds on |d|: 0.2, 0.5, 0.8.
    pub fn classify(d: f64) -> Self {
        let d = abs(d);
        if d < 0.2 {
            Magnitude::Negligible
        } else if d < 0.5 {
            Magnitude::Small
        } else if d < 0.8 {
            Magnitude::Medium
        } else {
            Magnitude::Large
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectSize {
    pub d: f64,
    pub magnitude: Magnitude,
}

/// Cohen's d with the pooled (n - 1 weighted) standard deviation.
pub fn cohens_d(xs: &[f64], ys: &[f64]) -> Result<EffectSize> {
    if xs.len() < 2 || ys.len() < 2 {
        return Err(Error::input("Cohen's d needs at least two values per sample"));
    }
    let (n1, n2) = (xs.len() as f64, ys.len() as f64);
    let pooled = ((n1 - 1.0) * sample_variance(xs) + (n2 - 1.0) * sample_variance(ys)) / (n1 + n2 - 2.0);
    if pooled.is_nan() || pooled <= 0.0 {
        return Err(Error::DegenerateVariance("pooled variance is zero".into()));
    }
    let d = (mean(xs) - mean(ys)) / sqrt(pooled);
    Ok(EffectSize {
        d,
        magnitude: Magnitude::classify(d),
    })
}
