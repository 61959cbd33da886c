use super::distributions::studentized_range_quantile;
use crate::math::sqrt;
use crate::{Error, Result};

/// Critical value of the Nemenyi test: the upper-`alpha` studentized range
/// quantile (infinite degrees of freedom) divided by sqrt(2).
pub fn nemenyi_q(alpha: f64, k: usize) -> Result<f64> {
    Ok(studentized_range_quantile(alpha, k)? / core::f64::consts::SQRT_2)
}

/// Critical distance between mean ranks of `k` approaches over `n` products.
pub fn nemenyi_cd(k: usize, n: usize, alpha: f64) -> Result<f64> {
    if k < 2 || n < 2 {
        return Err(Error::input(alloc::format!(
            "Nemenyi test needs k >= 2 and n >= 2, got k={k}, n={n}"
        )));
    }
    let (kf, nf) = (k as f64, n as f64);
    Ok(nemenyi_q(alpha, k)? * sqrt(kf * (kf + 1.0) / (6.0 * nf)))
}
