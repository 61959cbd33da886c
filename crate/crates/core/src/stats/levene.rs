use alloc::vec::Vec;

use super::distributions::f_sf;
use super::{StatTestResult, TestKind};
use crate::math::{abs, mean, median};
use crate::{Error, Result};

/// Brown-Forsythe variant of Levene's test: one-way ANOVA on absolute
/// deviations from each group's median.
pub fn levene_median(groups: &[&[f64]]) -> Result<StatTestResult> {
    if groups.len() < 2 || groups.iter().any(|g| g.len() < 2) {
        return Err(Error::input(
            "Levene's test needs at least two groups of size two or more",
        ));
    }
    let deviations: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| {
            let med = median(g);
            g.iter().map(|x| abs(x - med)).collect()
        })
        .collect();
    let k = groups.len() as f64;
    let total: usize = deviations.iter().map(Vec::len).sum();
    let n = total as f64;
    let grand = deviations.iter().flatten().sum::<f64>() / n;
    let mut between = 0.0;
    let mut within = 0.0;
    for z in &deviations {
        let m = mean(z);
        between += z.len() as f64 * (m - grand) * (m - grand);
        within += z.iter().map(|v| (v - m) * (v - m)).sum::<f64>();
    }
    if within == 0.0 {
        if between == 0.0 {
            return Ok(StatTestResult::new(TestKind::Levene, 0.0, 1.0));
        }
        return Err(Error::DegenerateVariance(
            "deviations are constant within every group".into(),
        ));
    }
    let (d1, d2) = (k - 1.0, n - k);
    let f = (between / d1) / (within / d2);
    Ok(StatTestResult::new(TestKind::Levene, f, f_sf(f, d1, d2)))
}
