use alloc::vec::Vec;

use super::distributions::normal_sf;
use super::rank::{average_ranks, tie_sizes};
use super::{StatTestResult, TestKind};
use crate::math::{abs, sqrt};
use crate::{Error, Result};

/// Largest combined sample size for which the exact null distribution is used.
pub const EXACT_LIMIT: usize = 20;

/// Two-sided Mann-Whitney U test. The statistic is `U` for `xs`: the number of
/// (x, y) pairs with `x > y`, ties counting one half.
///
/// The p-value is exact for tie-free samples with `n + m <= 20`; otherwise it
/// uses the normal approximation with tie and continuity correction.
pub fn mann_whitney_u(xs: &[f64], ys: &[f64]) -> Result<StatTestResult> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::input("Mann-Whitney U needs two non-empty samples"));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::input("Mann-Whitney U needs finite values"));
    }
    let (n, m) = (xs.len(), ys.len());
    let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let ranks = average_ranks(&pooled);
    let rank_sum: f64 = ranks[..n].iter().sum();
    let (nf, mf) = (n as f64, m as f64);
    let u = rank_sum - nf * (nf + 1.0) / 2.0;
    let ties = tie_sizes(&pooled);

    let p = if ties.is_empty() && n + m <= EXACT_LIMIT {
        exact_two_sided(n, m, u)
    } else {
        let total = nf + mf;
        let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (total * (total - 1.0));
        let var = nf * mf / 12.0 * ((total + 1.0) - tie_term);
        if var <= 0.0 {
            1.0
        } else {
            let dev = (abs(u - nf * mf / 2.0) - 0.5).max(0.0);
            (2.0 * normal_sf(dev / sqrt(var))).min(1.0)
        }
    };
    Ok(StatTestResult::new(TestKind::MannWhitneyU, u, p))
}

/// Number of rank arrangements giving each value of U, for sample sizes n and m.
fn u_counts(n: usize, m: usize) -> Vec<f64> {
    // counts[i][j] for the current n; rolled over n to keep memory small
    let max_u = n * m;
    let mut prev: Vec<Vec<f64>> = (0..=m).map(|_| alloc::vec![1.0]).collect();
    for i in 1..=n {
        let mut cur: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        cur.push(alloc::vec![1.0]);
        for j in 1..=m {
            let mut row = alloc::vec![0.0; i * j + 1];
            // largest element comes from x: every y is below it, adds j to U
            for (u, c) in prev[j].iter().enumerate() {
                row[u + j] += c;
            }
            // largest element comes from y: adds nothing
            for (u, c) in cur[j - 1].iter().enumerate() {
                row[u] += c;
            }
            cur.push(row);
        }
        prev = cur;
    }
    let out = core::mem::take(&mut prev[m]);
    debug_assert_eq!(out.len(), max_u + 1);
    out
}

fn exact_two_sided(n: usize, m: usize, u: f64) -> f64 {
    let counts = u_counts(n, m);
    let total: f64 = counts.iter().sum();
    let u = u as usize;
    let lower: f64 = counts[..=u].iter().sum::<f64>() / total;
    let upper: f64 = counts[u..].iter().sum::<f64>() / total;
    (2.0 * lower.min(upper)).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    /// Enumerates every way to pick which of the pooled ranks belong to xs.
    fn enumeration_p(n: usize, m: usize, u_obs: f64) -> f64 {
        let total = n + m;
        let (mut le, mut ge, mut all) = (0u64, 0u64, 0u64);
        for mask in 0u32..(1 << total) {
            if mask.count_ones() as usize != n {
                continue;
            }
            let rank_sum: usize = (0..total).filter(|b| mask & (1 << b) != 0).map(|b| b + 1).sum();
            let u = rank_sum as f64 - (n * (n + 1)) as f64 / 2.0;
            all += 1;
            if u <= u_obs {
                le += 1;
            }
            if u >= u_obs {
                ge += 1;
            }
        }
        (2.0 * (le.min(ge) as f64) / all as f64).min(1.0)
    }

    #[test]
    fn separated_samples() {
        let r = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 0.1).abs() < 1e-15);
    }

    #[test]
    fn identical_samples() {
        let r = mann_whitney_u(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(r.statistic, 8.0);
        assert!(r.p_value >= 0.9);
        let flat = mann_whitney_u(&[2.0; 5], &[2.0; 4]).unwrap();
        assert_eq!(flat.p_value, 1.0);
    }

    #[test]
    fn asymptotic_matches_reference() {
        // scipy.stats.mannwhitneyu(..., method='asymptotic', use_continuity=True)
        let r = mann_whitney_u(&[1.5, 2.0, 2.0, 3.0, 8.0, 9.0], &[4.0, 5.0, 5.0, 6.0, 2.0, 0.5, 11.0]).unwrap();
        assert_eq!(r.statistic, 18.0);
        assert!((r.p_value - 0.719_130_334_451_519_4).abs() < 1e-12);
    }

    #[test]
    fn empty_sample_is_error() {
        assert!(mann_whitney_u(&[], &[1.0]).is_err());
    }

    #[test]
    fn exact_matches_enumeration_small() {
        for n in 1..=6 {
            for m in 1..=(8 - n).max(1) {
                if n + m > 8 {
                    continue;
                }
                for u in 0..=(n * m) {
                    assert_eq!(
                        exact_two_sided(n, m, u as f64),
                        enumeration_p(n, m, u as f64),
                        "n={n} m={m} u={u}"
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn exact_and_normal_agree_for_moderate_samples(seed in 0u64..10_000, n in 5usize..=10, m in 5usize..=10) {
            prop_assume!(n + m <= EXACT_LIMIT);
            // distinct values via a seeded permutation of 0..n+m
            let mut vals: Vec<f64> = (0..n + m).map(|i| i as f64).collect();
            let mut s = seed;
            for i in (1..vals.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                vals.swap(i, (s >> 33) as usize % (i + 1));
            }
            let exact = mann_whitney_u(&vals[..n], &vals[n..]).unwrap();
            let (nf, mf) = (n as f64, m as f64);
            let var = nf * mf * (nf + mf + 1.0) / 12.0;
            let approx = 2.0 * normal_sf(((exact.statistic - nf * mf / 2.0).abs() - 0.5).max(0.0) / var.sqrt());
            prop_assert!((exact.p_value - approx.min(1.0)).abs() <= 0.02);
            prop_assert!((0.0..=1.0).contains(&exact.p_value));
        }

        #[test]
        fn p_value_in_unit_interval(xs in proptest::collection::vec(0i32..10, 1..30), ys in proptest::collection::vec(0i32..10, 1..30)) {
            let xs: Vec<f64> = xs.into_iter().map(f64::from).collect();
            let ys: Vec<f64> = ys.into_iter().map(f64::from).collect();
            let r = mann_whitney_u(&xs, &ys).unwrap();
            prop_assert!((0.0..=1.0).contains(&r.p_value));
        }
    }

    #[test]
    fn counts_sum_to_binomial() {
        let c = u_counts(4, 3);
        assert_eq!(c.iter().sum::<f64>(), 35.0);
        assert_eq!(c, vec![1.0, 1.0, 2.0, 3.0, 4.0, 4.0, 5.0, 4.0, 4.0, 3.0, 2.0, 1.0, 1.0]);
    }
}
