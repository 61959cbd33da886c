use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{cohens_d, Magnitude, StatTestResult};
use crate::math::mean;
use crate::{Error, Result};

/// Result of ranking the approaches on one metric of one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingOutcome {
    /// Best mean rank first.
    pub approaches: Vec<String>,
    /// Aligned with `approaches`.
    pub mean_ranks: Vec<f64>,
    pub critical_distance: Option<f64>,
    pub groups: Vec<Vec<String>>,
    pub rankscores: BTreeMap<String, f64>,
    /// False when the Friedman test did not reject; everything is then one group.
    pub significant: bool,
    pub friedman: Option<StatTestResult>,
}

/// Partitions approaches into contiguous groups in mean-rank order.
///
/// `values[a]` holds the per-product metric values of approach `a`. A new
/// group starts wherever two consecutive mean ranks differ by more than `cd`.
/// Adjacent groups are then merged while Cohen's d between their pooled
/// values is negligible.
pub fn build_groups(mean_ranks: &[f64], cd: f64, values: &[Vec<f64>]) -> Result<Vec<Vec<usize>>> {
    if mean_ranks.len() != values.len() {
        return Err(Error::input(alloc::format!(
            "{} mean ranks but {} value rows",
            mean_ranks.len(),
            values.len()
        )));
    }
    if mean_ranks.is_empty() {
        return Ok(Vec::new());
    }
    if mean_ranks.iter().any(|r| !r.is_finite()) || !cd.is_finite() || cd < 0.0 {
        return Err(Error::input("mean ranks and critical distance must be finite"));
    }
    let n = values[0].len();
    if values.iter().any(|row| row.len() != n) {
        return Err(Error::input("value rows differ in length"));
    }

    let mut order: Vec<usize> = (0..mean_ranks.len()).collect();
    order.sort_by(|&a, &b| mean_ranks[a].total_cmp(&mean_ranks[b]).then(a.cmp(&b)));

    let mut groups: Vec<Vec<usize>> = alloc::vec![alloc::vec![order[0]]];
    for w in order.windows(2) {
        if mean_ranks[w[1]] - mean_ranks[w[0]] > cd {
            groups.push(Vec::new());
        }
        groups.last_mut().unwrap().push(w[1]);
    }

    let pooled = |g: &[usize]| -> Vec<f64> { g.iter().flat_map(|&a| values[a].iter().copied()).collect() };
    'scan: loop {
        for i in 0..groups.len().saturating_sub(1) {
            if negligible(&pooled(&groups[i]), &pooled(&groups[i + 1])) {
                let next = groups.remove(i + 1);
                groups[i].extend(next);
                continue 'scan;
            }
        }
        break;
    }
    Ok(groups)
}

fn negligible(a: &[f64], b: &[f64]) -> bool {
    match cohens_d(a, b) {
        Ok(e) => e.magnitude == Magnitude::Negligible,
        // Constant pooled values: only identical constants are indistinguishable.
        Err(_) => !a.is_empty() && !b.is_empty() && mean(a) == mean(b),
    }
}

/// `1 - (#approaches in strictly better groups) / (#approaches - 1)` for every member.
pub fn rankscore<K: Ord + Clone>(partition: &[Vec<K>]) -> Result<BTreeMap<K, f64>> {
    let total: usize = partition.iter().map(Vec::len).sum();
    if total < 2 {
        return Err(Error::input("rankscore needs at least two approaches"));
    }
    let mut out = BTreeMap::new();
    let mut higher = 0usize;
    for group in partition {
        let score = 1.0 - higher as f64 / (total - 1) as f64;
        for k in group {
            if out.insert(k.clone(), score).is_some() {
                return Err(Error::input("an approach appears in more than one group"));
            }
        }
        higher += group.len();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn shifted(base: &[f64], by: f64) -> Vec<f64> {
        base.iter().map(|v| v + by).collect()
    }

    const BASE: [f64; 6] = [0.1, 0.5, 0.3, 0.9, 0.2, 0.7];

    #[test]
    fn gap_scan_then_keep_distinct_groups() {
        // pooled d between {A,B} and {C} is large, so the phase-one split survives
        let values = vec![BASE.to_vec(), BASE.to_vec(), shifted(&BASE, 2.0)];
        let g = build_groups(&[1.2, 1.5, 3.9], 1.0, &values).unwrap();
        assert_eq!(g, vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn moderate_effect_is_not_merged() {
        let sd = crate::math::sqrt(crate::math::sample_variance(&BASE));
        let values = vec![BASE.to_vec(), BASE.to_vec(), shifted(&BASE, 0.6 * sd)];
        let g = build_groups(&[1.2, 1.5, 3.9], 1.0, &values).unwrap();
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn negligible_effect_is_merged() {
        let sd = crate::math::sqrt(crate::math::sample_variance(&BASE));
        let values = vec![BASE.to_vec(), shifted(&BASE, 0.1 * sd)];
        let g = build_groups(&[1.0, 2.0], 0.5, &values).unwrap();
        assert_eq!(g, vec![vec![0, 1]]);
    }

    #[test]
    fn small_gaps_give_one_group() {
        let values = vec![BASE.to_vec(), shifted(&BASE, 5.0), shifted(&BASE, 10.0)];
        let g = build_groups(&[2.0, 1.5, 2.5], 1.0, &values).unwrap();
        assert_eq!(g, vec![vec![1, 0, 2]]);
    }

    #[test]
    fn constant_groups() {
        let same = build_groups(&[1.0, 3.0], 1.0, &[vec![0.5; 4], vec![0.5; 4]]).unwrap();
        assert_eq!(same.len(), 1);
        let diff = build_groups(&[1.0, 3.0], 1.0, &[vec![0.5; 4], vec![0.7; 4]]).unwrap();
        assert_eq!(diff.len(), 2);
    }

    #[test]
    fn misaligned_input() {
        assert!(build_groups(&[1.0, 2.0], 1.0, &[vec![1.0]]).is_err());
        assert!(build_groups(&[1.0, 2.0], 1.0, &[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn rankscore_examples() {
        let r = rankscore(&[vec!["a", "b"], vec!["c"]]).unwrap();
        assert_eq!(r["a"], 1.0);
        assert_eq!(r["c"], 0.0);

        let ten: Vec<Vec<u32>> = vec![(0..3).collect(), (3..11).collect()];
        assert!((rankscore(&ten).unwrap()[&5] - 0.7).abs() < 1e-15);

        let singles: Vec<Vec<u32>> = (0..30).map(|i| vec![i]).collect();
        assert!((rankscore(&singles).unwrap()[&1] - (1.0 - 1.0 / 29.0)).abs() < 1e-15);

        let nine_above: Vec<Vec<u32>> = vec![(0..9).collect(), (9..30).collect()];
        assert!((rankscore(&nine_above).unwrap()[&9] - (1.0 - 9.0 / 29.0)).abs() < 1e-15);

        assert!(rankscore(&[vec!["solo"]]).is_err());
        assert!(rankscore(&[vec!["a"], vec!["a"]]).is_err());
    }

    proptest! {
        #[test]
        fn groups_partition_contiguously(
            ranks in proptest::collection::vec(1.0f64..10.0, 1..12),
            cd in 0.0f64..3.0,
            seed in proptest::collection::vec(-5.0f64..5.0, 12 * 6),
        ) {
            let values: Vec<Vec<f64>> = (0..ranks.len()).map(|a| seed[a * 6..a * 6 + 6].to_vec()).collect();
            let groups = build_groups(&ranks, cd, &values).unwrap();
            let flat: Vec<usize> = groups.iter().flatten().copied().collect();
            let mut sorted = flat.clone();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, (0..ranks.len()).collect::<Vec<_>>());
            for w in flat.windows(2) {
                prop_assert!(ranks[w[0]] <= ranks[w[1]]);
            }
            prop_assert!(groups.iter().all(|g| !g.is_empty()));

            if ranks.len() >= 2 {
                let scores = rankscore(&groups).unwrap();
                for &a in &groups[0] {
                    prop_assert_eq!(scores[&a], 1.0);
                }
                let per_group: Vec<f64> = groups.iter().map(|g| scores[&g[0]]).collect();
                prop_assert!(per_group.windows(2).all(|w| w[0] > w[1]));
                for g in &groups {
                    prop_assert!(g.iter().all(|a| scores[a] == scores[&g[0]]));
                }
            }
        }

        #[test]
        fn rankscore_ignores_labels(sizes in proptest::collection::vec(1usize..4, 2..6), offset in 0u32..1000) {
            let mut next = 0u32;
            let part: Vec<Vec<u32>> = sizes.iter().map(|&s| (0..s).map(|_| { next += 1; next }).collect()).collect();
            let relabeled: Vec<Vec<u32>> = part.iter().map(|g| g.iter().map(|x| x * 7 + offset).collect()).collect();
            let a = rankscore(&part).unwrap();
            let b = rankscore(&relabeled).unwrap();
            for (g, h) in part.iter().zip(&relabeled) {
                for (x, y) in g.iter().zip(h) {
                    prop_assert_eq!(a[x], b[y]);
                }
            }
        }
    }
}
