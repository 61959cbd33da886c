use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::distributions::chi_squared_sf;
use super::rank::average_ranks;
use super::{StatTestResult, TestKind};
use crate::{Error, Result};

/// Which end of a metric is better. Rank 1 goes to the best value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankDirection {
    LowerIsBetter,
    HigherIsBetter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriedmanOutcome {
    pub test: StatTestResult,
    /// Mean rank per approach (column order of the input).
    pub mean_ranks: Vec<f64>,
}

/// Friedman test over a products x approaches matrix.
pub fn friedman(matrix: &[Vec<f64>], direction: RankDirection) -> Result<FriedmanOutcome> {
    let n = matrix.len();
    if n < 2 {
        return Err(Error::input("Friedman test needs at least two products"));
    }
    let k = matrix[0].len();
    if k < 2 {
        return Err(Error::input("Friedman test needs at least two approaches"));
    }
    let mut rank_sums = alloc::vec![0.0; k];
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != k {
            return Err(Error::input(alloc::format!(
                "row {i} has {} cells, expected {k}",
                row.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::input(alloc::format!("row {i} has an undefined cell")));
        }
        let oriented: Vec<f64> = match direction {
            RankDirection::LowerIsBetter => row.clone(),
            RankDirection::HigherIsBetter => row.iter().map(|v| -v).collect(),
        };
        for (s, r) in rank_sums.iter_mut().zip(average_ranks(&oriented)) {
            *s += r;
        }
    }
    let (nf, kf) = (n as f64, k as f64);
    let mean_ranks: Vec<f64> = rank_sums.iter().map(|s| s / nf).collect();
    let centre = (kf + 1.0) / 2.0;
    let spread: f64 = mean_ranks.iter().map(|r| (r - centre) * (r - centre)).sum();
    let chi2 = 12.0 * nf / (kf * (kf + 1.0)) * spread;
    Ok(FriedmanOutcome {
        test: StatTestResult::new(TestKind::Friedman, chi2, chi_squared_sf(chi2, kf - 1.0)),
        mean_ranks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn hand_formula_fixture() {
        let m = vec![vec![1.0, 2.0, 3.0]; 4];
        let f = friedman(&m, RankDirection::LowerIsBetter).unwrap();
        assert_eq!(f.mean_ranks, vec![1.0, 2.0, 3.0]);
        assert_eq!(f.test.statistic, 8.0);
        assert!((f.test.p_value - 0.018_315_638_888_734_18).abs() < 1e-12);

        let hi = friedman(&m, RankDirection::HigherIsBetter).unwrap();
        assert_eq!(hi.mean_ranks, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn all_equal() {
        let f = friedman(&vec![vec![0.4; 5]; 3], RankDirection::LowerIsBetter).unwrap();
        assert_eq!(f.mean_ranks, vec![3.0; 5]);
        assert_eq!(f.test.statistic, 0.0);
        assert_eq!(f.test.p_value, 1.0);
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(friedman(&[vec![1.0, f64::NAN], vec![1.0, 2.0]], RankDirection::LowerIsBetter).is_err());
        assert!(friedman(&[vec![1.0, 2.0]], RankDirection::LowerIsBetter).is_err());
        assert!(friedman(&[vec![1.0, 2.0], vec![1.0]], RankDirection::LowerIsBetter).is_err());
    }

    proptest! {
        #[test]
        fn two_approaches_reduce_to_sign_statistic(rows in proptest::collection::vec((0i32..4, 0i32..4), 2..15)) {
            let m: Vec<Vec<f64>> = rows.iter().map(|&(a, b)| vec![a as f64, b as f64]).collect();
            let f = friedman(&m, RankDirection::LowerIsBetter).unwrap();
            let wins = rows.iter().filter(|(a, b)| a < b).count() as f64;
            let losses = rows.iter().filter(|(a, b)| a > b).count() as f64;
            let expected = (wins - losses) * (wins - losses) / rows.len() as f64;
            prop_assert!((f.test.statistic - expected).abs() < 1e-9);
        }

        #[test]
        fn mean_ranks_sum_to_centre(rows in proptest::collection::vec(proptest::collection::vec(0i32..5, 4), 2..10)) {
            let m: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
            let f = friedman(&m, RankDirection::HigherIsBetter).unwrap();
            prop_assert!((f.mean_ranks.iter().sum::<f64>() - 10.0).abs() < 1e-9);
            prop_assert!((0.0..=1.0).contains(&f.test.p_value));
        }
    }
}
