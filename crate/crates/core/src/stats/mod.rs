//! Statistical comparison and ranking.
//!
//! Two-sample tests and effect sizes for comparing label modes, and the
//! Friedman / Nemenyi pipeline that turns a products x approaches matrix into
//! non-overlapping groups and rankscores.

use serde::{Deserialize, Serialize};

pub mod distributions;
mod effect;
mod friedman;
mod grouping;
mod kendall;
mod levene;
mod mann_whitney;
mod nemenyi;
pub mod rank;
mod shapiro;

pub use effect::{cohens_d, EffectSize, Magnitude};
pub use friedman::{friedman, FriedmanOutcome, RankDirection};
pub use grouping::{build_groups, rankscore, RankingOutcome};
pub use kendall::kendall_tau;
pub use levene::levene_median;
pub use mann_whitney::{mann_whitney_u, EXACT_LIMIT};
pub use nemenyi::{nemenyi_cd, nemenyi_q};
pub use shapiro::shapiro_wilk;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    MannWhitneyU,
    Levene,
    ShapiroWilk,
    Friedman,
}

impl TestKind {
    pub fn name(self) -> &'static str {
        match self {
            TestKind::MannWhitneyU => "mann_whitney_u",
            TestKind::Levene => "levene",
            TestKind::ShapiroWilk => "shapiro_wilk",
            TestKind::Friedman => "friedman",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatTestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub test: TestKind,
}

impl StatTestResult {
    pub(crate) fn new(test: TestKind, statistic: f64, p_value: f64) -> Self {
        Self {
            statistic,
            p_value: p_value.clamp(0.0, 1.0),
            test,
        }
    }

    pub fn significant(&self, threshold: f64) -> bool {
        self.p_value < threshold
    }
}
