//! Prediction approaches: trivial baselines, data treatments and reference learners.
//!
//! Targets are always handed over as a [`TargetView`], so no treatment or
//! learner can look at target labels.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dataset::{InstanceRecord, TargetView};
use crate::metrics::Prediction;
use crate::{Error, Result};

mod baselines;
mod learners;
mod treatments;

pub use baselines::{baseline_all, baseline_fix, baseline_random};
pub use learners::{score_model, train_learner, Model};
pub use treatments::{camargocruz_transform, turhan_filter, watanabe_standardize};

/// Repetitions used for randomized approaches when an approach leaves them unset.
pub const DEFAULT_REPETITIONS: u32 = 10;

fn default_turhan_k() -> usize {
    10
}
fn default_lr_iterations() -> u32 {
    1000
}
fn default_lr_rate() -> f64 {
    0.01
}
fn default_cart_depth() -> usize {
    10
}
fn default_cart_leaf() -> usize {
    5
}
fn default_knn_k() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Treatment {
    /// Training data as is.
    All,
    /// Rescale each training feature so its mean equals the target's.
    Watanabe,
    /// `ln(x + 1)` on both sides, then shift training medians onto the target's.
    CamargoCruz,
    /// Keep the `k` nearest training instances of every target instance.
    Turhan {
        #[serde(default = "default_turhan_k")]
        k: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Learner {
    /// Every instance defective.
    Fix,
    /// Fair coin per instance.
    Random,
    LogisticRegression {
        #[serde(default = "default_lr_iterations")]
        iterations: u32,
        #[serde(default = "default_lr_rate")]
        learning_rate: f64,
    },
    GaussianNaiveBayes,
    Cart {
        #[serde(default = "default_cart_depth")]
        max_depth: usize,
        #[serde(default = "default_cart_leaf")]
        min_leaf: usize,
    },
    Knn {
        #[serde(default = "default_knn_k")]
        k: usize,
    },
}

impl Learner {
    /// Baselines ignore the training data entirely.
    pub fn is_baseline(&self) -> bool {
        matches!(self, Learner::Fix | Learner::Random)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproachSpec {
    pub name: String,
    #[serde(default)]
    pub treatment: Option<Treatment>,
    pub learner: Learner,
    #[serde(default)]
    pub randomized: bool,
    #[serde(default)]
    pub repetitions: Option<u32>,
}

impl ApproachSpec {
    pub fn fix() -> Self {
        Self {
            name: "FIX".into(),
            treatment: None,
            learner: Learner::Fix,
            randomized: false,
            repetitions: None,
        }
    }

    pub fn random() -> Self {
        Self {
            name: "RANDOM".into(),
            treatment: None,
            learner: Learner::Random,
            randomized: true,
            repetitions: None,
        }
    }

    /// The RANDOM learner is randomized whatever the flag says.
    pub fn is_randomized(&self) -> bool {
        self.randomized || self.learner == Learner::Random
    }

    /// Runs per target: the explicit count, else `default` when randomized, else 1.
    pub fn effective_repetitions(&self, default: u32) -> u32 {
        match self.repetitions {
            Some(r) => r,
            None if self.is_randomized() => default,
            None => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::input("approach name is empty"));
        }
        if self.repetitions == Some(0) {
            return Err(Error::input(format!("approach `{}` has zero repetitions", self.name)));
        }
        if self.learner.is_baseline() && self.treatment.is_some() {
            return Err(Error::input(format!(
                "approach `{}`: baselines take no data treatment",
                self.name
            )));
        }
        let positive = match self.learner {
            Learner::Cart { max_depth, min_leaf } => max_depth > 0 && min_leaf > 0,
            Learner::Knn { k } => k > 0,
            Learner::LogisticRegression {
                iterations,
                learning_rate,
            } => iterations > 0 && learning_rate.is_finite() && learning_rate > 0.0,
            _ => true,
        };
        let treatment_ok = !matches!(self.treatment, Some(Treatment::Turhan { k: 0 }));
        if !positive || !treatment_ok {
            return Err(Error::input(format!(
                "approach `{}` has a non-positive parameter",
                self.name
            )));
        }
        Ok(())
    }
}

/// Checks every approach and that names are unique.
pub fn validate_roster(roster: &[ApproachSpec]) -> Result<()> {
    if roster.is_empty() {
        return Err(Error::input("approach roster is empty"));
    }
    let mut names = BTreeSet::new();
    for spec in roster {
        spec.validate()?;
        if !names.insert(spec.name.as_str()) {
            return Err(Error::input(format!("duplicate approach name `{}`", spec.name)));
        }
    }
    Ok(())
}

/// Pooled training instances from the products of other projects.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    pub instances: Vec<InstanceRecord>,
    pub feature_schema: Vec<String>,
}

impl TrainingSet {
    pub fn new(instances: Vec<InstanceRecord>, feature_schema: Vec<String>) -> Result<Self> {
        if instances.is_empty() {
            return Err(Error::input("training set is empty"));
        }
        if let Some(bad) = instances.iter().find(|i| i.features.len() != feature_schema.len()) {
            return Err(Error::input(format!(
                "training instance `{}` does not match the feature schema",
                bad.name
            )));
        }
        Ok(Self {
            instances,
            feature_schema,
        })
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub(crate) fn labels(&self) -> Vec<bool> {
        self.instances.iter().map(InstanceRecord::is_defective).collect()
    }

    pub(crate) fn feature_column(&self, j: usize) -> Vec<f64> {
        self.instances.iter().map(|i| i.features[j]).collect()
    }
}

/// Produces a prediction for `target` with one approach.
///
/// `seed` only matters for randomized approaches.
pub fn run_approach(spec: &ApproachSpec, train: &TrainingSet, target: &TargetView, seed: u64) -> Result<Prediction> {
    match &spec.learner {
        Learner::Fix => return Ok(baseline_fix(target)),
        Learner::Random => return Ok(baseline_random(target, seed)),
        _ => {}
    }
    let (train, target) = match spec.treatment.as_ref().unwrap_or(&Treatment::All) {
        Treatment::All => (baseline_all(train), target.clone()),
        Treatment::Watanabe => (watanabe_standardize(train, target)?, target.clone()),
        Treatment::CamargoCruz => camargocruz_transform(train, target)?,
        Treatment::Turhan { k } => (turhan_filter(train, target, *k)?, target.clone()),
    };
    let model = train_learner(&spec.learner, &train)?;
    score_model(&model, &target)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::dataset::fixtures::inst;
    use alloc::string::ToString;

    pub fn training(rows: &[(&[f64], u64)]) -> TrainingSet {
        let width = rows.first().map_or(0, |r| r.0.len());
        let instances = rows
            .iter()
            .enumerate()
            .map(|(i, (f, d))| inst(&format!("t{i:03}"), f, 10, *d))
            .collect();
        TrainingSet::new(instances, (0..width).map(|j| format!("f{j}")).collect()).unwrap()
    }

    pub fn target(rows: &[&[f64]]) -> TargetView {
        TargetView {
            product_id: "target".to_string(),
            names: (0..rows.len()).map(|i| format!("x{i:03}")).collect(),
            features: rows.iter().map(|r| r.to_vec()).collect(),
            sizes: alloc::vec![10; rows.len()],
        }
    }
}
