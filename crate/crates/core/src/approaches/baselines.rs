use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TrainingSet;
use crate::dataset::TargetView;
use crate::metrics::Prediction;

/// FIX: every instance defective. Scores are constant, so the effort ranking
/// falls through to the size tie-break.
pub fn baseline_fix(target: &TargetView) -> Prediction {
    Prediction {
        product_id: target.product_id.clone(),
        scores: vec![1.0; target.len()],
        decisions: vec![true; target.len()],
    }
}

/// RANDOM: score is a uniform draw in [0, 1), defective when the draw is >= 0.5.
pub fn baseline_random(target: &TargetView, seed: u64) -> Prediction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scores: Vec<f64> = (0..target.len()).map(|_| rng.random::<f64>()).collect();
    Prediction {
        product_id: target.product_id.clone(),
        decisions: scores.iter().map(|&s| s >= 0.5).collect(),
        scores,
    }
}

/// ALL: the training data unchanged.
pub fn baseline_all(train: &TrainingSet) -> TrainingSet {
    train.clone()
}
