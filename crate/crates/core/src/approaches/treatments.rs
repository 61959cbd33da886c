use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::TrainingSet;
use crate::dataset::TargetView;
use crate::math::{ln_1p, mean, median};
use crate::{Error, Result};

fn target_column(target: &TargetView, j: usize) -> Vec<f64> {
    target.features.iter().map(|row| row[j]).collect()
}

fn check_width(train: &TrainingSet, target: &TargetView) -> Result<()> {
    let width = train.feature_schema.len();
    if target.features.iter().any(|row| row.len() != width) {
        return Err(Error::input(format!(
            "target `{}` does not match the {width}-feature training schema",
            target.product_id
        )));
    }
    Ok(())
}

fn check_non_negative(train: &TrainingSet, target: &TargetView) -> Result<()> {
    for (j, feature) in train.feature_schema.iter().enumerate() {
        let negative =
            train.instances.iter().any(|i| i.features[j] < 0.0) || target.features.iter().any(|row| row[j] < 0.0);
        if negative {
            return Err(Error::Treatment {
                feature: feature.clone(),
                reason: "log transform needs non-negative values".into(),
            });
        }
    }
    Ok(())
}

/// Multiplies training feature `j` by `mean_j(target) / mean_j(train)`.
pub fn watanabe_standardize(train: &TrainingSet, target: &TargetView) -> Result<TrainingSet> {
    check_width(train, target)?;
    let mut factors = Vec::with_capacity(train.feature_schema.len());
    for (j, feature) in train.feature_schema.iter().enumerate() {
        let m = mean(&train.feature_column(j));
        if m == 0.0 {
            return Err(Error::Treatment {
                feature: feature.clone(),
                reason: "training mean is zero".into(),
            });
        }
        factors.push(mean(&target_column(target, j)) / m);
    }
    let mut out = train.clone();
    for inst in &mut out.instances {
        for (v, f) in inst.features.iter_mut().zip(&factors) {
            *v *= f;
        }
    }
    Ok(out)
}

/// Applies `ln(x + 1)` to both sides, then shifts every training feature by
/// `median_j(log target) - median_j(log train)`.
pub fn camargocruz_transform(train: &TrainingSet, target: &TargetView) -> Result<(TrainingSet, TargetView)> {
    check_width(train, target)?;
    check_non_negative(train, target)?;
    let mut out_train = train.clone();
    let mut out_target = target.clone();
    for inst in &mut out_train.instances {
        inst.features.iter_mut().for_each(|v| *v = ln_1p(*v));
    }
    for row in &mut out_target.features {
        row.iter_mut().for_each(|v| *v = ln_1p(*v));
    }
    for j in 0..train.feature_schema.len() {
        let shift = median(&target_column(&out_target, j)) - median(&out_train.feature_column(j));
        for inst in &mut out_train.instances {
            inst.features[j] += shift;
        }
    }
    Ok((out_train, out_target))
}

/// Relevancy filter: the union of the `k` nearest training instances of each
/// target instance, measured in `ln(x + 1)` space. Distance ties go to the
/// smaller instance name. Selected instances keep their original values and
/// training order.
pub fn turhan_filter(train: &TrainingSet, target: &TargetView, k: usize) -> Result<TrainingSet> {
    check_width(train, target)?;
    check_non_negative(train, target)?;
    if train.is_empty() {
        return Err(Error::input("training set is empty"));
    }
    if k >= train.len() {
        return Ok(train.clone());
    }
    let log_train: Vec<Vec<f64>> = train
        .instances
        .iter()
        .map(|i| i.features.iter().map(|&v| ln_1p(v)).collect())
        .collect();
    let mut by_name: Vec<usize> = (0..train.len()).collect();
    by_name.sort_by(|&a, &b| train.instances[a].name.cmp(&train.instances[b].name));

    let mut keep = vec![false; train.len()];
    let mut dist: Vec<(f64, usize)> = Vec::with_capacity(train.len());
    for row in &target.features {
        let log_row: Vec<f64> = row.iter().map(|&v| ln_1p(v)).collect();
        dist.clear();
        // Iterating in name order makes the stable sort break ties by name.
        dist.extend(by_name.iter().map(|&i| {
            let d: f64 = log_train[i].iter().zip(&log_row).map(|(a, b)| (a - b) * (a - b)).sum();
            (d, i)
        }));
        dist.sort_by(|a, b| a.0.total_cmp(&b.0));
        for &(_, i) in &dist[..k] {
            keep[i] = true;
        }
    }
    let instances = train
        .instances
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(i, _)| i.clone())
        .collect();
    TrainingSet::new(instances, train.feature_schema.clone())
}
