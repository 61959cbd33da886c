use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{Learner, TrainingSet};
use crate::dataset::TargetView;
use crate::math::{exp, ln, mean, sqrt};
use crate::metrics::Prediction;
use crate::{Error, Result};

/// A fitted reference classifier. Scores are estimates of P(defective).
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    LogisticRegression {
        centre: Vec<f64>,
        scale: Vec<f64>,
        weights: Vec<f64>,
        bias: f64,
    },
    GaussianNaiveBayes {
        /// Index 0 is the clean class, 1 the defective class.
        log_prior: [f64; 2],
        means: [Vec<f64>; 2],
        variances: [Vec<f64>; 2],
    },
    Cart {
        width: usize,
        root: Node,
    },
    Knn {
        k: usize,
        centre: Vec<f64>,
        scale: Vec<f64>,
        points: Vec<Vec<f64>>,
        labels: Vec<bool>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Model {
    pub fn width(&self) -> usize {
        match self {
            Model::LogisticRegression { weights, .. } => weights.len(),
            Model::GaussianNaiveBayes { means, .. } => means[0].len(),
            Model::Cart { width, .. } => *width,
            Model::Knn { centre, .. } => centre.len(),
        }
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        match self {
            Model::LogisticRegression {
                centre,
                scale,
                weights,
                bias,
            } => {
                let z: f64 = bias
                    + x.iter()
                        .zip(centre)
                        .zip(scale)
                        .zip(weights)
                        .map(|(((v, c), s), w)| w * (v - c) / s)
                        .sum::<f64>();
                sigmoid(z)
            }
            Model::GaussianNaiveBayes {
                log_prior,
                means,
                variances,
            } => {
                let mut joint = [0.0; 2];
                for c in 0..2 {
                    joint[c] = log_prior[c]
                        + x.iter()
                            .zip(&means[c])
                            .zip(&variances[c])
                            .map(|((v, m), var)| {
                                -0.5 * ln(2.0 * core::f64::consts::PI * var) - (v - m) * (v - m) / (2.0 * var)
                            })
                            .sum::<f64>();
                }
                // P(defective) = 1 / (1 + exp(joint_clean - joint_defective))
                sigmoid(joint[1] - joint[0])
            }
            Model::Cart { root, .. } => root.score(x),
            Model::Knn {
                k,
                centre,
                scale,
                points,
                labels,
            } => {
                let z: Vec<f64> = x.iter().zip(centre).zip(scale).map(|((v, c), s)| (v - c) / s).collect();
                let mut dist: Vec<(f64, usize)> = points
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (p.iter().zip(&z).map(|(a, b)| (a - b) * (a - b)).sum(), i))
                    .collect();
                dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let k = (*k).min(dist.len());
                dist[..k].iter().filter(|(_, i)| labels[*i]).count() as f64 / k as f64
            }
        }
    }
}

impl Node {
    fn score(&self, x: &[f64]) -> f64 {
        match self {
            Node::Leaf(p) => *p,
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if x[*feature] <= *threshold {
                    left.score(x)
                } else {
                    right.score(x)
                }
            }
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + exp(-z))
    } else {
        let e = exp(z);
        e / (1.0 + e)
    }
}

/// Column means and standard deviations; constant columns get scale 1.
fn standardizer(rows: &[Vec<f64>], width: usize) -> (Vec<f64>, Vec<f64>) {
    let n = rows.len() as f64;
    let mut centre = vec![0.0; width];
    let mut scale = vec![1.0; width];
    for j in 0..width {
        let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        let m = mean(&col);
        let sd = sqrt(col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n);
        centre[j] = m;
        if sd > 0.0 {
            scale[j] = sd;
        }
    }
    (centre, scale)
}

/// Fits a reference learner on the binary labels of `train`.
pub fn train_learner(kind: &Learner, train: &TrainingSet) -> Result<Model> {
    let width = train.feature_schema.len();
    let rows: Vec<Vec<f64>> = train.instances.iter().map(|i| i.features.clone()).collect();
    if let Some(bad) = train
        .instances
        .iter()
        .find(|i| i.features.iter().any(|v| !v.is_finite()))
    {
        return Err(Error::input(format!(
            "training instance `{}` has a non-finite feature",
            bad.name
        )));
    }
    let labels = train.labels();
    let defective = labels.iter().filter(|&&l| l).count();
    if defective == 0 || defective == labels.len() {
        return Err(Error::Learner("training data contains a single class".into()));
    }
    match *kind {
        Learner::LogisticRegression {
            iterations,
            learning_rate,
        } => Ok(fit_logistic(&rows, &labels, width, iterations, learning_rate)),
        Learner::GaussianNaiveBayes => Ok(fit_naive_bayes(&rows, &labels, width)),
        Learner::Cart { max_depth, min_leaf } => {
            let idx: Vec<usize> = (0..rows.len()).collect();
            Ok(Model::Cart {
                width,
                root: grow(&rows, &labels, idx, width, max_depth, min_leaf.max(1)),
            })
        }
        Learner::Knn { k } => {
            if k == 0 {
                return Err(Error::input("kNN needs k >= 1"));
            }
            let (centre, scale) = standardizer(&rows, width);
            let points = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .zip(&centre)
                        .zip(&scale)
                        .map(|((v, c), s)| (v - c) / s)
                        .collect()
                })
                .collect();
            Ok(Model::Knn {
                k,
                centre,
                scale,
                points,
                labels,
            })
        }
        Learner::Fix | Learner::Random => Err(Error::Learner(format!("{kind:?} is a baseline, not a learner"))),
    }
}

fn fit_logistic(rows: &[Vec<f64>], labels: &[bool], width: usize, iterations: u32, rate: f64) -> Model {
    let (centre, scale) = standardizer(rows, width);
    let z: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .zip(&centre)
                .zip(&scale)
                .map(|((v, c), s)| (v - c) / s)
                .collect()
        })
        .collect();
    let n = rows.len() as f64;
    let mut weights = vec![0.0; width];
    let mut bias = 0.0;
    let mut grad = vec![0.0; width];
    for _ in 0..iterations {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut grad_bias = 0.0;
        for (x, &y) in z.iter().zip(labels) {
            let p = sigmoid(bias + x.iter().zip(&weights).map(|(a, w)| a * w).sum::<f64>());
            let err = p - if y { 1.0 } else { 0.0 };
            for (g, a) in grad.iter_mut().zip(x) {
                *g += err * a;
            }
            grad_bias += err;
        }
        for (w, g) in weights.iter_mut().zip(&grad) {
            *w -= rate * g / n;
        }
        bias -= rate * grad_bias / n;
    }
    Model::LogisticRegression {
        centre,
        scale,
        weights,
        bias,
    }
}

fn fit_naive_bayes(rows: &[Vec<f64>], labels: &[bool], width: usize) -> Model {
    let overall = (0..width)
        .map(|j| {
            let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            let m = mean(&col);
            col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / col.len() as f64
        })
        .fold(0.0, f64::max);
    // Variance smoothing relative to the widest feature; a tiny absolute
    // floor keeps all-constant data finite.
    let floor = if overall > 0.0 { 1e-9 * overall } else { 1e-9 };
    let n = rows.len() as f64;
    let mut log_prior = [0.0; 2];
    let mut means = [vec![0.0; width], vec![0.0; width]];
    let mut variances = [vec![0.0; width], vec![0.0; width]];
    for c in 0..2 {
        let members: Vec<&Vec<f64>> = rows
            .iter()
            .zip(labels)
            .filter(|(_, &l)| l == (c == 1))
            .map(|(r, _)| r)
            .collect();
        let m = members.len() as f64;
        log_prior[c] = ln(m / n);
        for j in 0..width {
            let mu = members.iter().map(|r| r[j]).sum::<f64>() / m;
            let var = members.iter().map(|r| (r[j] - mu) * (r[j] - mu)).sum::<f64>() / m;
            means[c][j] = mu;
            variances[c][j] = var + floor;
        }
    }
    Model::GaussianNaiveBayes {
        log_prior,
        means,
        variances,
    }
}

fn gini(defective: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = defective as f64 / total as f64;
    2.0 * p * (1.0 - p)
}

#[allow(clippy::needless_range_loop)] // j is a column index into every row
fn grow(rows: &[Vec<f64>], labels: &[bool], idx: Vec<usize>, width: usize, depth: usize, min_leaf: usize) -> Node {
    let total = idx.len();
    let defective = idx.iter().filter(|&&i| labels[i]).count();
    let leaf = Node::Leaf(defective as f64 / total as f64);
    if depth == 0 || defective == 0 || defective == total || total < 2 * min_leaf {
        return leaf;
    }

    // (weighted child impurity, feature, threshold)
    let mut best: Option<(f64, usize, f64)> = None;
    let mut sorted = idx.clone();
    for j in 0..width {
        sorted.sort_by(|&a, &b| rows[a][j].total_cmp(&rows[b][j]).then(a.cmp(&b)));
        let mut left_def = 0;
        for pos in 0..total - 1 {
            if labels[sorted[pos]] {
                left_def += 1;
            }
            let (lo, hi) = (rows[sorted[pos]][j], rows[sorted[pos + 1]][j]);
            let left_n = pos + 1;
            if lo == hi || left_n < min_leaf || total - left_n < min_leaf {
                continue;
            }
            let impurity = (left_n as f64 * gini(left_def, left_n)
                + (total - left_n) as f64 * gini(defective - left_def, total - left_n))
                / total as f64;
            if best.is_none_or(|(b, _, _)| impurity < b) {
                best = Some((impurity, j, lo + (hi - lo) / 2.0));
            }
        }
    }
    let Some((impurity, feature, threshold)) = best else {
        return leaf;
    };
    // Splits that do not reduce impurity are still taken (an XOR needs one).
    if impurity > gini(defective, total) {
        return leaf;
    }
    let (left, right): (Vec<usize>, Vec<usize>) = idx.into_iter().partition(|&i| rows[i][feature] <= threshold);
    Node::Split {
        feature,
        threshold,
        left: Box::new(grow(rows, labels, left, width, depth - 1, min_leaf)),
        right: Box::new(grow(rows, labels, right, width, depth - 1, min_leaf)),
    }
}

/// Scores every target instance; decisions are `score >= 0.5`.
pub fn score_model(model: &Model, target: &TargetView) -> Result<Prediction> {
    for row in &target.features {
        if row.len() != model.width() {
            return Err(Error::input(format!(
                "target `{}` does not match the model's feature schema",
                target.product_id
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::input(format!(
                "target `{}` has a non-finite feature",
                target.product_id
            )));
        }
    }
    let scores: Vec<f64> = target.features.iter().map(|row| model.score(row)).collect();
    Ok(Prediction {
        product_id: target.product_id.clone(),
        decisions: scores.iter().map(|&s| s >= 0.5).collect(),
        scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approaches::fixtures::{target, training};
    use crate::dataset::fixtures::inst;
    use crate::dataset::{LabelMode, Product};
    use crate::metrics::{auc_roc, effort_ranking};
    use proptest::prelude::*;

    const SEPARABLE: [(&[f64], u64); 8] = [
        (&[0.0, 1.0], 0),
        (&[1.0, 0.5], 0),
        (&[0.5, 2.0], 0),
        (&[1.5, 1.0], 0),
        (&[3.0, 3.5], 1),
        (&[4.0, 3.0], 1),
        (&[3.5, 5.0], 2),
        (&[5.0, 4.0], 1),
    ];

    fn separable_product() -> Product {
        let instances = SEPARABLE
            .iter()
            .enumerate()
            .map(|(i, (f, d))| inst(&format!("t{i:03}"), f, 10, *d))
            .collect();
        Product::new("toy", "p", instances).unwrap()
    }

    fn all_learners() -> [Learner; 4] {
        [
            Learner::LogisticRegression {
                iterations: 1000,
                learning_rate: 0.01,
            },
            Learner::GaussianNaiveBayes,
            Learner::Cart {
                max_depth: 10,
                min_leaf: 1,
            },
            Learner::Knn { k: 3 },
        ]
    }

    #[test]
    fn separable_toy_set_is_learned() {
        let train = training(&SEPARABLE);
        let product = separable_product();
        let labels: Vec<bool> = product.instances().iter().map(|i| i.is_defective()).collect();
        for kind in all_learners() {
            let model = train_learner(&kind, &train).unwrap();
            let pred = score_model(&model, &product.unlabeled()).unwrap();
            assert_eq!(auc_roc(&pred, &product).unwrap(), 1.0, "{kind:?}");
            assert_eq!(pred.decisions, labels, "{kind:?}");
        }
    }

    #[test]
    fn naive_bayes_survives_zero_variance() {
        let train = training(&[(&[1.0, 0.0], 0), (&[1.0, 1.0], 0), (&[1.0, 5.0], 1), (&[1.0, 6.0], 1)]);
        let model = train_learner(&Learner::GaussianNaiveBayes, &train).unwrap();
        let pred = score_model(&model, &target(&[&[1.0, 0.5], &[2.0, 5.5]])).unwrap();
        assert!(pred.scores.iter().all(|s| s.is_finite()));
        assert_eq!(pred.decisions, vec![false, true]);

        let flat = training(&[(&[2.0], 0), (&[2.0], 1)]);
        let model = train_learner(&Learner::GaussianNaiveBayes, &flat).unwrap();
        assert!(score_model(&model, &target(&[&[2.0], &[3.0]]))
            .unwrap()
            .scores
            .iter()
            .all(|s| s.is_finite()));
    }

    #[test]
    fn cart_fits_xor() {
        let train = training(&[(&[0.0, 0.0], 0), (&[0.0, 1.0], 1), (&[1.0, 0.0], 1), (&[1.0, 1.0], 0)]);
        let model = train_learner(
            &Learner::Cart {
                max_depth: 2,
                min_leaf: 1,
            },
            &train,
        )
        .unwrap();
        let pred = score_model(&model, &target(&[&[0.0, 0.0], &[0.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]])).unwrap();
        assert_eq!(pred.decisions, vec![false, true, true, false]);

        let shallow = train_learner(
            &Learner::Cart {
                max_depth: 1,
                min_leaf: 1,
            },
            &train,
        )
        .unwrap();
        let pred = score_model(&shallow, &target(&[&[0.0, 0.0], &[1.0, 1.0]])).unwrap();
        assert_eq!(pred.scores, vec![0.5, 0.5]);
    }

    #[test]
    fn constant_model_ranks_by_size() {
        // min_leaf larger than half the data keeps the tree a single leaf
        let train = training(&SEPARABLE);
        let model = train_learner(
            &Learner::Cart {
                max_depth: 10,
                min_leaf: 5,
            },
            &train,
        )
        .unwrap();
        let sizes = [30u64, 10, 20];
        let instances = sizes
            .iter()
            .enumerate()
            .map(|(i, &s)| inst(&format!("x{i}"), &[i as f64, 1.0], s, 1))
            .collect();
        let product = Product::new("t", "q", instances).unwrap();
        let pred = score_model(&model, &product.unlabeled()).unwrap();
        assert!(pred.scores.iter().all(|&s| s == pred.scores[0]));
        let ranking = effort_ranking(&pred, &product, LabelMode::Binary).unwrap();
        assert_eq!(ranking.order, vec![1, 2, 0]);
    }

    #[test]
    fn learner_errors() {
        let one_class = training(&[(&[1.0], 0), (&[2.0], 0)]);
        for kind in all_learners() {
            assert!(matches!(train_learner(&kind, &one_class), Err(Error::Learner(_))));
        }
        let nan = training(&[(&[f64::NAN], 0), (&[2.0], 1)]);
        assert!(matches!(
            train_learner(&Learner::GaussianNaiveBayes, &nan),
            Err(Error::InvalidInput(_))
        ));

        let model = train_learner(&Learner::Knn { k: 1 }, &training(&[(&[1.0], 0), (&[2.0], 1)])).unwrap();
        assert!(score_model(&model, &target(&[&[1.0, 2.0]])).is_err());
        assert!(train_learner(&Learner::Fix, &training(&[(&[1.0], 0), (&[2.0], 1)])).is_err());
    }

    proptest! {
        #[test]
        fn scores_are_finite_probabilities(
            rows in proptest::collection::vec((proptest::collection::vec(-1e3f64..1e3, 3), 0u64..2), 4..30),
            probe in proptest::collection::vec(proptest::collection::vec(-1e4f64..1e4, 3), 1..10),
        ) {
            prop_assume!(rows.iter().any(|r| r.1 == 1) && rows.iter().any(|r| r.1 == 0));
            let refs: Vec<(&[f64], u64)> = rows.iter().map(|(f, d)| (f.as_slice(), *d)).collect();
            let train = training(&refs);
            let prefs: Vec<&[f64]> = probe.iter().map(|r| r.as_slice()).collect();
            for kind in all_learners() {
                let model = train_learner(&kind, &train).unwrap();
                let pred = score_model(&model, &target(&prefs)).unwrap();
                for (s, d) in pred.scores.iter().zip(&pred.decisions) {
                    prop_assert!(s.is_finite() && (0.0..=1.0).contains(s), "{kind:?} {s}");
                    prop_assert_eq!(*d, *s >= 0.5);
                }
                prop_assert_eq!(&pred, &score_model(&train_learner(&kind, &train).unwrap(), &target(&prefs)).unwrap());
            }
        }
    }
}
