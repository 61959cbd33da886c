//! Cost metrics (NECM, RelB, AUCEC) and classification metrics.
//!
//! Effort is measured in lines of code. Entities are inspected in
//! [`effort_ranking`] order: score descending, then smaller entities first,
//! then instance name.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dataset::{defect_weight, LabelMode, Product};
use crate::math;
use crate::stats::rank::average_ranks;
use crate::{Error, Result};

/// Scores (higher = more defect-prone) and binary decisions for one target product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub product_id: String,
    pub scores: Vec<f64>,
    pub decisions: Vec<bool>,
}

impl Prediction {
    /// Checks lengths against the product and that every score is finite.
    pub fn check_aligned(&self, n: usize) -> Result<()> {
        if self.scores.len() != n || self.decisions.len() != n {
            return Err(Error::Alignment {
                product: self.product_id.clone(),
                expected: n,
                got: if self.scores.len() != n {
                    self.scores.len()
                } else {
                    self.decisions.len()
                },
            });
        }
        if let Some(i) = self.scores.iter().position(|s| !s.is_finite()) {
            return Err(Error::input(format!(
                "non-finite score at instance {i} of `{}`",
                self.product_id
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfusionSummary {
    pub tp: f64,
    pub fp: f64,
    pub tn: f64,
    #[serde(rename = "fn")]
    pub fn_: f64,
    pub mode: LabelMode,
}

impl ConfusionSummary {
    pub fn total(&self) -> f64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// tp/fn are weighted by [`defect_weight`]; fp/tn count non-defective instances.
pub fn confusion(pred: &Prediction, product: &Product, mode: LabelMode) -> Result<ConfusionSummary> {
    pred.check_aligned(product.len())?;
    let mut c = ConfusionSummary {
        tp: 0.0,
        fp: 0.0,
        tn: 0.0,
        fn_: 0.0,
        mode,
    };
    for (inst, &flagged) in product.instances().iter().zip(&pred.decisions) {
        match (inst.is_defective(), flagged) {
            (true, true) => c.tp += defect_weight(inst, mode),
            (true, false) => c.fn_ += defect_weight(inst, mode),
            (false, true) => c.fp += 1.0,
            (false, false) => c.tn += 1.0,
        }
    }
    Ok(c)
}

/// Normalized expected cost of misclassification: `(fp + c_ratio * fn) / total`.
pub fn necm(conf: &ConfusionSummary, c_ratio: f64) -> Result<f64> {
    if !(c_ratio > 0.0 && c_ratio.is_finite()) {
        return Err(Error::input(format!("cost ratio must be positive, got {c_ratio}")));
    }
    let total = conf.total();
    if total <= 0.0 {
        return Err(Error::UndefinedMetric("NECM of an empty confusion matrix".into()));
    }
    Ok((conf.fp + c_ratio * conf.fn_) / total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffortRanking {
    /// Instance indices in inspection order.
    pub order: Vec<usize>,
    pub cumulative_loc: Vec<u64>,
    pub cumulative_defects: Vec<f64>,
}

impl EffortRanking {
    pub fn total_loc(&self) -> u64 {
        self.cumulative_loc.last().copied().unwrap_or(0)
    }

    pub fn total_defects(&self) -> f64 {
        self.cumulative_defects.last().copied().unwrap_or(0.0)
    }
}

pub fn effort_ranking(pred: &Prediction, product: &Product, mode: LabelMode) -> Result<EffortRanking> {
    pred.check_aligned(product.len())?;
    let inst = product.instances();
    let mut order: Vec<usize> = (0..inst.len()).collect();
    order.sort_by(|&a, &b| {
        pred.scores[b]
            .total_cmp(&pred.scores[a])
            .then(inst[a].size_loc.cmp(&inst[b].size_loc))
            .then_with(|| inst[a].name.cmp(&inst[b].name))
    });
    let mut loc = 0u64;
    let mut defects = 0.0;
    let mut cumulative_loc = Vec::with_capacity(order.len());
    let mut cumulative_defects = Vec::with_capacity(order.len());
    for &i in &order {
        loc += inst[i].size_loc;
        defects += defect_weight(&inst[i], mode);
        cumulative_loc.push(loc);
        cumulative_defects.push(defects);
    }
    Ok(EffortRanking {
        order,
        cumulative_loc,
        cumulative_defects,
    })
}

fn require_effort_totals(ranking: &EffortRanking, product: &str) -> Result<(f64, f64)> {
    let loc = ranking.total_loc();
    let defects = ranking.total_defects();
    if loc == 0 {
        return Err(Error::UndefinedMetric(format!(
            "product `{product}` has zero total LOC"
        )));
    }
    if defects <= 0.0 {
        return Err(Error::UndefinedMetric(format!("product `{product}` has no defects")));
    }
    Ok((loc as f64, defects))
}

/// Share of the defect weight found when inspecting whole entities, in ranking
/// order, until the next entity would push reviewed LOC past
/// `floor(fraction * total LOC)`.
pub fn relb(pred: &Prediction, product: &Product, fraction: f64, mode: LabelMode) -> Result<f64> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::input(format!(
            "inspection fraction must be in (0, 1], got {fraction}"
        )));
    }
    let ranking = effort_ranking(pred, product, mode)?;
    let (total_loc, total_defects) = require_effort_totals(&ranking, product.product_id())?;
    let budget = math::floor(fraction * total_loc) as u64;
    let found = ranking
        .cumulative_loc
        .iter()
        .zip(&ranking.cumulative_defects)
        .take_while(|(&loc, _)| loc <= budget)
        .last()
        .map_or(0.0, |(_, &d)| d);
    Ok(found / total_defects)
}

/// Point on the cost-effectiveness curve: fraction of LOC reviewed and
/// fraction of defect weight found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub effort: f64,
    pub defects: f64,
}

/// Cost-effectiveness curve from (0,0) through one point per entity, ending at (1,1).
pub fn effort_curve(pred: &Prediction, product: &Product, mode: LabelMode) -> Result<Vec<CurvePoint>> {
    let ranking = effort_ranking(pred, product, mode)?;
    let (total_loc, total_defects) = require_effort_totals(&ranking, product.product_id())?;
    let mut points = Vec::with_capacity(ranking.order.len() + 1);
    points.push(CurvePoint {
        effort: 0.0,
        defects: 0.0,
    });
    for (&loc, &d) in ranking.cumulative_loc.iter().zip(&ranking.cumulative_defects) {
        points.push(CurvePoint {
            effort: loc as f64 / total_loc,
            defects: d / total_defects,
        });
    }
    Ok(points)
}

/// Trapezoidal area under a piecewise-linear curve.
pub fn curve_area(points: &[CurvePoint]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].effort - w[0].effort) * (w[0].defects + w[1].defects) / 2.0)
        .sum()
}

pub fn aucec(pred: &Prediction, product: &Product, mode: LabelMode) -> Result<f64> {
    Ok(curve_area(&effort_curve(pred, product, mode)?))
}

/// Pointwise mean of several cost-effectiveness curves.
///
/// The result is piecewise linear on the union of all breakpoints, so its
/// trapezoidal area equals the mean of the input areas. Vertical steps
/// (zero-LOC entities) are kept as a left and a right value at the same effort.
pub fn mean_curve(curves: &[Vec<CurvePoint>]) -> Vec<CurvePoint> {
    match curves {
        [] => return Vec::new(),
        [only] => return only.clone(),
        _ => {}
    }
    let mut grid: Vec<f64> = curves.iter().flatten().map(|p| p.effort).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut left = alloc::vec![0.0; grid.len()];
    let mut right = alloc::vec![0.0; grid.len()];
    for curve in curves {
        let mut seg = 0usize;
        for (g, &x) in grid.iter().enumerate() {
            // advance to the first point with effort >= x
            while seg < curve.len() && curve[seg].effort < x {
                seg += 1;
            }
            let (l, r) = if seg < curve.len() && curve[seg].effort == x {
                let first = curve[seg].defects;
                let mut last_idx = seg;
                while last_idx + 1 < curve.len() && curve[last_idx + 1].effort == x {
                    last_idx += 1;
                }
                (first, curve[last_idx].defects)
            } else if seg == 0 {
                (curve[0].defects, curve[0].defects)
            } else if seg >= curve.len() {
                let v = curve[curve.len() - 1].defects;
                (v, v)
            } else {
                let (a, b) = (curve[seg - 1], curve[seg]);
                let t = (x - a.effort) / (b.effort - a.effort);
                let v = a.defects + t * (b.defects - a.defects);
                (v, v)
            };
            left[g] += l;
            right[g] += r;
        }
    }
    let k = curves.len() as f64;
    let mut out = Vec::with_capacity(grid.len() * 2);
    for (g, &x) in grid.iter().enumerate() {
        let (l, r) = (left[g] / k, right[g] / k);
        out.push(CurvePoint { effort: x, defects: l });
        if r != l {
            out.push(CurvePoint { effort: x, defects: r });
        }
    }
    out
}

/// Metrics derived from a confusion matrix; `None` marks a zero denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationMetrics {
    pub recall: Option<f64>,
    pub precision: Option<f64>,
    pub error: Option<f64>,
    pub f_measure: Option<f64>,
    pub g_measure: Option<f64>,
    pub mcc: Option<f64>,
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den != 0.0).then(|| num / den)
}

pub fn classification_metrics(conf: &ConfusionSummary) -> ClassificationMetrics {
    let ConfusionSummary { tp, fp, tn, fn_, .. } = *conf;
    let recall = ratio(tp, tp + fn_);
    let precision = ratio(tp, tp + fp);
    let error = ratio(fp + fn_, tp + fp + tn + fn_);
    let f_measure = match (precision, recall) {
        (Some(p), Some(r)) => ratio(2.0 * p * r, p + r),
        _ => None,
    };
    let pf = ratio(fp, fp + tn);
    let g_measure = match (recall, pf) {
        (Some(r), Some(pf)) => ratio(2.0 * r * (1.0 - pf), r + (1.0 - pf)),
        _ => None,
    };
    let den = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
    let mcc = (den > 0.0).then(|| (tp * tn - fp * fn_) / math::sqrt(den));
    ClassificationMetrics {
        recall,
        precision,
        error,
        f_measure,
        g_measure,
        mcc,
    }
}

/// Area under the ROC curve on binary labels, via the Mann-Whitney statistic
/// with ties counted one half.
pub fn auc_roc(pred: &Prediction, product: &Product) -> Result<f64> {
    pred.check_aligned(product.len())?;
    let n_def = product.defective_count();
    let n_clean = product.len() - n_def;
    if n_def == 0 || n_clean == 0 {
        return Err(Error::UndefinedMetric(format!(
            "AUC needs both classes; `{}` has {n_def} defective and {n_clean} clean instances",
            product.product_id()
        )));
    }
    let ranks = average_ranks(&pred.scores);
    let rank_sum: f64 = product
        .instances()
        .iter()
        .zip(&ranks)
        .filter(|(i, _)| i.is_defective())
        .map(|(_, r)| r)
        .sum();
    let (nd, nc) = (n_def as f64, n_clean as f64);
    Ok((rank_sum - nd * (nd + 1.0) / 2.0) / (nd * nc))
}
