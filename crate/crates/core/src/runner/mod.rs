//! Benchmark orchestration: experiment planning, execution with repetitions,
//! metric tables, and the analyses built on top of them.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::approaches::{
    baseline_fix, baseline_random, run_approach, validate_roster, ApproachSpec, Learner, TrainingSet,
};
use crate::dataset::{Dataset, LabelMode, Product};
use crate::metrics::{
    auc_roc, aucec, classification_metrics, confusion, effort_curve, mean_curve, necm, relb, CurvePoint, Prediction,
};
use crate::stats::RankDirection;
use crate::{Error, Result};

mod analysis;

pub use analysis::{
    aggregate_rankscores, compare_label_modes, correlate_rankings, rank_metric, ColumnDiagnostic, MetricRanking,
    ModeComparison,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkConfig {
    /// Confidence level; tests are significant at `p < 1 - alpha`.
    pub alpha: f64,
    pub c_ratio: f64,
    pub relb_fraction: f64,
    /// Repetitions of randomized approaches that do not set their own count.
    pub repetitions: u32,
    pub label_mode: LabelMode,
    pub seed: u64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            alpha: 0.995,
            c_ratio: 15.0,
            relb_fraction: 0.2,
            repetitions: 10,
            label_mode: LabelMode::DefectCounts,
            seed: 0,
        }
    }
}

impl BenchmarkConfig {
    pub fn significance(&self) -> f64 {
        1.0 - self.alpha
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.5 && self.alpha < 1.0) {
            return Err(Error::input(format!("alpha must be in (0.5, 1), got {}", self.alpha)));
        }
        if !(self.c_ratio > 0.0 && self.c_ratio.is_finite()) {
            return Err(Error::input(format!("c_ratio must be positive, got {}", self.c_ratio)));
        }
        if !(self.relb_fraction > 0.0 && self.relb_fraction <= 1.0) {
            return Err(Error::input(format!(
                "relb_fraction must be in (0, 1], got {}",
                self.relb_fraction
            )));
        }
        if self.repetitions == 0 {
            return Err(Error::input("repetitions must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Experiment {
    pub dataset: String,
    pub target: String,
    pub training: Vec<String>,
}

/// One experiment per product, trained on every product of another project.
pub fn plan_experiments(ds: &Dataset) -> Result<Vec<Experiment>> {
    ds.products()
        .iter()
        .map(|target| {
            let training: Vec<String> = ds
                .products()
                .iter()
                .filter(|p| p.project_id() != target.project_id())
                .map(|p| p.product_id().to_string())
                .collect();
            if training.is_empty() {
                return Err(Error::Planning(format!(
                    "no product outside project `{}` to train for `{}`",
                    target.project_id(),
                    target.product_id()
                )));
            }
            Ok(Experiment {
                dataset: ds.name().to_string(),
                target: target.product_id().to_string(),
                training,
            })
        })
        .collect()
}

/// Pools the instances of an experiment's training products.
pub fn training_set(ds: &Dataset, exp: &Experiment) -> Result<TrainingSet> {
    let target_project = product_by_id(ds, &exp.target)?.project_id();
    let mut instances = Vec::new();
    for id in &exp.training {
        let p = product_by_id(ds, id)?;
        if p.project_id() == target_project {
            return Err(Error::Planning(format!(
                "training product `{id}` shares project `{target_project}` with the target"
            )));
        }
        instances.extend(p.instances().iter().cloned());
    }
    TrainingSet::new(instances, ds.feature_schema().to_vec())
}

fn product_by_id<'a>(ds: &'a Dataset, id: &str) -> Result<&'a Product> {
    ds.product(id)
        .ok_or_else(|| Error::Planning(format!("unknown product `{id}` in dataset `{}`", ds.name())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Necm,
    Relb,
    Aucec,
    Auc,
    FMeasure,
    GMeasure,
    Mcc,
    Recall,
    Precision,
    Error,
}

impl MetricKind {
    pub const ALL: [MetricKind; 10] = [
        MetricKind::Necm,
        MetricKind::Relb,
        MetricKind::Aucec,
        MetricKind::Auc,
        MetricKind::FMeasure,
        MetricKind::GMeasure,
        MetricKind::Mcc,
        MetricKind::Recall,
        MetricKind::Precision,
        MetricKind::Error,
    ];

    pub const COST: [MetricKind; 3] = [MetricKind::Necm, MetricKind::Relb, MetricKind::Aucec];

    pub fn id(self) -> &'static str {
        match self {
            MetricKind::Necm => "necm",
            MetricKind::Relb => "relb",
            MetricKind::Aucec => "aucec",
            MetricKind::Auc => "auc",
            MetricKind::FMeasure => "f_measure",
            MetricKind::GMeasure => "g_measure",
            MetricKind::Mcc => "mcc",
            MetricKind::Recall => "recall",
            MetricKind::Precision => "precision",
            MetricKind::Error => "error",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.id() == id)
    }

    pub fn is_cost(self) -> bool {
        Self::COST.contains(&self)
    }

    pub fn direction(self) -> RankDirection {
        match self {
            MetricKind::Necm | MetricKind::Error => RankDirection::LowerIsBetter,
            _ => RankDirection::HigherIsBetter,
        }
    }

    /// Cost metrics follow the configured label mode; classification metrics use binary labels.
    pub fn mode(self, cfg: &BenchmarkConfig) -> LabelMode {
        if self.is_cost() {
            cfg.label_mode
        } else {
            LabelMode::Binary
        }
    }
}

/// Approaches x products matrix of one metric. `None` marks an undefined cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTable {
    pub dataset: String,
    pub metric: MetricKind,
    pub mode: LabelMode,
    pub approaches: Vec<String>,
    pub products: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
}

impl MetricTable {
    pub fn get(&self, approach: &str, product: &str) -> Option<f64> {
        let a = self.approaches.iter().position(|x| x == approach)?;
        let p = self.products.iter().position(|x| x == product)?;
        self.values[a][p]
    }

    pub fn row(&self, approach: &str) -> Option<&[Option<f64>]> {
        let a = self.approaches.iter().position(|x| x == approach)?;
        Some(&self.values[a])
    }

    /// Mean over the defined cells of one approach.
    pub fn approach_mean(&self, approach: &str) -> Option<f64> {
        let defined: Vec<f64> = self.row(approach)?.iter().flatten().copied().collect();
        (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
    }

    pub(crate) fn same_shape(&self, other: &MetricTable) -> bool {
        self.dataset == other.dataset
            && self.metric == other.metric
            && self.approaches == other.approaches
            && self.products == other.products
    }
}

/// Mean cost-effectiveness curve of one approach on one product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub approach: String,
    pub product: String,
    pub mode: LabelMode,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRun {
    pub dataset: String,
    /// One table per [`MetricKind`], in [`MetricKind::ALL`] order.
    pub tables: Vec<MetricTable>,
    /// Cost metrics recomputed under the other label mode.
    pub alternate_tables: Vec<MetricTable>,
    pub curves: Vec<CurveRecord>,
    /// Undefined cells and learner failures, in execution order.
    pub notes: Vec<String>,
}

impl BenchmarkRun {
    pub fn table(&self, metric: MetricKind) -> Option<&MetricTable> {
        self.tables.iter().find(|t| t.metric == metric)
    }

    pub fn alternate_table(&self, metric: MetricKind) -> Option<&MetricTable> {
        self.alternate_tables.iter().find(|t| t.metric == metric)
    }
}

/// 64-bit FNV-1a.
pub fn stable_hash(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Seed of one repetition: base seed plus repetition index, offset by stable
/// hashes of the approach and product names. Adding an approach or product
/// never changes the streams of the others.
pub fn derive_seed(base: u64, repetition: u32, approach: &str, product: &str) -> u64 {
    base.wrapping_add(u64::from(repetition))
        .wrapping_add(stable_hash(approach))
        .wrapping_add(stable_hash(product).rotate_left(32))
}

const PRIMARY: usize = 10;

/// Metric values of one prediction: the ten primary metrics, then the three
/// cost metrics in the alternate label mode.
fn evaluate(pred: &Prediction, product: &Product, cfg: &BenchmarkConfig) -> Result<[Option<f64>; PRIMARY + 3]> {
    let cost = |mode: LabelMode| -> Result<[Option<f64>; 3]> {
        let conf = confusion(pred, product, mode)?;
        Ok([
            defined(necm(&conf, cfg.c_ratio))?,
            defined(relb(pred, product, cfg.relb_fraction, mode))?,
            defined(aucec(pred, product, mode))?,
        ])
    };
    let primary = cost(cfg.label_mode)?;
    let alternate = cost(cfg.label_mode.other())?;
    let cls = classification_metrics(&confusion(pred, product, LabelMode::Binary)?);
    let auc = defined(auc_roc(pred, product))?;
    Ok([
        primary[0],
        primary[1],
        primary[2],
        auc,
        cls.f_measure,
        cls.g_measure,
        cls.mcc,
        cls.recall,
        cls.precision,
        cls.error,
        alternate[0],
        alternate[1],
        alternate[2],
    ])
}

/// Undefined metrics become `None`; every other error is real.
fn defined(r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::UndefinedMetric(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Runs every approach on every experiment and stores per-cell means over repetitions.
///
/// A cell is undefined when the approach failed on that product or when any
/// repetition left the metric undefined.
pub fn run_benchmark(ds: &Dataset, roster: &[ApproachSpec], cfg: &BenchmarkConfig) -> Result<BenchmarkRun> {
    cfg.validate()?;
    validate_roster(roster)?;
    let experiments = plan_experiments(ds)?;
    let needs_training = roster.iter().any(|s| !s.learner.is_baseline());

    let approaches: Vec<String> = roster.iter().map(|s| s.name.clone()).collect();
    let products: Vec<String> = experiments.iter().map(|e| e.target.clone()).collect();
    let mut cells = vec![vec![vec![None; products.len()]; approaches.len()]; PRIMARY + 3];
    let mut curves = Vec::new();
    let mut notes = Vec::new();

    for (p, exp) in experiments.iter().enumerate() {
        let product = product_by_id(ds, &exp.target)?;
        let view = product.unlabeled();
        let train = if needs_training {
            Some(training_set(ds, exp)?)
        } else {
            None
        };
        for (a, spec) in roster.iter().enumerate() {
            let reps = spec.effective_repetitions(cfg.repetitions);
            let mut sums = [0.0; PRIMARY + 3];
            let mut undefined = [false; PRIMARY + 3];
            let mut rep_curves = Vec::with_capacity(reps as usize);
            let mut failed = false;
            for rep in 0..reps {
                let seed = derive_seed(cfg.seed, rep, &spec.name, &exp.target);
                let outcome = match (&spec.learner, &train) {
                    (Learner::Fix, _) => Ok(baseline_fix(&view)),
                    (Learner::Random, _) => Ok(baseline_random(&view, seed)),
                    (_, Some(t)) => run_approach(spec, t, &view, seed),
                    (_, None) => Err(Error::Planning("training set was not built".into())),
                };
                let pred = match outcome {
                    Ok(pred) => pred,
                    Err(e) => {
                        notes.push(format!("{}/{}: {} failed: {e}", ds.name(), exp.target, spec.name));
                        failed = true;
                        break;
                    }
                };
                let values = evaluate(&pred, product, cfg)?;
                for (m, v) in values.iter().enumerate() {
                    match v {
                        Some(v) => sums[m] += v,
                        None => undefined[m] = true,
                    }
                }
                if let Ok(curve) = effort_curve(&pred, product, cfg.label_mode) {
                    rep_curves.push(curve);
                }
            }
            if failed {
                continue;
            }
            for m in 0..PRIMARY + 3 {
                if undefined[m] {
                    let (metric, mode) = slot(m, cfg);
                    notes.push(format!(
                        "{}/{}: {} undefined for {} ({})",
                        ds.name(),
                        exp.target,
                        metric.id(),
                        spec.name,
                        mode.as_str()
                    ));
                } else {
                    cells[m][a][p] = Some(sums[m] / f64::from(reps));
                }
            }
            if rep_curves.len() == reps as usize {
                curves.push(CurveRecord {
                    approach: spec.name.clone(),
                    product: exp.target.clone(),
                    mode: cfg.label_mode,
                    points: mean_curve(&rep_curves),
                });
            }
        }
    }

    let mut tables: Vec<MetricTable> = cells
        .into_iter()
        .enumerate()
        .map(|(m, values)| {
            let (metric, mode) = slot(m, cfg);
            MetricTable {
                dataset: ds.name().to_string(),
                metric,
                mode,
                approaches: approaches.clone(),
                products: products.clone(),
                values,
            }
        })
        .collect();
    let alternate_tables = tables.split_off(PRIMARY);
    Ok(BenchmarkRun {
        dataset: ds.name().to_string(),
        tables,
        alternate_tables,
        curves,
        notes,
    })
}

fn slot(m: usize, cfg: &BenchmarkConfig) -> (MetricKind, LabelMode) {
    if m < PRIMARY {
        let metric = MetricKind::ALL[m];
        (metric, metric.mode(cfg))
    } else {
        (MetricKind::COST[m - PRIMARY], cfg.label_mode.other())
    }
}
