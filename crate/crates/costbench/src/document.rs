//! The JSON results document and the CSV files derived from it.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use costbench_core::approaches::ApproachSpec;
use costbench_core::dataset::{Dataset, Violation};
use costbench_core::runner::{BenchmarkConfig, CurveRecord, MetricKind, MetricRanking, MetricTable, ModeComparison};
use costbench_core::stats::RankDirection;
use serde::{Deserialize, Serialize};

use crate::dataset_io::Checksums;
use crate::display::round2;
use crate::error::CliError;

/// Everything a run produced. Rendering commands read only this document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsDocument {
    pub provenance: Provenance,
    pub config: BenchmarkConfig,
    pub roster: Vec<ApproachSpec>,
    pub datasets: Vec<DatasetResults>,
    pub aggregations: Vec<Aggregation>,
    pub correlations: Vec<Correlation>,
    /// Analyses that could not be computed, with the reason.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub roster_sha256: String,
    pub min_defective: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductSummary {
    pub product_id: String,
    pub project_id: String,
    pub instances: usize,
    pub defective: usize,
    pub total_loc: u64,
    pub total_defects: u64,
    /// False when the product was left out for having too few defective instances.
    pub included: bool,
}

impl ProductSummary {
    pub fn of(ds: &Dataset, excluded: &[String]) -> Vec<Self> {
        ds.products()
            .iter()
            .map(|p| ProductSummary {
                product_id: p.product_id().to_string(),
                project_id: p.project_id().to_string(),
                instances: p.len(),
                defective: p.defective_count(),
                total_loc: p.total_loc(),
                total_defects: p.instances().iter().map(|i| i.defect_count).sum(),
                included: !excluded.iter().any(|e| e == p.product_id()),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetResults {
    pub name: String,
    pub checksums: Checksums,
    pub products: Vec<ProductSummary>,
    pub violations: Vec<Violation>,
    pub tables: Vec<MetricTable>,
    pub alternate_tables: Vec<MetricTable>,
    pub curves: Vec<CurveRecord>,
    pub rankings: Vec<RankingEntry>,
    pub mode_comparisons: Vec<ModeComparison>,
    pub notes: Vec<String>,
}

impl DatasetResults {
    pub fn ranking(&self, metric: MetricKind) -> Option<&RankingEntry> {
        self.rankings.iter().find(|r| r.ranking.metric == metric)
    }
}

/// A ranking plus the rows printed for it, already rounded for display.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingEntry {
    pub ranking: MetricRanking,
    pub rows: Vec<RankRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub approach: String,
    pub mean_value: f64,
    pub rankscore: f64,
    pub mean_display: String,
    pub rankscore_display: String,
}

impl RankingEntry {
    /// Rows ordered by rankscore, then by mean value (better first), then name.
    pub fn new(ranking: MetricRanking) -> Self {
        let mut rows: Vec<RankRow> = ranking
            .outcome
            .approaches
            .iter()
            .map(|a| {
                let mean_value = ranking.mean_values[a];
                let rankscore = ranking.outcome.rankscores[a];
                RankRow {
                    approach: a.clone(),
                    mean_value,
                    rankscore,
                    mean_display: round2(mean_value),
                    rankscore_display: round2(rankscore),
                }
            })
            .collect();
        let direction = ranking.metric.direction();
        rows.sort_by(|x, y| {
            let by_value = match direction {
                RankDirection::LowerIsBetter => x.mean_value.total_cmp(&y.mean_value),
                RankDirection::HigherIsBetter => y.mean_value.total_cmp(&x.mean_value),
            };
            y.rankscore
                .total_cmp(&x.rankscore)
                .then(by_value)
                .then_with(|| x.approach.cmp(&y.approach))
        });
        RankingEntry { ranking, rows }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregation {
    pub name: String,
    pub datasets: Vec<String>,
    pub metrics: Vec<MetricKind>,
    /// Best first.
    pub scores: Vec<ApproachScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproachScore {
    pub approach: String,
    pub mean_rankscore: f64,
}

impl Aggregation {
    pub fn pairs(&self) -> Vec<(String, f64)> {
        self.scores
            .iter()
            .map(|s| (s.approach.clone(), s.mean_rankscore))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub set_a: String,
    pub set_b: String,
    /// `None` when the correlation is undefined; see `note`.
    pub tau: Option<f64>,
    pub note: Option<String>,
}

impl ResultsDocument {
    pub fn dataset(&self, name: &str) -> Option<&DatasetResults> {
        self.datasets.iter().find(|d| d.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("results document serialises");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Usage(format!("{} is not a results document: {e}", path.display())))
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Long-format CSV of one table: `dataset,approach,product,metric,mode,value`.
/// Undefined cells have an empty value.
pub fn table_csv(table: &MetricTable) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["dataset", "approach", "product", "metric", "mode", "value"])
        .unwrap();
    for (a, row) in table.approaches.iter().zip(&table.values) {
        for (p, v) in table.products.iter().zip(row) {
            w.write_record([
                table.dataset.as_str(),
                a,
                p,
                table.metric.id(),
                table.mode.as_str(),
                &cell(*v),
            ])
            .unwrap();
        }
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// `approach,mean_rank,group_index,rankscore`, best mean rank first; groups count from 0.
pub fn ranking_csv(ranking: &MetricRanking) -> String {
    let o = &ranking.outcome;
    let group_of: BTreeMap<&str, usize> = o
        .groups
        .iter()
        .enumerate()
        .flat_map(|(g, members)| members.iter().map(move |m| (m.as_str(), g)))
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["approach", "mean_rank", "group_index", "rankscore"])
        .unwrap();
    for (a, r) in o.approaches.iter().zip(&o.mean_ranks) {
        w.write_record([
            a.clone(),
            r.to_string(),
            group_of[a.as_str()].to_string(),
            o.rankscores[a].to_string(),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// `effort,defects` points of one curve.
pub fn curve_csv(curve: &CurveRecord) -> String {
    let mut out = String::from("effort,defects\n");
    for p in &curve.points {
        out.push_str(&format!("{},{}\n", p.effort, p.defects));
    }
    out
}

pub fn table_file_name(table: &MetricTable) -> String {
    format!("{}_{}_{}.csv", table.dataset, table.metric.id(), table.mode.as_str())
}

pub fn ranking_file_name(ranking: &MetricRanking) -> String {
    format!("ranking_{}_{}.csv", ranking.dataset, ranking.metric.id())
}
