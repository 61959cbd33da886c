//! The CLI subcommands as plain functions returning their standard output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use costbench_core::dataset::{validate_dataset, Dataset, LabelMode, Violation};
use costbench_core::runner::{
    aggregate_rankscores, compare_label_modes, correlate_rankings, plan_experiments, rank_metric, run_benchmark,
    MetricKind,
};

use crate::dataset_io::{load_dataset_with_checksums, sha256_hex, Checksums};
use crate::display::{p_value, round2};
use crate::document::{
    curve_csv, ranking_csv, ranking_file_name, table_csv, table_file_name, Aggregation, ApproachScore, Correlation,
    DatasetResults, ProductSummary, Provenance, RankingEntry, ResultsDocument,
};
use crate::error::{CliError, LoadError};
use crate::manifest::{read_run_manifest, ResolvedRun};

pub const RESULTS_FILE: &str = "results.json";
pub const LOG_FILE: &str = "run.log";

pub const CLASSIFICATION_SET: [MetricKind; 4] = [
    MetricKind::Auc,
    MetricKind::FMeasure,
    MetricKind::GMeasure,
    MetricKind::Mcc,
];

/// Loads every dataset, runs the benchmark and writes the results into the
/// manifest's output directory. Nothing is written unless every dataset loads.
pub fn run(manifest: &Path) -> Result<PathBuf, CliError> {
    let resolved = read_run_manifest(manifest)?;
    let mut loaded = Vec::with_capacity(resolved.datasets.len());
    for path in &resolved.datasets {
        loaded.push(load_dataset_with_checksums(path)?);
    }
    let (doc, log) = build_document(&resolved, loaded)?;
    write_outputs(&resolved.output_dir, &doc, &log)?;
    Ok(resolved.output_dir.join(RESULTS_FILE))
}

/// Runs all analyses on already loaded datasets. Returns the document and the run log.
pub fn build_document(
    run: &ResolvedRun,
    loaded: Vec<(Dataset, Checksums)>,
) -> Result<(ResultsDocument, String), CliError> {
    let cfg = &run.config;
    let mut log = String::new();
    let _ = writeln!(log, "costbench {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        log,
        "config: alpha={} c_ratio={} relb_fraction={} repetitions={} label_mode={} seed={}",
        cfg.alpha,
        cfg.c_ratio,
        cfg.relb_fraction,
        cfg.repetitions,
        cfg.label_mode.as_str(),
        cfg.seed
    );
    let _ = writeln!(
        log,
        "randomized approaches draw an independent stream per (approach, product, repetition)"
    );

    let mut names: Vec<&str> = Vec::new();
    for (ds, _) in &loaded {
        if names.contains(&ds.name()) {
            return Err(CliError::Manifest(format!("dataset `{}` is listed twice", ds.name())));
        }
        names.push(ds.name());
    }

    let mut datasets = Vec::with_capacity(loaded.len());
    for (ds, checksums) in loaded {
        datasets.push(run_dataset(run, ds, checksums, &mut log)?);
    }

    let mut notes = Vec::new();
    let all: Vec<String> = datasets.iter().map(|d| d.name.clone()).collect();
    let mut aggregations = Vec::new();
    for (name, metrics) in [
        ("cost", &MetricKind::COST[..]),
        ("classification", &CLASSIFICATION_SET[..]),
    ] {
        match aggregate(&datasets, &all, metrics) {
            Ok(scores) => aggregations.push(Aggregation {
                name: name.to_string(),
                datasets: all.clone(),
                metrics: metrics.to_vec(),
                scores: scores
                    .into_iter()
                    .map(|(approach, mean_rankscore)| ApproachScore {
                        approach,
                        mean_rankscore,
                    })
                    .collect(),
            }),
            Err(e) => notes.push(format!("aggregation `{name}` skipped: {e}")),
        }
    }
    let mut correlations = Vec::new();
    if let [cost, cls] = &aggregations[..] {
        let (tau, note) = match correlate_rankings(&cost.pairs(), &cls.pairs()) {
            Ok(t) => (Some(t), None),
            Err(e) => (None, Some(e.to_string())),
        };
        correlations.push(Correlation {
            set_a: cost.name.clone(),
            set_b: cls.name.clone(),
            tau,
            note,
        });
    }
    for n in &notes {
        let _ = writeln!(log, "{n}");
    }

    let doc = ResultsDocument {
        provenance: Provenance {
            tool: "costbench".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed: cfg.seed,
            roster_sha256: sha256_hex(&run.roster_bytes),
            min_defective: run.min_defective,
        },
        config: cfg.clone(),
        roster: run.roster.clone(),
        datasets,
        aggregations,
        correlations,
        notes,
    };
    Ok((doc, log))
}

fn run_dataset(
    run: &ResolvedRun,
    ds: Dataset,
    checksums: Checksums,
    log: &mut String,
) -> Result<DatasetResults, CliError> {
    let cfg = &run.config;
    let _ = writeln!(log, "dataset {}:", ds.name());
    for (file, sum) in &checksums {
        let _ = writeln!(log, "  sha256 {sum}  {file}");
    }
    let violations = validate_dataset(&ds, run.min_defective);
    let excluded: Vec<String> = violations
        .iter()
        .filter_map(|v| match v {
            Violation::TooFewDefective { product_id, .. } => Some(product_id.clone()),
            Violation::ZeroSizeInstances { .. } => None,
        })
        .collect();
    for v in &violations {
        let _ = writeln!(log, "  violation: {}", serde_json::to_string(v).unwrap_or_default());
    }
    let products = ProductSummary::of(&ds, &excluded);
    let usable = Dataset::new(
        ds.name(),
        ds.feature_schema().to_vec(),
        ds.products()
            .iter()
            .filter(|p| !excluded.iter().any(|e| e == p.product_id()))
            .cloned()
            .collect(),
    )
    .map_err(LoadError::from)?;
    if usable.products().is_empty() {
        return Err(LoadError::from(costbench_core::Error::Dataset(format!(
            "dataset `{}` has no product with at least {} defective instances",
            ds.name(),
            run.min_defective
        )))
        .into());
    }
    plan_experiments(&usable).map_err(LoadError::from)?;

    let bench = run_benchmark(&usable, &run.roster, cfg)?;
    let mut notes = bench.notes.clone();

    let mut rankings = Vec::new();
    for table in &bench.tables {
        match rank_metric(table, cfg) {
            Ok(r) => rankings.push(RankingEntry::new(r)),
            Err(e) => notes.push(format!("{}/{}: ranking skipped: {e}", ds.name(), table.metric.id())),
        }
    }
    let mut mode_comparisons = Vec::new();
    for metric in MetricKind::COST {
        let (Some(primary), Some(alternate)) = (bench.table(metric), bench.alternate_table(metric)) else {
            continue;
        };
        let (bin, cnt) = if primary.mode == LabelMode::Binary {
            (primary, alternate)
        } else {
            (alternate, primary)
        };
        match compare_label_modes(bin, cnt, cfg) {
            Ok(c) => mode_comparisons.push(c),
            Err(e) => notes.push(format!(
                "{}/{}: label mode comparison skipped: {e}",
                ds.name(),
                metric.id()
            )),
        }
    }
    for n in &notes {
        let _ = writeln!(log, "  {n}");
    }
    Ok(DatasetResults {
        name: ds.name().to_string(),
        checksums,
        products,
        violations,
        tables: bench.tables,
        alternate_tables: bench.alternate_tables,
        curves: bench.curves,
        rankings,
        mode_comparisons,
        notes,
    })
}

/// Mean rankscores over the given datasets and metrics.
pub fn aggregate(
    datasets: &[DatasetResults],
    names: &[String],
    metrics: &[MetricKind],
) -> Result<Vec<(String, f64)>, CliError> {
    let mut outcomes = Vec::new();
    for name in names {
        let ds = datasets
            .iter()
            .find(|d| &d.name == name)
            .ok_or_else(|| CliError::Usage(format!("unknown dataset `{name}`")))?;
        for &m in metrics {
            let entry = ds
                .ranking(m)
                .ok_or_else(|| CliError::Usage(format!("no ranking of {} on `{name}`", m.id())))?;
            outcomes.push(&entry.ranking.outcome);
        }
    }
    Ok(aggregate_rankscores(&outcomes)?)
}

fn write_outputs(dir: &Path, doc: &ResultsDocument, log: &str) -> Result<(), CliError> {
    let io = |what: &str| {
        let what = format!("writing {what} in {}", dir.display());
        move |e| CliError::io(what, e)
    };
    fs::create_dir_all(dir).map_err(io("output directory"))?;
    for ds in &doc.datasets {
        for table in ds.tables.iter().chain(&ds.alternate_tables) {
            fs::write(dir.join(table_file_name(table)), table_csv(table)).map_err(io("metric tables"))?;
        }
        for entry in &ds.rankings {
            fs::write(dir.join(ranking_file_name(&entry.ranking)), ranking_csv(&entry.ranking))
                .map_err(io("rankings"))?;
        }
    }
    fs::write(dir.join(LOG_FILE), log).map_err(io("run log"))?;
    fs::write(dir.join(RESULTS_FILE), doc.to_json()).map_err(io("results"))?;
    Ok(())
}

fn metric_arg(id: &str) -> Result<MetricKind, CliError> {
    MetricKind::from_id(id).ok_or_else(|| {
        let known: Vec<&str> = MetricKind::ALL.iter().map(|m| m.id()).collect();
        CliError::Usage(format!("unknown metric `{id}` (known: {})", known.join(", ")))
    })
}

fn dataset_arg<'a>(doc: &'a ResultsDocument, name: &str) -> Result<&'a DatasetResults, CliError> {
    doc.dataset(name)
        .ok_or_else(|| CliError::Usage(format!("unknown dataset `{name}`")))
}

/// `approach  mean (rankscore)` rows for one metric of one dataset.
pub fn rank(doc: &ResultsDocument, metric: &str, dataset: &str) -> Result<String, CliError> {
    let metric = metric_arg(metric)?;
    let ds = dataset_arg(doc, dataset)?;
    let entry = ds
        .ranking(metric)
        .ok_or_else(|| CliError::Usage(format!("no ranking of {} on `{dataset}`", metric.id())))?;
    let width = entry.rows.iter().map(|r| r.approach.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in &entry.rows {
        let _ = writeln!(
            out,
            "{:<width$}  {} ({})",
            r.approach, r.mean_display, r.rankscore_display
        );
    }
    Ok(out)
}

/// Points of one stored cost-effectiveness curve as CSV.
pub fn curves(doc: &ResultsDocument, approach: &str, product: &str, dataset: Option<&str>) -> Result<String, CliError> {
    let mut found = Vec::new();
    for ds in &doc.datasets {
        if dataset.is_some_and(|d| d != ds.name) {
            continue;
        }
        found.extend(
            ds.curves
                .iter()
                .filter(|c| c.approach == approach && c.product == product),
        );
    }
    match found[..] {
        [one] => Ok(curve_csv(one)),
        [] => Err(CliError::Usage(format!(
            "no curve for approach `{approach}` on product `{product}`"
        ))),
        _ => Err(CliError::Usage(format!(
            "product `{product}` appears in several datasets; pass --dataset"
        ))),
    }
}

/// Binary versus count labels for every cost metric.
pub fn compare_modes(doc: &ResultsDocument) -> Result<String, CliError> {
    let mut rows = vec![[
        "dataset".to_string(),
        "metric".into(),
        "binary".into(),
        "counts".into(),
        "p (d)".into(),
    ]];
    for ds in &doc.datasets {
        for c in &ds.mode_comparisons {
            let mut p = p_value(c.test.p_value);
            if let Some(e) = c.effect {
                p = format!("{p} ({})", round2(e.d));
            }
            rows.push([
                ds.name.clone(),
                c.metric.id().into(),
                round2(c.binary_mean),
                round2(c.counts_mean),
                p,
            ]);
        }
    }
    Ok(columns(&rows))
}

/// Kendall's tau between the mean rankscores of two metric sets.
pub fn correlate(
    doc: &ResultsDocument,
    set_a: &[String],
    set_b: &[String],
    datasets: Option<&[String]>,
) -> Result<String, CliError> {
    let parse = |set: &[String]| -> Result<Vec<MetricKind>, CliError> {
        if set.is_empty() {
            return Err(CliError::Usage("metric set is empty".into()));
        }
        set.iter().map(|m| metric_arg(m)).collect()
    };
    let (a, b) = (parse(set_a)?, parse(set_b)?);
    let names: Vec<String> = match datasets {
        Some(d) => d.to_vec(),
        None => doc.datasets.iter().map(|d| d.name.clone()).collect(),
    };
    let agg_a = aggregate(&doc.datasets, &names, &a)?;
    let agg_b = aggregate(&doc.datasets, &names, &b)?;
    let tau = match correlate_rankings(&agg_a, &agg_b) {
        Ok(t) => round2(t),
        Err(costbench_core::Error::UndefinedMetric(why)) => format!("undefined: {why}"),
        Err(e) => return Err(e.into()),
    };

    let mut rows = vec![["approach".to_string(), "set_a".into(), "set_b".into()]];
    for (name, score) in &agg_a {
        let other = agg_b.iter().find(|(n, _)| n == name).map_or(f64::NAN, |x| x.1);
        rows.push([name.clone(), round2(*score), round2(other)]);
    }
    let mut out = columns(&rows);
    let _ = writeln!(out, "tau {tau}");
    Ok(out)
}

fn columns<const N: usize>(rows: &[[String; N]]) -> String {
    let widths: Vec<usize> = (0..N)
        .map(|j| rows.iter().map(|r| r[j].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}
