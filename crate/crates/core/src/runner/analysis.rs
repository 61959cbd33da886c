use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{BenchmarkConfig, MetricKind, MetricTable};
use crate::dataset::LabelMode;
use crate::math::mean;
use crate::stats::{
    build_groups, cohens_d, friedman, kendall_tau, levene_median, mann_whitney_u, nemenyi_cd, rankscore, shapiro_wilk,
    EffectSize, RankingOutcome, StatTestResult,
};
use crate::{Error, Result};

/// Binary labels versus defect counts for one metric of one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeComparison {
    pub dataset: String,
    pub metric: MetricKind,
    pub binary_mean: f64,
    pub counts_mean: f64,
    pub test: StatTestResult,
    pub significant: bool,
    /// Counts relative to binary; only reported when significant.
    pub effect: Option<EffectSize>,
    pub levene: Option<StatTestResult>,
    pub homoscedastic: Option<bool>,
}

/// Mann-Whitney U over the per-approach means under both label modes; Levene
/// and Cohen's d follow when the difference is significant.
pub fn compare_label_modes(
    table_bin: &MetricTable,
    table_cnt: &MetricTable,
    cfg: &BenchmarkConfig,
) -> Result<ModeComparison> {
    if !table_bin.same_shape(table_cnt) {
        return Err(Error::input("label mode tables differ in dataset, metric or shape"));
    }
    if table_bin.mode != LabelMode::Binary || table_cnt.mode != LabelMode::DefectCounts {
        return Err(Error::input("expected one binary and one defect-count table"));
    }
    let (mut bin, mut cnt) = (Vec::new(), Vec::new());
    for name in &table_bin.approaches {
        if let (Some(b), Some(c)) = (table_bin.approach_mean(name), table_cnt.approach_mean(name)) {
            bin.push(b);
            cnt.push(c);
        }
    }
    if bin.is_empty() {
        return Err(Error::input("no approach has defined values under both label modes"));
    }
    let test = mann_whitney_u(&bin, &cnt)?;
    let threshold = cfg.significance();
    let significant = test.significant(threshold);
    let (levene, effect) = if significant {
        (levene_median(&[&cnt, &bin]).ok(), cohens_d(&cnt, &bin).ok())
    } else {
        (None, None)
    };
    Ok(ModeComparison {
        dataset: table_bin.dataset.clone(),
        metric: table_bin.metric,
        binary_mean: mean(&bin),
        counts_mean: mean(&cnt),
        test,
        significant,
        effect,
        homoscedastic: levene.map(|l| !l.significant(threshold)),
        levene,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnDiagnostic {
    pub approach: String,
    pub shapiro_wilk: Option<StatTestResult>,
}

/// Ranking of one metric table plus the values it was computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRanking {
    pub dataset: String,
    pub metric: MetricKind,
    pub mode: LabelMode,
    pub outcome: RankingOutcome,
    /// Mean over the products used for ranking.
    pub mean_values: BTreeMap<String, f64>,
    pub products_used: Vec<String>,
    /// Products with an undefined cell for at least one approach.
    pub products_dropped: Vec<String>,
    pub diagnostics: Vec<ColumnDiagnostic>,
    pub levene: Option<StatTestResult>,
}

/// Friedman test, Nemenyi critical distance, grouping and rankscores.
///
/// Only products where every approach is defined take part. Without a
/// significant Friedman result all approaches share one group; a lone
/// approach trivially ranks first with rankscore 1.
pub fn rank_metric(table: &MetricTable, cfg: &BenchmarkConfig) -> Result<MetricRanking> {
    let k = table.approaches.len();
    if k == 0 {
        return Err(Error::input("metric table has no approaches"));
    }
    let (used, dropped): (Vec<usize>, Vec<usize>) =
        (0..table.products.len()).partition(|&p| table.values.iter().all(|row| row[p].is_some()));
    if used.is_empty() {
        return Err(Error::input(format!(
            "{} on {}: no product is defined for every approach",
            table.metric.id(),
            table.dataset
        )));
    }
    let columns: Vec<Vec<f64>> = table
        .values
        .iter()
        .map(|row| used.iter().map(|&p| row[p].unwrap_or(f64::NAN)).collect())
        .collect();
    let mean_values = table
        .approaches
        .iter()
        .cloned()
        .zip(columns.iter().map(|c| mean(c)))
        .collect();
    let diagnostics = table
        .approaches
        .iter()
        .zip(&columns)
        .map(|(name, col)| ColumnDiagnostic {
            approach: name.clone(),
            shapiro_wilk: shapiro_wilk(col).ok(),
        })
        .collect();
    let column_refs: Vec<&[f64]> = columns.iter().map(Vec::as_slice).collect();
    let levene = if k >= 2 { levene_median(&column_refs).ok() } else { None };

    let outcome = if k == 1 {
        let name = table.approaches[0].clone();
        RankingOutcome {
            approaches: vec![name.clone()],
            mean_ranks: vec![1.0],
            critical_distance: None,
            groups: vec![vec![name.clone()]],
            rankscores: [(name, 1.0)].into_iter().collect(),
            significant: false,
            friedman: None,
        }
    } else {
        rank_columns(table, &columns, cfg)?
    };
    let names = |idx: &[usize]| idx.iter().map(|&p| table.products[p].clone()).collect();
    Ok(MetricRanking {
        dataset: table.dataset.clone(),
        metric: table.metric,
        mode: table.mode,
        outcome,
        mean_values,
        products_used: names(&used),
        products_dropped: names(&dropped),
        diagnostics,
        levene,
    })
}

fn rank_columns(table: &MetricTable, columns: &[Vec<f64>], cfg: &BenchmarkConfig) -> Result<RankingOutcome> {
    let (k, n) = (columns.len(), columns[0].len());
    let matrix: Vec<Vec<f64>> = (0..n).map(|p| columns.iter().map(|c| c[p]).collect()).collect();
    let fr = friedman(&matrix, table.metric.direction())?;
    let threshold = cfg.significance();
    let cd = nemenyi_cd(k, n, threshold)?;
    let significant = fr.test.significant(threshold);

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| fr.mean_ranks[a].total_cmp(&fr.mean_ranks[b]).then(a.cmp(&b)));
    let groups = if significant {
        build_groups(&fr.mean_ranks, cd, columns)?
    } else {
        vec![order.clone()]
    };
    let named: Vec<Vec<String>> = groups
        .iter()
        .map(|g| g.iter().map(|&a| table.approaches[a].clone()).collect())
        .collect();
    Ok(RankingOutcome {
        approaches: order.iter().map(|&a| table.approaches[a].clone()).collect(),
        mean_ranks: order.iter().map(|&a| fr.mean_ranks[a]).collect(),
        critical_distance: Some(cd),
        rankscores: rankscore(&named)?,
        groups: named,
        significant,
        friedman: Some(fr.test),
    })
}

/// Mean rankscore per approach, best first (ties by name).
pub fn aggregate_rankscores(outcomes: &[&RankingOutcome]) -> Result<Vec<(String, f64)>> {
    let first = outcomes.first().ok_or_else(|| Error::input("nothing to aggregate"))?;
    let mut sums: BTreeMap<String, f64> = first.rankscores.keys().map(|k| (k.clone(), 0.0)).collect();
    for o in outcomes {
        if o.rankscores.len() != sums.len() || o.rankscores.keys().any(|k| !sums.contains_key(k)) {
            return Err(Error::input("rankings cover different approaches"));
        }
        for (k, v) in &o.rankscores {
            *sums.get_mut(k).unwrap() += v;
        }
    }
    let n = outcomes.len() as f64;
    let mut out: Vec<(String, f64)> = sums.into_iter().map(|(k, v)| (k, v / n)).collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(out)
}

/// Kendall's tau-b between two aggregated rankings over the same approaches.
pub fn correlate_rankings(a: &[(String, f64)], b: &[(String, f64)]) -> Result<f64> {
    let a: BTreeMap<&str, f64> = a.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let b: BTreeMap<&str, f64> = b.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    if a.len() != b.len() || a.keys().any(|k| !b.contains_key(k)) {
        return Err(Error::input("rankings cover different approaches"));
    }
    let xs: Vec<f64> = a.values().copied().collect();
    let ys: Vec<f64> = a.keys().map(|k| b[k]).collect();
    kendall_tau(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn table(metric: MetricKind, mode: LabelMode, rows: &[(&str, Vec<Option<f64>>)]) -> MetricTable {
        let n = rows[0].1.len();
        MetricTable {
            dataset: "d".into(),
            metric,
            mode,
            approaches: rows.iter().map(|r| r.0.to_string()).collect(),
            products: (0..n).map(|p| format!("p{p}")).collect(),
            values: rows.iter().map(|r| r.1.clone()).collect(),
        }
    }

    fn wobble(base: f64, n: usize) -> Vec<Option<f64>> {
        (0..n).map(|i| Some(base + 0.01 * ((i * 7) % 5) as f64)).collect()
    }

    #[test]
    fn dominant_approach_ranks_alone() {
        let t = table(
            MetricKind::Necm,
            LabelMode::DefectCounts,
            &[("C", wobble(0.9, 20)), ("A", wobble(0.1, 20)), ("B", wobble(0.5, 20))],
        );
        let r = rank_metric(&t, &BenchmarkConfig::default()).unwrap();
        let o = &r.outcome;
        assert!(o.significant);
        assert_eq!(o.approaches, vec!["A", "B", "C"]);
        assert_eq!(o.mean_ranks, vec![1.0, 2.0, 3.0]);
        assert_eq!(o.groups, vec![vec!["A"], vec!["B"], vec!["C"]]);
        assert_eq!(o.rankscores["A"], 1.0);
        assert_eq!(o.rankscores["B"], 0.5);
        assert_eq!(o.rankscores["C"], 0.0);
        // offsets cycle through 0, 2, 4, 1, 3 hundredths
        assert!((r.mean_values["A"] - 0.12).abs() < 1e-12);

        // flipping the direction flips the order
        let mut hi = t.clone();
        hi.metric = MetricKind::Aucec;
        let r = rank_metric(&hi, &BenchmarkConfig::default()).unwrap();
        assert_eq!(r.outcome.approaches, vec!["C", "B", "A"]);
    }

    #[test]
    fn identical_columns_share_one_group() {
        let t = table(
            MetricKind::Relb,
            LabelMode::DefectCounts,
            &[("A", wobble(0.3, 8)), ("B", wobble(0.3, 8)), ("C", wobble(0.3, 8))],
        );
        let r = rank_metric(&t, &BenchmarkConfig::default()).unwrap();
        assert!(!r.outcome.significant);
        assert_eq!(r.outcome.groups.len(), 1);
        assert!(r.outcome.rankscores.values().all(|&s| s == 1.0));
    }

    #[test]
    fn undefined_products_are_dropped() {
        let mut b = wobble(0.5, 6);
        b[2] = None;
        let t = table(MetricKind::Mcc, LabelMode::Binary, &[("A", wobble(0.1, 6)), ("B", b)]);
        let r = rank_metric(&t, &BenchmarkConfig::default()).unwrap();
        assert_eq!(r.products_dropped, vec!["p2"]);
        assert_eq!(r.products_used.len(), 5);

        let none = table(
            MetricKind::Mcc,
            LabelMode::Binary,
            &[("A", vec![None, Some(1.0)]), ("B", vec![Some(1.0), None])],
        );
        assert!(rank_metric(&none, &BenchmarkConfig::default()).is_err());
    }

    #[test]
    fn single_approach_is_trivially_first() {
        let t = table(MetricKind::Necm, LabelMode::DefectCounts, &[("FIX", wobble(0.7, 5))]);
        let r = rank_metric(&t, &BenchmarkConfig::default()).unwrap();
        assert_eq!(r.outcome.rankscores["FIX"], 1.0);
        assert_eq!(r.outcome.groups, vec![vec!["FIX"]]);
        assert!(r.outcome.friedman.is_none());
    }

    #[test]
    fn mode_comparison() {
        let rows: Vec<(String, Vec<Option<f64>>)> = (0..12)
            .map(|a| (format!("a{a}"), wobble(1.0 + 0.05 * a as f64, 4)))
            .collect();
        let refs: Vec<(&str, Vec<Option<f64>>)> = rows.iter().map(|(n, v)| (n.as_str(), v.clone())).collect();
        let bin = table(MetricKind::Necm, LabelMode::Binary, &refs);
        let mut cnt = bin.clone();
        cnt.mode = LabelMode::DefectCounts;
        let cfg = BenchmarkConfig::default();

        let same = compare_label_modes(&bin, &cnt, &cfg).unwrap();
        assert!(same.test.p_value >= 0.9);
        assert!(!same.significant && same.effect.is_none() && same.homoscedastic.is_none());

        for row in &mut cnt.values {
            row.iter_mut().for_each(|v| *v = v.map(|x| x + 3.0));
        }
        let shifted = compare_label_modes(&bin, &cnt, &cfg).unwrap();
        assert!(shifted.significant);
        assert!(shifted.effect.unwrap().d > 0.8);
        assert_eq!(shifted.homoscedastic, Some(true));
        assert!((shifted.counts_mean - shifted.binary_mean - 3.0).abs() < 1e-12);

        assert!(compare_label_modes(&cnt, &bin, &cfg).is_err());
        let mut other = cnt.clone();
        other.products.pop();
        assert!(compare_label_modes(&bin, &other, &cfg).is_err());
    }

    fn outcome(scores: &[(&str, f64)]) -> RankingOutcome {
        RankingOutcome {
            approaches: scores.iter().map(|s| s.0.to_string()).collect(),
            mean_ranks: vec![1.0; scores.len()],
            critical_distance: None,
            groups: vec![],
            rankscores: scores.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            significant: true,
            friedman: None,
        }
    }

    #[test]
    fn aggregation() {
        let fix = [1.0, 1.0, 1.0, 1.0, 1.0, 0.96];
        let outs: Vec<RankingOutcome> = fix.iter().map(|&f| outcome(&[("FIX", f), ("RANDOM", 0.0)])).collect();
        let refs: Vec<&RankingOutcome> = outs.iter().collect();
        let agg = aggregate_rankscores(&refs).unwrap();
        assert_eq!(agg[0].0, "FIX");
        assert!((agg[0].1 - 5.96 / 6.0).abs() < 1e-12);
        assert!((agg[0].1 - 0.993).abs() < 5e-4);

        let single = outcome(&[("b", 0.5), ("a", 1.0)]);
        assert_eq!(
            aggregate_rankscores(&[&single]).unwrap(),
            vec![("a".to_string(), 1.0), ("b".to_string(), 0.5)]
        );

        let other = outcome(&[("a", 1.0), ("c", 0.5)]);
        assert!(aggregate_rankscores(&[&single, &other]).is_err());
        assert!(aggregate_rankscores(&[]).is_err());
    }

    #[test]
    fn correlation() {
        let a: Vec<(String, f64)> = [("w", 1.0), ("x", 0.8), ("y", 0.5), ("z", 0.1)]
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        assert_eq!(correlate_rankings(&a, &a).unwrap(), 1.0);
        let rev: Vec<(String, f64)> = a.iter().map(|(k, v)| (k.clone(), -v)).collect();
        assert_eq!(correlate_rankings(&a, &rev).unwrap(), -1.0);
        let mut swap = a.clone();
        swap[2].1 = 0.05;
        assert!((correlate_rankings(&a, &swap).unwrap() - 4.0 / 6.0).abs() < 1e-12);
        assert!(correlate_rankings(&a, &a[..3]).is_err());
    }
}
