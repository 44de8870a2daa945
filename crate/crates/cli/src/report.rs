//! Tabular views of analysis results, and readers for the tables that the
//! `rank`, `anova` and `spearman` subcommands consume.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use cecp::{
    AnovaResult, AssetSummary, BaselineCloud, BoundCurve, CecpPoint, MeanComparison,
    PairwiseComparison, RankingEntry, RollingResult,
};

use crate::dataset::TimestampFormat;
use crate::error::{CliError, Result};
use crate::table::{Cell, Table};

pub const ROLLING_COLUMNS: [&str; 6] = [
    "asset",
    "window_index",
    "start_offset",
    "end_timestamp",
    "entropy",
    "complexity",
];

pub fn rolling_table(results: &[RollingResult], format: TimestampFormat) -> Table {
    let mut t = Table::new(&ROLLING_COLUMNS);
    for r in results {
        for (k, (start, p)) in r.window_starts.iter().zip(&r.points).enumerate() {
            let end = r.end_timestamps.as_ref().map(|ts| format.render(ts[k]));
            t.push(vec![
                r.asset.as_str().into(),
                k.into(),
                (*start).into(),
                end.into(),
                p.entropy.into(),
                p.complexity.into(),
            ]);
        }
    }
    t
}

pub fn summary_table(summaries: &[AssetSummary]) -> Table {
    let mut t = Table::new(&[
        "asset",
        "window_count",
        "mean_entropy",
        "mean_complexity",
        "std_entropy",
        "std_complexity",
    ]);
    for s in summaries {
        t.push(vec![
            s.asset.as_str().into(),
            s.window_count.into(),
            s.mean_entropy.into(),
            s.mean_complexity.into(),
            s.std_entropy.into(),
            s.std_complexity.into(),
        ]);
    }
    t
}

pub fn ranking_table(ranking: &[RankingEntry]) -> Table {
    let mut t = Table::new(&["position", "asset", "distance", "rank", "tied"]);
    for e in ranking {
        t.push(vec![
            e.position.into(),
            e.asset.as_str().into(),
            e.distance.into(),
            e.rank.into(),
            e.tied.into(),
        ]);
    }
    t
}

/// Outcome of an all-asset ANOVA on one quantifier.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupTest {
    Table(AnovaResult),
    InsufficientGroups { groups: usize },
}

pub const INSUFFICIENT_GROUPS: &str = "insufficient groups";

/// Source, SS, df, MS, F, p.
type AnovaRow = (
    &'static str,
    f64,
    usize,
    Option<f64>,
    Option<f64>,
    Option<f64>,
);

/// ANOVA tables in between / within / total layout.
pub fn anova_table(tests: &[(&str, &GroupTest)], overlapping: bool) -> Table {
    let mut t = Table::new(&[
        "quantifier",
        "source",
        "ss",
        "df",
        "ms",
        "f",
        "p_value",
        "status",
        "overlapping_windows",
    ]);
    for (quantifier, test) in tests {
        match test {
            GroupTest::Table(a) => {
                let status = if a.degenerate { "degenerate" } else { "ok" };
                let rows: [AnovaRow; 3] = [
                    (
                        "between",
                        a.ss_between,
                        a.df_between,
                        Some(a.ms_between),
                        Some(a.f_stat),
                        Some(a.p_value),
                    ),
                    (
                        "within",
                        a.ss_within,
                        a.df_within,
                        Some(a.ms_within),
                        None,
                        None,
                    ),
                    ("total", a.ss_total, a.df_total, None, None, None),
                ];
                for (source, ss, df, ms, f, p) in rows {
                    t.push(vec![
                        (*quantifier).into(),
                        source.into(),
                        ss.into(),
                        df.into(),
                        ms.into(),
                        f.into(),
                        p.into(),
                        status.into(),
                        overlapping.into(),
                    ]);
                }
            }
            GroupTest::InsufficientGroups { groups } => t.push(vec![
                (*quantifier).into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                format!("{INSUFFICIENT_GROUPS} ({groups} asset)").into(),
                overlapping.into(),
            ]),
        }
    }
    t
}

pub const PAIRWISE_COLUMNS: [&str; 14] = [
    "quantifier",
    "asset",
    "baseline",
    "mean_difference",
    "std_error",
    "ci95_low",
    "ci95_high",
    "ci99_low",
    "ci99_high",
    "f",
    "p_value",
    "significant_5pct",
    "significant_1pct",
    "overlapping_windows",
];

fn comparison_row(
    quantifier: &str,
    c: &PairwiseComparison,
    m: &MeanComparison,
    overlapping: bool,
) -> Vec<Cell> {
    vec![
        quantifier.into(),
        c.asset.as_str().into(),
        c.baseline.as_str().into(),
        m.mean_difference.into(),
        m.std_error.into(),
        m.ci95[0].into(),
        m.ci95[1].into(),
        m.ci99[0].into(),
        m.ci99[1].into(),
        m.anova.f_stat.into(),
        m.anova.p_value.into(),
        m.significant_5pct.into(),
        m.significant_1pct.into(),
        overlapping.into(),
    ]
}

/// Entropy rows first, then complexity rows, each ordered by asset.
pub fn pairwise_table(pairs: &[PairwiseComparison], overlapping: bool) -> Table {
    let mut t = Table::new(&PAIRWISE_COLUMNS);
    for c in pairs {
        t.push(comparison_row("entropy", c, &c.entropy, overlapping));
    }
    for c in pairs {
        t.push(comparison_row("complexity", c, &c.complexity, overlapping));
    }
    t
}

/// Spearman correlation of the efficiency distance with one size metric.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricCorrelation {
    pub metric: String,
    pub result: cecp::SpearmanResult,
}

pub fn spearman_table(rows: &[MetricCorrelation]) -> Table {
    let mut t = Table::new(&["metric", "n", "rho", "p_value"]);
    for r in rows {
        t.push(vec![
            r.metric.as_str().into(),
            r.result.n.into(),
            r.result.rho.into(),
            r.result.p_value.into(),
        ]);
    }
    t
}

/// Both envelopes sampled on the grid `H = k / resolution`.
pub fn bounds_table(lower: &BoundCurve, upper: &BoundCurve, resolution: usize) -> Result<Table> {
    let mut t = Table::new(&["H", "C_lower", "C_upper"]);
    for k in 0..=resolution {
        let h = k as f64 / resolution as f64;
        t.push(vec![
            h.into(),
            lower.interpolate(h)?.into(),
            upper.interpolate(h)?.into(),
        ]);
    }
    Ok(t)
}

pub fn cloud_table(clouds: &[BaselineCloud]) -> Table {
    let mut t = Table::new(&[
        "hurst",
        "sims",
        "mean_entropy",
        "mean_complexity",
        "std_entropy",
        "std_complexity",
    ]);
    for c in clouds {
        t.push(vec![
            c.hurst.into(),
            c.sims.into(),
            c.mean_point.entropy.into(),
            c.mean_point.complexity.into(),
            c.std_entropy.into(),
            c.std_complexity.into(),
        ]);
    }
    t
}

/// Window points per asset, read back from a rolling table.
pub type WindowPoints = BTreeMap<String, Vec<CecpPoint>>;

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| CliError::MissingColumn(name.to_string()))
}

fn number<T: std::str::FromStr>(
    record: &csv::StringRecord,
    col: usize,
    row: usize,
    name: &str,
) -> Result<T> {
    let raw = record.get(col).unwrap_or("").trim();
    raw.parse().map_err(|_| CliError::Cell {
        row,
        column: name.to_string(),
        message: format!("cannot parse `{raw}`"),
    })
}

pub fn read_rolling<R: Read>(reader: R) -> Result<WindowPoints> {
    let mut csv = csv::Reader::from_reader(reader);
    let headers = csv.headers()?.clone();
    let cols: Vec<usize> = ["asset", "window_index", "entropy", "complexity"]
        .iter()
        .map(|n| column_index(&headers, n))
        .collect::<Result<_>>()?;
    let mut indexed: BTreeMap<String, Vec<(usize, CecpPoint)>> = BTreeMap::new();
    for (i, record) in csv.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let asset = record.get(cols[0]).unwrap_or("").trim().to_string();
        let k: usize = number(&record, cols[1], row, "window_index")?;
        let point = CecpPoint {
            entropy: number(&record, cols[2], row, "entropy")?,
            complexity: number(&record, cols[3], row, "complexity")?,
        };
        indexed.entry(asset).or_default().push((k, point));
    }
    if indexed.is_empty() {
        return Err(CliError::Input("rolling table has no rows".into()));
    }
    Ok(indexed
        .into_iter()
        .map(|(asset, mut pts)| {
            pts.sort_by_key(|(k, _)| *k);
            (asset, pts.into_iter().map(|(_, p)| p).collect())
        })
        .collect())
}

/// `(asset, distance)` pairs from a ranking table.
pub fn read_distances<R: Read>(reader: R) -> Result<Vec<(String, f64)>> {
    let mut csv = csv::Reader::from_reader(reader);
    let headers = csv.headers()?.clone();
    let asset = column_index(&headers, "asset")?;
    let distance = column_index(&headers, "distance")?;
    csv.records()
        .enumerate()
        .map(|(i, record)| {
            let record = record?;
            Ok((
                record.get(asset).unwrap_or("").trim().to_string(),
                number(&record, distance, i + 1, "distance")?,
            ))
        })
        .collect()
}

pub fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| CliError::io(path, e))
}

/// Whether a CSV header carries the rolling schema (as opposed to a ranking).
pub fn is_rolling_table(path: &Path) -> Result<bool> {
    let mut csv = csv::Reader::from_reader(open(path)?);
    Ok(csv.headers()?.iter().any(|h| h.trim() == "window_index"))
}
