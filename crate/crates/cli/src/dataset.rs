//! CSV price files: one timestamp column followed by one numeric column per
//! asset, on an evenly spaced time grid.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use cecp::fbm::{stream_rng, FgnGenerator};
use cecp::TimeSeries;
use chrono::{DateTime, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::table::render_float;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimestampFormat {
    /// ISO-8601 date-times, held as Unix seconds.
    Iso8601,
    /// Plain integer index.
    Index,
}

impl TimestampFormat {
    pub fn render(&self, t: i64) -> String {
        match self {
            Self::Index => t.to_string(),
            Self::Iso8601 => DateTime::from_timestamp(t, 0)
                .map(|d| d.format("%Y-%m-%dT%H:%M:%SZ").to_string())
                .unwrap_or_else(|| t.to_string()),
        }
    }
}

/// Parses an ISO-8601 date-time (offset optional, UTC assumed) into Unix seconds.
pub fn parse_iso8601(s: &str) -> Option<i64> {
    if let Ok(d) = DateTime::parse_from_rfc3339(s) {
        return Some(d.timestamp());
    }
    [
        "%Y-%m-%dT%H:%M:%S",
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
    ]
    .iter()
    .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
    .map(|d| d.and_utc().timestamp())
}

fn parse_timestamp(s: &str, format: TimestampFormat) -> Option<i64> {
    match format {
        TimestampFormat::Index => s.parse().ok(),
        TimestampFormat::Iso8601 => parse_iso8601(s),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub timestamp_column: String,
    pub format: TimestampFormat,
    pub timestamps: Vec<i64>,
    /// `(label, values)` in file order.
    pub columns: Vec<(String, Vec<f64>)>,
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Columns to load; all columns when `None`.
    pub assets: Option<Vec<String>>,
    pub forward_fill: bool,
}

/// Forward-filled cells per asset.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub rows: usize,
    pub fills: BTreeMap<String, usize>,
}

impl LoadReport {
    pub fn total_fills(&self) -> usize {
        self.fills.values().sum()
    }
}

pub fn load_dataset(path: &Path, options: &LoadOptions) -> Result<(Dataset, LoadReport)> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_dataset(file, options)
}

fn parse_cell(raw: &str) -> Option<f64> {
    let raw = raw.trim();
    raw.parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn read_dataset<R: Read>(reader: R, options: &LoadOptions) -> Result<(Dataset, LoadReport)> {
    let mut csv = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers: Vec<String> = csv
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers.len() < 2 {
        return Err(CliError::Input(
            "header must name a timestamp column and at least one asset column".into(),
        ));
    }
    let wanted: Vec<(usize, String)> = match &options.assets {
        None => headers.iter().cloned().enumerate().skip(1).collect(),
        Some(assets) => assets
            .iter()
            .map(|a| {
                headers
                    .iter()
                    .skip(1)
                    .position(|h| h == a)
                    .map(|i| (i + 1, a.clone()))
                    .ok_or_else(|| CliError::MissingColumn(a.clone()))
            })
            .collect::<Result<_>>()?,
    };
    if wanted.is_empty() {
        return Err(CliError::Input("no asset columns selected".into()));
    }

    let mut format = None;
    let mut timestamps = Vec::new();
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); wanted.len()];
    let mut report = LoadReport::default();
    for (i, record) in csv.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let stamp = record.get(0).unwrap_or("").trim();
        let fmt = *format.get_or_insert(if stamp.parse::<i64>().is_ok() {
            TimestampFormat::Index
        } else {
            TimestampFormat::Iso8601
        });
        let t = parse_timestamp(stamp, fmt).ok_or_else(|| CliError::Cell {
            row,
            column: headers[0].clone(),
            message: format!("cannot parse timestamp `{stamp}`"),
        })?;
        if let [.., a, b] = timestamps[..] {
            let expected: i64 = b - a;
            if t - b != expected {
                return Err(CliError::IrregularGrid {
                    row,
                    expected,
                    found: t - b,
                });
            }
        } else if let [a] = timestamps[..] {
            if t <= a {
                return Err(CliError::IrregularGrid {
                    row,
                    expected: 1,
                    found: t - a,
                });
            }
        }
        timestamps.push(t);
        for ((col, label), column) in wanted.iter().zip(values.iter_mut()) {
            let raw = record.get(*col).unwrap_or("");
            match parse_cell(raw) {
                Some(v) => column.push(v),
                None => match column.last().copied() {
                    Some(prev) if options.forward_fill => {
                        column.push(prev);
                        *report.fills.entry(label.clone()).or_default() += 1;
                    }
                    _ => {
                        let message = if raw.trim().is_empty() {
                            "missing value".to_string()
                        } else {
                            format!("cannot parse `{}` as a finite number", raw.trim())
                        };
                        let message = if options.forward_fill {
                            format!("{message} with no earlier value to carry forward")
                        } else {
                            message
                        };
                        return Err(CliError::Cell {
                            row,
                            column: label.clone(),
                            message,
                        });
                    }
                },
            }
        }
    }
    if timestamps.is_empty() {
        return Err(CliError::Input("no data rows".into()));
    }
    report.rows = timestamps.len();
    let dataset = Dataset {
        timestamp_column: headers[0].clone(),
        format: format.unwrap_or(TimestampFormat::Index),
        timestamps,
        columns: wanted.into_iter().map(|(_, l)| l).zip(values).collect(),
    };
    Ok((dataset, report))
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.columns.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn series(&self) -> Result<BTreeMap<String, TimeSeries>> {
        self.columns
            .iter()
            .map(|(label, values)| {
                TimeSeries::with_timestamps(values.clone(), self.timestamps.clone())
                    .map(|s| (label.clone(), s))
                    .map_err(|source| CliError::Asset {
                        asset: label.clone(),
                        source,
                    })
            })
            .collect()
    }

    pub fn to_csv_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![self.timestamp_column.as_str()];
        header.extend(self.labels());
        w.write_record(&header)?;
        for (i, &t) in self.timestamps.iter().enumerate() {
            let mut record = vec![self.format.render(t)];
            record.extend(self.columns.iter().map(|(_, v)| render_float(v[i])));
            w.write_record(&record)?;
        }
        w.into_inner()
            .map_err(|e| CliError::Input(format!("csv buffer: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::table::write_file(path, &self.to_csv_bytes()?)
    }
}

/// Parameters of a synthetic fBm price panel.
#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    /// `(label, Hurst exponent)` per asset.
    pub assets: Vec<(String, f64)>,
    pub rows: usize,
    /// Unix seconds of the first row.
    pub start: i64,
    /// Seconds between rows.
    pub interval: i64,
    /// Scale of the log-price path per unit fBm step.
    pub volatility: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Twelve assets, 16 031 five-minute rows, Hurst exponents in [0.5, 0.72].
    pub fn standard(seed: u64) -> Self {
        let labels = [
            "BCH", "BTC", "DASH", "ETC", "ETH", "IOT", "LTC", "NEO", "XEM", "XMR", "XRP", "ZEC",
        ];
        Self {
            assets: labels
                .iter()
                .enumerate()
                .map(|(i, l)| (l.to_string(), 0.5 + 0.02 * i as f64))
                .collect(),
            rows: 16_031,
            start: 1_514_764_800,
            interval: 300,
            volatility: 0.002,
            seed,
        }
    }
}

/// Prices `100 · exp(volatility · B_H(t))`; asset `i` uses random stream `i`.
pub fn synthetic_dataset(spec: &SyntheticSpec) -> Result<Dataset> {
    if spec.interval <= 0 {
        return Err(CliError::Input("interval must be positive".into()));
    }
    let columns = spec
        .assets
        .iter()
        .enumerate()
        .map(|(i, (label, hurst))| {
            let generator = FgnGenerator::new(*hurst, spec.rows)?;
            let mut level = 0.0;
            let prices = generator
                .sample(&mut stream_rng(spec.seed, i as u64))
                .into_iter()
                .map(|x| {
                    level += x;
                    100.0 * (spec.volatility * level).exp()
                })
                .collect();
            Ok((label.clone(), prices))
        })
        .collect::<std::result::Result<_, cecp::Error>>()?;
    Ok(Dataset {
        timestamp_column: "timestamp".into(),
        format: TimestampFormat::Iso8601,
        timestamps: (0..spec.rows as i64)
            .map(|k| spec.start + k * spec.interval)
            .collect(),
        columns,
    })
}

/// Size metrics keyed by asset: the first column is the label, every other
/// column one metric.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTable {
    pub names: Vec<String>,
    pub values: BTreeMap<String, Vec<f64>>,
}

pub fn load_metrics(path: &Path) -> Result<MetricTable> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_metrics(file)
}

pub fn read_metrics<R: Read>(reader: R) -> Result<MetricTable> {
    let mut csv = csv::Reader::from_reader(reader);
    let headers: Vec<String> = csv
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers.len() < 2 {
        return Err(CliError::Input(
            "metric file needs an asset column and at least one metric column".into(),
        ));
    }
    let mut values = BTreeMap::new();
    for (i, record) in csv.records().enumerate() {
        let record = record?;
        let asset = record.get(0).unwrap_or("").trim().to_string();
        let row = headers[1..]
            .iter()
            .enumerate()
            .map(|(j, name)| {
                let raw = record.get(j + 1).unwrap_or("").trim().replace(',', "");
                parse_cell(&raw).ok_or_else(|| CliError::Cell {
                    row: i + 1,
                    column: name.clone(),
                    message: format!("cannot parse `{raw}` as a finite number"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.insert(asset.clone(), row).is_some() {
            return Err(cecp::Error::DuplicateLabel(asset).into());
        }
    }
    Ok(MetricTable {
        names: headers[1..].to_vec(),
        values,
    })
}
