//! Tidy CSV files holding the marks of each standard figure, one row per
//! mark. Values are copied from the bundle unchanged.
//!
//! | kind | columns |
//! |------|---------|
//! | `entropy-evolution` | asset, window_index, end_timestamp, H |
//! | `cecp-scatter` | asset, window_index, H, C |
//! | `cecp-means` | asset, mean_H, mean_C, std_H, std_C |
//! | `anova-intervals` | quantifier, asset, baseline, mean_diff, ci95_low, ci95_high, ci99_low, ci99_high, p_value, significant_5pct, significant_1pct |

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;

use crate::error::{CliError, Result};
use crate::pipeline::Bundle;
use crate::table::{OutputFormat, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    EntropyEvolution,
    CecpScatter,
    CecpMeans,
    AnovaIntervals,
}

impl PlotKind {
    pub const ALL: [PlotKind; 4] = [
        Self::EntropyEvolution,
        Self::CecpScatter,
        Self::CecpMeans,
        Self::AnovaIntervals,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::EntropyEvolution => "entropy-evolution",
            Self::CecpScatter => "cecp-scatter",
            Self::CecpMeans => "cecp-means",
            Self::AnovaIntervals => "anova-intervals",
        }
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name())
    }
}

impl FromStr for PlotKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| CliError::Input(format!("unknown plot kind `{s}`")))
    }
}

pub fn plot_table(bundle: &Bundle, kind: PlotKind) -> Result<Table> {
    let mut t;
    match kind {
        PlotKind::EntropyEvolution => {
            t = Table::new(&["asset", "window_index", "end_timestamp", "H"]);
            for r in &bundle.rolling {
                for (k, p) in r.points.iter().enumerate() {
                    let end = r
                        .end_timestamps
                        .as_ref()
                        .map(|ts| bundle.timestamp_format.render(ts[k]));
                    t.push(vec![
                        r.asset.as_str().into(),
                        k.into(),
                        end.into(),
                        p.entropy.into(),
                    ]);
                }
            }
        }
        PlotKind::CecpScatter => {
            t = Table::new(&["asset", "window_index", "H", "C"]);
            for r in &bundle.rolling {
                for (k, p) in r.points.iter().enumerate() {
                    t.push(vec![
                        r.asset.as_str().into(),
                        k.into(),
                        p.entropy.into(),
                        p.complexity.into(),
                    ]);
                }
            }
        }
        PlotKind::CecpMeans => {
            t = Table::new(&["asset", "mean_H", "mean_C", "std_H", "std_C"]);
            for s in &bundle.summaries {
                t.push(vec![
                    s.asset.as_str().into(),
                    s.mean_entropy.into(),
                    s.mean_complexity.into(),
                    s.std_entropy.into(),
                    s.std_complexity.into(),
                ]);
            }
        }
        PlotKind::AnovaIntervals => {
            let pairs = bundle.pairwise.as_ref().ok_or_else(|| {
                CliError::MissingPrerequisite(
                    "anova-intervals needs a pairwise comparison (set a baseline asset)".into(),
                )
            })?;
            t = Table::new(&[
                "quantifier",
                "asset",
                "baseline",
                "mean_diff",
                "ci95_low",
                "ci95_high",
                "ci99_low",
                "ci99_high",
                "p_value",
                "significant_5pct",
                "significant_1pct",
            ]);
            for (quantifier, pick) in [("entropy", true), ("complexity", false)] {
                for c in pairs {
                    let m = if pick { &c.entropy } else { &c.complexity };
                    t.push(vec![
                        quantifier.into(),
                        c.asset.as_str().into(),
                        c.baseline.as_str().into(),
                        m.mean_difference.into(),
                        m.ci95[0].into(),
                        m.ci95[1].into(),
                        m.ci99[0].into(),
                        m.ci99[1].into(),
                        m.anova.p_value.into(),
                        m.significant_5pct.into(),
                        m.significant_1pct.into(),
                    ]);
                }
            }
        }
    }
    Ok(t)
}

/// Writes `<dir>/<kind>.csv` and returns its path.
pub fn emit_plot_data(bundle: &Bundle, kind: PlotKind, dir: &Path) -> Result<PathBuf> {
    plot_table(bundle, kind)?.write_to(dir, kind.name(), OutputFormat::Csv)
}
