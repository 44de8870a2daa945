//! End-to-end analysis run: load, compute, write, record a manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use cecp::{
    baseline_cloud, lower_bound_curve, one_way_anova, pairwise_anova_vs_baseline, rank_assets,
    rolling_quantifiers, spearman_rho, summarize, AssetSummary, BaselineCloud, BoundCurve,
    OrdinalConfig, PairwiseComparison, RankingEntry, RollingResult, TimeSeries, WindowParams,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::{
    load_dataset, load_metrics, LoadOptions, LoadReport, MetricTable, TimestampFormat,
};
use crate::error::{CliError, Result};
use crate::plot::{emit_plot_data, PlotKind};
use crate::report::{
    anova_table, bounds_table, cloud_table, pairwise_table, ranking_table, rolling_table,
    spearman_table, summary_table, GroupTest, MetricCorrelation,
};
use crate::table::{write_file, OutputFormat};

pub const TOOL_NAME: &str = "cecp";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: PathBuf,
    /// Asset columns to analyse; every column when `None`.
    pub assets: Option<Vec<String>>,
    pub dim: usize,
    pub tau: usize,
    pub window: usize,
    pub step: usize,
    pub log_returns: bool,
    pub forward_fill: bool,
    /// Reference asset for the pairwise ANOVA.
    pub baseline: Option<String>,
    /// CSV of size metrics for the Spearman correlations.
    pub metrics: Option<PathBuf>,
    /// Hurst exponents of the fBm reference clouds; none when empty.
    pub hurst: Vec<f64>,
    pub sims: usize,
    pub fbm_length: usize,
    pub seed: u64,
    /// Grid size of the emitted bound curves.
    pub resolution: usize,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: PathBuf::new(),
            assets: None,
            dim: 4,
            tau: 1,
            window: 360,
            step: 60,
            log_returns: false,
            forward_fill: false,
            baseline: None,
            metrics: None,
            hurst: Vec::new(),
            sims: 500,
            fbm_length: 360,
            seed: 42,
            resolution: 2000,
            format: OutputFormat::Csv,
        }
    }
}

impl RunConfig {
    pub fn ordinal(&self) -> Result<OrdinalConfig> {
        Ok(OrdinalConfig::new(self.dim, self.tau)?)
    }

    pub fn window_params(&self) -> Result<WindowParams> {
        Ok(WindowParams::new(self.window, self.step)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.window_params()?.check_config(&self.ordinal()?)?;
        if self.resolution < 1 {
            return Err(CliError::Input("resolution must be at least 1".into()));
        }
        if !self.hurst.is_empty() {
            if self.sims < 1 {
                return Err(CliError::Input("sims must be at least 1".into()));
            }
            for &h in &self.hurst {
                cecp::FbmSpec::new(h, self.fbm_length, self.seed)?;
            }
            self.ordinal()?.sample_count(self.fbm_length)?;
        }
        Ok(())
    }
}

/// Everything a run computes, before serialization.
#[derive(Debug, Clone)]
pub struct Bundle {
    pub timestamp_format: TimestampFormat,
    pub rolling: Vec<RollingResult>,
    pub summaries: Vec<AssetSummary>,
    pub ranking: Vec<RankingEntry>,
    pub anova_entropy: GroupTest,
    pub anova_complexity: GroupTest,
    pub pairwise: Option<Vec<PairwiseComparison>>,
    pub spearman: Vec<MetricCorrelation>,
    pub lower: BoundCurve,
    pub upper: BoundCurve,
    pub resolution: usize,
    pub clouds: Vec<BaselineCloud>,
    /// Windows share observations, so window-level tests are not independent.
    pub overlapping_windows: bool,
}

impl Bundle {
    pub fn caveats(&self) -> Vec<String> {
        let mut notes = Vec::new();
        if self.overlapping_windows {
            notes.push(
                "windows overlap: window-level ANOVA samples are serially dependent, so \
                 p-values are optimistic"
                    .to_string(),
            );
        }
        if self.pairwise.is_some() {
            notes.push("pairwise ANOVA p-values carry no multiple-comparison correction".into());
        }
        notes
    }
}

fn group_test(groups: &[Vec<f64>]) -> Result<GroupTest> {
    if groups.len() < 2 {
        return Ok(GroupTest::InsufficientGroups {
            groups: groups.len(),
        });
    }
    Ok(GroupTest::Table(one_way_anova(groups)?))
}

/// Spearman correlation of each metric with the efficiency distance over
/// the assets present in both.
pub fn metric_correlations(
    distances: &[(String, f64)],
    metrics: &MetricTable,
) -> Result<Vec<MetricCorrelation>> {
    let matched: Vec<(f64, &Vec<f64>)> = distances
        .iter()
        .filter_map(|(a, d)| metrics.values.get(a).map(|m| (*d, m)))
        .collect();
    metrics
        .names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let x: Vec<f64> = matched.iter().map(|(d, _)| *d).collect();
            let y: Vec<f64> = matched.iter().map(|(_, m)| m[j]).collect();
            Ok(MetricCorrelation {
                metric: name.clone(),
                result: spearman_rho(&x, &y)?,
            })
        })
        .collect()
}

pub fn run_pipeline(
    config: &RunConfig,
    data: &BTreeMap<String, TimeSeries>,
    timestamp_format: TimestampFormat,
    metrics: Option<&MetricTable>,
) -> Result<Bundle> {
    config.validate()?;
    let ordinal = config.ordinal()?;
    let params = config.window_params()?;
    if data.is_empty() {
        return Err(CliError::Input("no assets to analyse".into()));
    }

    let rolling: Vec<RollingResult> = data
        .par_iter()
        .map(|(asset, series)| {
            let with_context = |source| CliError::Asset {
                asset: asset.clone(),
                source,
            };
            let series = if config.log_returns {
                series.log_returns().map_err(with_context)?
            } else {
                series.clone()
            };
            rolling_quantifiers(asset, &series, &params, &ordinal).map_err(with_context)
        })
        .collect::<Result<_>>()?;
    let summaries = rolling
        .iter()
        .map(summarize)
        .collect::<cecp::Result<Vec<_>>>()?;
    let ranking = rank_assets(&summaries)?;

    let entropies: Vec<Vec<f64>> = rolling.iter().map(RollingResult::entropies).collect();
    let complexities: Vec<Vec<f64>> = rolling.iter().map(RollingResult::complexities).collect();
    let anova_entropy = group_test(&entropies)?;
    let anova_complexity = group_test(&complexities)?;

    let pairwise = config
        .baseline
        .as_deref()
        .map(|b| pairwise_anova_vs_baseline(&rolling, b))
        .transpose()?;

    let spearman = match metrics {
        Some(m) => {
            let distances: Vec<(String, f64)> = ranking
                .iter()
                .map(|e| (e.asset.clone(), e.distance))
                .collect();
            metric_correlations(&distances, m)?
        }
        None => Vec::new(),
    };

    let states = ordinal.pattern_count();
    let lower = lower_bound_curve(states, config.resolution)?;
    let upper = cecp::upper_bound_curve(states, config.resolution)?;

    let clouds = config
        .hurst
        .iter()
        .map(|&h| baseline_cloud(h, config.sims, config.fbm_length, &ordinal, config.seed))
        .collect::<cecp::Result<Vec<_>>>()?;

    Ok(Bundle {
        timestamp_format,
        rolling,
        summaries,
        ranking,
        anova_entropy,
        anova_complexity,
        pairwise,
        spearman,
        lower,
        upper,
        resolution: config.resolution,
        clouds,
        overlapping_windows: params.overlapping(),
    })
}

/// Provenance record written next to the outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub seed: u64,
    pub input_sha256: String,
    pub metrics_sha256: Option<String>,
    pub rows: usize,
    pub forward_fills: BTreeMap<String, usize>,
    pub caveats: Vec<String>,
    /// Output file (relative to the output directory) to its SHA-256.
    pub outputs: BTreeMap<String, String>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn file_sha256(path: &Path) -> Result<String> {
    Ok(sha256_hex(
        &std::fs::read(path).map_err(|e| CliError::io(path, e))?,
    ))
}

/// Writes every table and plot file of `bundle` under `dir`; returns the
/// relative paths with their digests.
pub fn write_bundle(
    bundle: &Bundle,
    dir: &Path,
    format: OutputFormat,
) -> Result<BTreeMap<String, String>> {
    let mut tables = vec![
        (
            "rolling",
            rolling_table(&bundle.rolling, bundle.timestamp_format),
        ),
        ("summary", summary_table(&bundle.summaries)),
        ("ranking", ranking_table(&bundle.ranking)),
        (
            "anova",
            anova_table(
                &[
                    ("entropy", &bundle.anova_entropy),
                    ("complexity", &bundle.anova_complexity),
                ],
                bundle.overlapping_windows,
            ),
        ),
        (
            "bounds",
            bounds_table(&bundle.lower, &bundle.upper, bundle.resolution)?,
        ),
    ];
    if let Some(pairs) = &bundle.pairwise {
        tables.push((
            "pairwise",
            pairwise_table(pairs, bundle.overlapping_windows),
        ));
    }
    if !bundle.spearman.is_empty() {
        tables.push(("spearman", spearman_table(&bundle.spearman)));
    }
    if !bundle.clouds.is_empty() {
        tables.push(("fbm", cloud_table(&bundle.clouds)));
    }

    let mut written = BTreeMap::new();
    for (stem, table) in &tables {
        let bytes = table.to_bytes(format)?;
        let name = format!("{stem}.{}", format.extension());
        write_file(&dir.join(&name), &bytes)?;
        written.insert(name, sha256_hex(&bytes));
    }
    let plot_dir = dir.join("plots");
    for kind in PlotKind::ALL {
        if kind == PlotKind::AnovaIntervals && bundle.pairwise.is_none() {
            continue;
        }
        let path = emit_plot_data(bundle, kind, &plot_dir)?;
        let name = format!("plots/{}", kind.file_name());
        written.insert(name, file_sha256(&path)?);
    }
    Ok(written)
}

/// Loads the input named by `config`, runs the pipeline and writes outputs
/// and manifest under `out`.
pub fn analyze(config: &RunConfig, out: &Path) -> Result<Manifest> {
    config.validate()?;
    let options = LoadOptions {
        assets: config.assets.clone(),
        forward_fill: config.forward_fill,
    };
    let input_sha256 = file_sha256(&config.input)?;
    let (dataset, report): (_, LoadReport) = load_dataset(&config.input, &options)?;
    let metrics = config.metrics.as_deref().map(load_metrics).transpose()?;
    let metrics_sha256 = config.metrics.as_deref().map(file_sha256).transpose()?;
    let bundle = run_pipeline(config, &dataset.series()?, dataset.format, metrics.as_ref())?;
    let outputs = write_bundle(&bundle, out, config.format)?;
    let manifest = Manifest {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        config: config.clone(),
        seed: config.seed,
        input_sha256,
        metrics_sha256,
        rows: report.rows,
        forward_fills: report.fills,
        caveats: bundle.caveats(),
        outputs,
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest)?;
    bytes.push(b'\n');
    write_file(&out.join(MANIFEST_FILE), &bytes)?;
    Ok(manifest)
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(serde_json::from_slice(&bytes)?)
}

/// Re-runs the configuration recorded in a manifest after checking that the
/// input files still have the recorded digests.
pub fn rerun(manifest_path: &Path, out: &Path) -> Result<Manifest> {
    let manifest = read_manifest(manifest_path)?;
    let checks = [
        (Some(&manifest.config.input), Some(&manifest.input_sha256)),
        (
            manifest.config.metrics.as_ref(),
            manifest.metrics_sha256.as_ref(),
        ),
    ];
    for (path, expected) in checks {
        if let (Some(path), Some(expected)) = (path, expected) {
            let found = file_sha256(path)?;
            if &found != expected {
                return Err(CliError::DigestMismatch {
                    path: path.clone(),
                    expected: expected.clone(),
                    found,
                });
            }
        }
    }
    analyze(&manifest.config, out)
}
