use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cecp::{
    baseline_cloud, lower_bound_curve, one_way_anova, pairwise_anova_on_points, rank_by_distance,
    summarize_points, upper_bound_curve, CecpPoint, OrdinalConfig,
};
use cecp_cli::dataset::{load_metrics, synthetic_dataset, SyntheticSpec};
use cecp_cli::pipeline::{analyze, rerun, RunConfig, MANIFEST_FILE};
use cecp_cli::report::{
    anova_table, bounds_table, cloud_table, is_rolling_table, open, pairwise_table, ranking_table,
    read_distances, read_rolling, spearman_table, GroupTest, WindowPoints,
};
use cecp_cli::table::{OutputFormat, Table};
use cecp_cli::{pipeline, Result};
use clap::{Args, Parser, Subcommand};

/// Ordinal-pattern entropy / complexity analysis of CSV price panels.
#[derive(Parser)]
#[command(name = "cecp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on a price CSV and write every table.
    Analyze(AnalyzeArgs),
    /// Repeat the run recorded in a manifest.
    Rerun {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Lower and upper complexity bounds on a regular entropy grid.
    Bounds {
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 2000)]
        resolution: usize,
        #[command(flatten)]
        output: Output,
    },
    /// fBm reference clouds.
    Fbm {
        #[arg(long, value_delimiter = ',', required = true)]
        hurst: Vec<f64>,
        #[arg(long, default_value_t = 500)]
        sims: usize,
        #[arg(long, default_value_t = 360)]
        length: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        tau: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Write a synthetic fBm price panel.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 16_031)]
        rows: usize,
        #[arg(long, default_value_t = 300)]
        interval: i64,
    },
    /// Efficiency ranking from a rolling table.
    Rank {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// All-asset ANOVA, plus pairwise ANOVA against a baseline, from a rolling table.
    Anova {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        baseline: Option<String>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        /// Output directory; tables go to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spearman correlation of efficiency distance with size metrics.
    Spearman {
        /// Rolling or ranking table.
        #[arg(long)]
        input: PathBuf,
        /// CSV with an asset column followed by one column per metric.
        #[arg(long)]
        metric: PathBuf,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_delimiter = ',')]
    assets: Option<Vec<String>>,
    #[arg(long, default_value_t = 4)]
    dim: usize,
    #[arg(long, default_value_t = 1)]
    tau: usize,
    #[arg(long, default_value_t = 360)]
    window: usize,
    #[arg(long, default_value_t = 60)]
    step: usize,
    #[arg(long)]
    log_returns: bool,
    #[arg(long)]
    forward_fill: bool,
    #[arg(long)]
    baseline: Option<String>,
    #[arg(long)]
    metric: Option<PathBuf>,
    /// Hurst exponents of fBm reference clouds.
    #[arg(long, value_delimiter = ',')]
    hurst: Vec<f64>,
    #[arg(long, default_value_t = 500)]
    sims: usize,
    #[arg(long, default_value_t = 360)]
    fbm_length: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 2000)]
    resolution: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Output {
    fn emit(&self, table: &Table) -> Result<()> {
        match &self.out {
            Some(path) => cecp_cli::table::write_file(path, &table.to_bytes(self.format)?),
            None => table.write_stdout(self.format),
        }
    }
}

fn report_run(out: &Path, manifest: &pipeline::Manifest) {
    println!(
        "{}",
        serde_json::json!({
            "manifest": out.join(MANIFEST_FILE),
            "outputs": manifest.outputs.len(),
            "forward_fills": manifest.forward_fills,
        })
    );
}

fn rolling_points(input: &Path) -> Result<WindowPoints> {
    read_rolling(open(input)?)
}

fn distances(points: &WindowPoints) -> Result<Vec<(String, f64)>> {
    points
        .iter()
        .map(|(asset, pts)| {
            let s = summarize_points(asset, pts)?;
            Ok((asset.clone(), cecp::efficiency_distance(&s)))
        })
        .collect()
}

fn anova(
    input: &Path,
    baseline: Option<&str>,
    format: OutputFormat,
    out: Option<&Path>,
) -> Result<()> {
    let points = rolling_points(input)?;
    let test = |f: fn(&CecpPoint) -> f64| -> Result<GroupTest> {
        let groups: Vec<Vec<f64>> = points.values().map(|p| p.iter().map(f).collect()).collect();
        if groups.len() < 2 {
            return Ok(GroupTest::InsufficientGroups {
                groups: groups.len(),
            });
        }
        Ok(GroupTest::Table(one_way_anova(&groups)?))
    };
    let (h, c) = (test(|p| p.entropy)?, test(|p| p.complexity)?);
    let table = anova_table(&[("entropy", &h), ("complexity", &c)], true);
    let pairwise = baseline
        .map(|b| {
            let groups: Vec<(&str, &[CecpPoint])> = points
                .iter()
                .map(|(a, p)| (a.as_str(), p.as_slice()))
                .collect();
            pairwise_anova_on_points(&groups, b).map(|pairs| pairwise_table(&pairs, true))
        })
        .transpose()?;
    match out {
        Some(dir) => {
            table.write_to(dir, "anova", format)?;
            if let Some(p) = &pairwise {
                p.write_to(dir, "pairwise", format)?;
            }
        }
        None => {
            table.write_stdout(format)?;
            if let Some(p) = &pairwise {
                println!();
                p.write_stdout(format)?;
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze(a) => {
            let config = RunConfig {
                input: a.input,
                assets: a.assets,
                dim: a.dim,
                tau: a.tau,
                window: a.window,
                step: a.step,
                log_returns: a.log_returns,
                forward_fill: a.forward_fill,
                baseline: a.baseline,
                metrics: a.metric,
                hurst: a.hurst,
                sims: a.sims,
                fbm_length: a.fbm_length,
                seed: a.seed,
                resolution: a.resolution,
                format: a.format,
            };
            let manifest = analyze(&config, &a.out)?;
            report_run(&a.out, &manifest);
        }
        Command::Rerun { manifest, out } => {
            let m = rerun(&manifest, &out)?;
            report_run(&out, &m);
        }
        Command::Bounds {
            dim,
            resolution,
            output,
        } => {
            let states = OrdinalConfig::new(dim, 1)?.pattern_count();
            let lower = lower_bound_curve(states, resolution)?;
            let upper = upper_bound_curve(states, resolution)?;
            output.emit(&bounds_table(&lower, &upper, resolution)?)?;
        }
        Command::Fbm {
            hurst,
            sims,
            length,
            seed,
            dim,
            tau,
            output,
        } => {
            let config = OrdinalConfig::new(dim, tau)?;
            let clouds = hurst
                .iter()
                .map(|&h| baseline_cloud(h, sims, length, &config, seed))
                .collect::<cecp::Result<Vec<_>>>()?;
            output.emit(&cloud_table(&clouds))?;
        }
        Command::Synth {
            out,
            seed,
            rows,
            interval,
        } => {
            let spec = SyntheticSpec {
                rows,
                interval,
                ..SyntheticSpec::standard(seed)
            };
            synthetic_dataset(&spec)?.save(&out)?;
        }
        Command::Rank { input, output } => {
            let ranking = rank_by_distance(&distances(&rolling_points(&input)?)?)?;
            output.emit(&ranking_table(&ranking))?;
        }
        Command::Anova {
            input,
            baseline,
            format,
            out,
        } => anova(&input, baseline.as_deref(), format, out.as_deref())?,
        Command::Spearman {
            input,
            metric,
            output,
        } => {
            let d = if is_rolling_table(&input)? {
                distances(&rolling_points(&input)?)?
            } else {
                read_distances(open(&input)?)?
            };
            let rows = pipeline::metric_correlations(&d, &load_metrics(&metric)?)?;
            output.emit(&spearman_table(&rows))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(2)
        }
    }
}
