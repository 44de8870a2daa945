use std::collections::BTreeMap;

use cecp::TimeSeries;
use cecp_cli::dataset::{read_metrics, synthetic_dataset, SyntheticSpec, TimestampFormat};
use cecp_cli::pipeline::{analyze, rerun, run_pipeline, RunConfig, MANIFEST_FILE};
use cecp_cli::plot::{emit_plot_data, plot_table, PlotKind};
use cecp_cli::report::{read_rolling, rolling_table, GroupTest};
use cecp_cli::table::{Cell, OutputFormat};
use cecp_cli::CliError;

fn small_panel(assets: usize, rows: usize) -> BTreeMap<String, TimeSeries> {
    let mut spec = SyntheticSpec::standard(9);
    spec.assets.truncate(assets);
    spec.rows = rows;
    synthetic_dataset(&spec).unwrap().series().unwrap()
}

fn config() -> RunConfig {
    RunConfig {
        resolution: 200,
        ..RunConfig::default()
    }
}

#[test]
fn twelve_assets_give_full_tables() {
    let data = small_panel(12, 16_031);
    let cfg = RunConfig {
        baseline: Some("BTC".into()),
        ..config()
    };
    let bundle = run_pipeline(&cfg, &data, TimestampFormat::Iso8601, None).unwrap();
    assert_eq!(bundle.rolling.len(), 12);
    assert!(bundle.rolling.iter().all(|r| r.len() == 262));
    assert_eq!(bundle.ranking.len(), 12);
    for test in [&bundle.anova_entropy, &bundle.anova_complexity] {
        match test {
            GroupTest::Table(a) => {
                assert_eq!(a.df_between, 11);
                assert_eq!(a.df_within, 12 * 262 - 12);
            }
            other => panic!("{other:?}"),
        }
    }
    assert_eq!(bundle.pairwise.as_ref().unwrap().len(), 11);
    assert!(bundle.overlapping_windows);
    assert!(!bundle.caveats().is_empty());
}

#[test]
fn single_asset_reports_insufficient_groups() {
    let data = small_panel(1, 1000);
    let bundle = run_pipeline(&config(), &data, TimestampFormat::Iso8601, None).unwrap();
    assert_eq!(bundle.ranking.len(), 1);
    assert_eq!(bundle.ranking[0].position, 1);
    assert_eq!(
        bundle.anova_entropy,
        GroupTest::InsufficientGroups { groups: 1 }
    );
    let dir = tempfile::tempdir().unwrap();
    let written = cecp_cli::pipeline::write_bundle(&bundle, dir.path(), OutputFormat::Csv).unwrap();
    let anova = std::fs::read_to_string(dir.path().join("anova.csv")).unwrap();
    assert!(anova.contains("insufficient groups"));
    assert!(!written.contains_key("plots/anova-intervals.csv"));
}

#[test]
fn missing_baseline_is_an_error() {
    let data = small_panel(2, 1000);
    let cfg = RunConfig {
        baseline: Some("NOPE".into()),
        ..config()
    };
    assert!(matches!(
        run_pipeline(&cfg, &data, TimestampFormat::Index, None),
        Err(CliError::Core(cecp::Error::MissingBaseline(_)))
    ));
}

#[test]
fn metrics_feed_spearman() {
    let data = small_panel(4, 1000);
    let metrics =
        read_metrics("asset,size\nBCH,1\nBTC,2\nDASH,3\nETC,4\nZZZ,5\n".as_bytes()).unwrap();
    let bundle = run_pipeline(&config(), &data, TimestampFormat::Index, Some(&metrics)).unwrap();
    assert_eq!(bundle.spearman.len(), 1);
    assert_eq!(bundle.spearman[0].result.n, 4);
}

#[test]
fn plot_schemas_and_pass_through() {
    let data = small_panel(3, 1200);
    let cfg = RunConfig {
        baseline: Some("BTC".into()),
        ..config()
    };
    let bundle = run_pipeline(&cfg, &data, TimestampFormat::Iso8601, None).unwrap();

    let means = plot_table(&bundle, PlotKind::CecpMeans).unwrap();
    assert_eq!(
        means.headers,
        ["asset", "mean_H", "mean_C", "std_H", "std_C"]
    );
    assert_eq!(means.rows.len(), 3);
    assert_eq!(
        means.rows[0][1],
        Cell::Float(bundle.summaries[0].mean_entropy)
    );

    let evolution = plot_table(&bundle, PlotKind::EntropyEvolution).unwrap();
    assert_eq!(
        evolution.headers,
        ["asset", "window_index", "end_timestamp", "H"]
    );
    let rolling = rolling_table(&bundle.rolling, bundle.timestamp_format);
    assert_eq!(evolution.rows.len(), rolling.rows.len());
    for (e, r) in evolution.rows.iter().zip(&rolling.rows) {
        assert_eq!(e[0], r[0]);
        assert_eq!(e[2], r[3]);
        assert_eq!(e[3], r[4]);
    }

    let scatter = plot_table(&bundle, PlotKind::CecpScatter).unwrap();
    assert_eq!(scatter.headers, ["asset", "window_index", "H", "C"]);
    assert_eq!(scatter.rows.len(), rolling.rows.len());

    let intervals = plot_table(&bundle, PlotKind::AnovaIntervals).unwrap();
    assert_eq!(intervals.rows.len(), 4);
    assert!(intervals.headers.contains(&"significant_1pct"));
    let pairs = bundle.pairwise.as_ref().unwrap();
    assert_eq!(
        intervals.rows[0][3],
        Cell::Float(pairs[0].entropy.mean_difference)
    );

    let dir = tempfile::tempdir().unwrap();
    let path = emit_plot_data(&bundle, PlotKind::CecpMeans, dir.path()).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "asset,mean_H,mean_C,std_H,std_C"
    );
    assert_eq!(text.lines().count(), 4);

    let without = run_pipeline(&config(), &data, TimestampFormat::Iso8601, None).unwrap();
    assert!(matches!(
        plot_table(&without, PlotKind::AnovaIntervals),
        Err(CliError::MissingPrerequisite(_))
    ));
    assert!("bar-chart".parse::<PlotKind>().is_err());
    assert_eq!(
        "cecp-means".parse::<PlotKind>().unwrap(),
        PlotKind::CecpMeans
    );
}

#[test]
fn rolling_table_reads_back() {
    let data = small_panel(2, 900);
    let bundle = run_pipeline(&config(), &data, TimestampFormat::Iso8601, None).unwrap();
    let bytes = rolling_table(&bundle.rolling, bundle.timestamp_format)
        .to_bytes(OutputFormat::Csv)
        .unwrap();
    let points = read_rolling(bytes.as_slice()).unwrap();
    for r in &bundle.rolling {
        assert_eq!(points[&r.asset], r.points);
    }
}

#[test]
fn analyze_is_deterministic_and_rerunnable() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("panel.csv");
    let mut spec = SyntheticSpec::standard(5);
    spec.assets.truncate(3);
    spec.rows = 2000;
    synthetic_dataset(&spec).unwrap().save(&input).unwrap();
    let cfg = RunConfig {
        input: input.clone(),
        baseline: Some("BTC".into()),
        hurst: vec![0.5, 0.8],
        sims: 20,
        format: OutputFormat::Json,
        ..config()
    };
    let first = analyze(&cfg, &dir.path().join("a")).unwrap();
    let second = rerun(
        &dir.path().join("a").join(MANIFEST_FILE),
        &dir.path().join("b"),
    )
    .unwrap();
    assert_eq!(first, second);
    for name in first
        .outputs
        .keys()
        .chain(std::iter::once(&MANIFEST_FILE.to_string()))
    {
        let a = std::fs::read(dir.path().join("a").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }

    std::fs::write(&input, "timestamp,BTC\n0,1\n1,2\n").unwrap();
    assert!(matches!(
        rerun(
            &dir.path().join("a").join(MANIFEST_FILE),
            &dir.path().join("c")
        ),
        Err(CliError::DigestMismatch { .. })
    ));
}

#[test]
fn log_returns_shorten_each_series_by_one() {
    let data = small_panel(1, 421);
    let cfg = RunConfig {
        log_returns: true,
        ..config()
    };
    let bundle = run_pipeline(&cfg, &data, TimestampFormat::Iso8601, None).unwrap();
    assert_eq!(bundle.rolling[0].len(), 2);
}
