use cecp_cli::dataset::{
    load_dataset, read_dataset, read_metrics, synthetic_dataset, LoadOptions, SyntheticSpec,
    TimestampFormat,
};
use cecp_cli::CliError;

const CLEAN: &str = "\
timestamp,BTC,ETH
2018-01-01T00:00:00Z,100.5,10
2018-01-01T00:05:00Z,101.25,10.5
2018-01-01T00:10:00Z,99.75,11
2018-01-01T00:15:00Z,100,10.25
";

fn with_gap() -> String {
    CLEAN.replace("101.25", "")
}

#[test]
fn loads_iso_timestamps_and_all_columns() {
    let (d, report) = read_dataset(CLEAN.as_bytes(), &LoadOptions::default()).unwrap();
    assert_eq!(d.format, TimestampFormat::Iso8601);
    assert_eq!(d.labels(), ["BTC", "ETH"]);
    assert_eq!(d.timestamps[1] - d.timestamps[0], 300);
    assert_eq!(d.columns[0].1, [100.5, 101.25, 99.75, 100.0]);
    assert_eq!(report.rows, 4);
    assert_eq!(report.total_fills(), 0);
    let series = d.series().unwrap();
    assert_eq!(series["ETH"].len(), 4);
}

#[test]
fn integer_index_and_asset_selection() {
    let csv = "i,A,B,C\n0,1,2,3\n1,4,5,6\n2,7,8,9\n";
    let options = LoadOptions {
        assets: Some(vec!["C".into(), "A".into()]),
        forward_fill: false,
    };
    let (d, _) = read_dataset(csv.as_bytes(), &options).unwrap();
    assert_eq!(d.format, TimestampFormat::Index);
    assert_eq!(d.labels(), ["C", "A"]);
    assert_eq!(d.columns[0].1, [3.0, 6.0, 9.0]);
}

#[test]
fn missing_cell_names_row_and_column() {
    let err = read_dataset(with_gap().as_bytes(), &LoadOptions::default()).unwrap_err();
    match &err {
        CliError::Cell { row, column, .. } => {
            assert_eq!(*row, 2);
            assert_eq!(column, "BTC");
        }
        other => panic!("unexpected {other:?}"),
    }
    let json = err.to_json();
    assert_eq!(json["error"]["kind"], "cell");
    assert_eq!(json["error"]["row"], 2);
    assert_eq!(json["error"]["column"], "BTC");
}

#[test]
fn unparseable_cell_is_rejected() {
    let csv = CLEAN.replace("10.5", "ten");
    let err = read_dataset(csv.as_bytes(), &LoadOptions::default()).unwrap_err();
    assert!(matches!(err, CliError::Cell { row: 2, ref column, .. } if column == "ETH"));
}

#[test]
fn forward_fill_preserves_length_and_counts() {
    let options = LoadOptions {
        assets: None,
        forward_fill: true,
    };
    let (d, report) = read_dataset(with_gap().as_bytes(), &options).unwrap();
    assert_eq!(d.len(), 4);
    assert_eq!(d.columns[0].1[1], 100.5);
    assert_eq!(report.total_fills(), 1);
    assert_eq!(report.fills["BTC"], 1);
}

#[test]
fn forward_fill_cannot_fill_the_first_row() {
    let csv = CLEAN.replace("100.5", "");
    let options = LoadOptions {
        assets: None,
        forward_fill: true,
    };
    assert!(matches!(
        read_dataset(csv.as_bytes(), &options),
        Err(CliError::Cell { row: 1, .. })
    ));
}

#[test]
fn structural_errors() {
    let options = LoadOptions {
        assets: Some(vec!["DOGE".into()]),
        forward_fill: false,
    };
    assert!(matches!(
        read_dataset(CLEAN.as_bytes(), &options),
        Err(CliError::MissingColumn(c)) if c == "DOGE"
    ));
    let irregular = CLEAN.replace("00:10:00", "00:11:00");
    assert!(matches!(
        read_dataset(irregular.as_bytes(), &LoadOptions::default()),
        Err(CliError::IrregularGrid {
            row: 3,
            expected: 300,
            found: 360
        })
    ));
    assert!(read_dataset("timestamp,BTC\n".as_bytes(), &LoadOptions::default()).is_err());
    assert!(matches!(
        load_dataset(
            std::path::Path::new("/nonexistent/x.csv"),
            &LoadOptions::default()
        ),
        Err(CliError::Io { .. })
    ));
}

#[test]
fn write_and_reload_round_trips() {
    let spec = SyntheticSpec {
        rows: 500,
        ..SyntheticSpec::standard(3)
    };
    let original = synthetic_dataset(&spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("panel.csv");
    original.save(&path).unwrap();
    let (reloaded, _) = load_dataset(&path, &LoadOptions::default()).unwrap();
    assert_eq!(reloaded, original);
    assert_eq!(reloaded.series().unwrap(), original.series().unwrap());
}

#[test]
fn standard_fixture_shape() {
    let d = synthetic_dataset(&SyntheticSpec::standard(42)).unwrap();
    assert_eq!(d.len(), 16_031);
    assert_eq!(d.columns.len(), 12);
    assert!(d
        .columns
        .iter()
        .all(|(_, v)| v.len() == 16_031 && v.iter().all(|p| *p > 0.0)));
    assert_eq!(d, synthetic_dataset(&SyntheticSpec::standard(42)).unwrap());
}

#[test]
fn metric_table_accepts_thousands_separators() {
    let csv = "asset,cap,volume\nBTC,\"165,007\",\"9,128\"\nETH,\"90,727\",\"3,143\"\n";
    let m = read_metrics(csv.as_bytes()).unwrap();
    assert_eq!(m.names, ["cap", "volume"]);
    assert_eq!(m.values["BTC"], [165_007.0, 9_128.0]);
    let dup = "asset,cap\nBTC,1\nBTC,2\n";
    assert!(read_metrics(dup.as_bytes()).is_err());
}
