use cecp::{
    extract_pattern_distribution, naive_pattern_oracle, OrdinalConfig, PatternId, TimeSeries,
};
use proptest::prelude::*;

/// Values on a 0.01 grid in [-5, 5], so every strictly increasing map below
/// keeps distinct values distinct in floating point. Small integers mixed in
/// create ties.
fn grid_series(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(
        prop_oneof![
            3 => (-500i32..=500).prop_map(|k| f64::from(k) / 100.0),
            1 => (0i32..3).prop_map(f64::from),
        ],
        50..max_len,
    )
}

type Transform = (&'static str, fn(f64) -> f64);

fn transforms() -> Vec<Transform> {
    vec![
        ("affine", |x| 3.0 * x - 7.0),
        ("exponential", f64::exp),
        ("cubic-plus-linear", |x| x * x * x + x),
        ("logistic", |x| 1.0 / (1.0 + (-x).exp())),
        ("piecewise", |x| if x < 0.0 { 2.0 * x } else { 0.5 * x }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn fast_counter_matches_oracle(values in grid_series(2000), dim in 3usize..=5, delay in 1usize..=3) {
        let series = TimeSeries::new(values).unwrap();
        let config = OrdinalConfig::new(dim, delay).unwrap();
        let fast = extract_pattern_distribution(&series, &config).unwrap();
        let naive = naive_pattern_oracle(&series, &config).unwrap();
        prop_assert_eq!(fast.counts(), naive.counts());
        prop_assert_eq!(fast.sample_count(), (series.len() - (dim - 1) * delay) as u64);
        prop_assert_eq!(fast.counts().iter().sum::<u64>(), fast.sample_count());
        let total: f64 = fast.probabilities().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distribution_is_invariant_under_monotone_maps(values in grid_series(600), dim in 3usize..=5) {
        let series = TimeSeries::new(values).unwrap();
        let config = OrdinalConfig::new(dim, 1).unwrap();
        let base = extract_pattern_distribution(&series, &config).unwrap();
        for (name, f) in transforms() {
            let mapped = extract_pattern_distribution(&series.map_values(f).unwrap(), &config).unwrap();
            prop_assert_eq!(&mapped, &base, "transform {}", name);
        }
    }

    #[test]
    fn encoded_patterns_round_trip(dim in 2usize..=8, index in 0u64..40_320) {
        let fact: u64 = (1..=dim as u64).product();
        let id = PatternId::from_index(dim, index % fact).unwrap();
        let perm = id.permutation();
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..dim).collect::<Vec<_>>());
        prop_assert_eq!(PatternId::from_permutation(&perm).unwrap(), id);
    }
}

#[test]
fn oracle_agrees_on_default_window_length() {
    let values: Vec<f64> = (0..360u64)
        .map(|i| ((i * 2_654_435_761) % 977) as f64)
        .collect();
    let series = TimeSeries::new(values).unwrap();
    let config = OrdinalConfig::new(4, 1).unwrap();
    let fast = extract_pattern_distribution(&series, &config).unwrap();
    assert_eq!(fast.sample_count(), 357);
    assert_eq!(fast, naive_pattern_oracle(&series, &config).unwrap());
}
