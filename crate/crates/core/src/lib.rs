//! Bandt-Pompe ordinal pattern statistics and the complexity-entropy
//! causality plane (CECP).
//!
//! The crate is organised bottom-up:
//!
//! * [`ordinal`] turns a series into an ordinal pattern histogram,
//! * [`quantifiers`] maps a histogram to normalized permutation entropy and
//!   Jensen-Shannon statistical complexity,
//! * [`bounds`] traces the minimum / maximum complexity envelope,
//! * [`fbm`] simulates fractional Brownian motion reference clouds,
//! * [`rolling`] runs the quantifiers over sliding windows,
//! * [`stats`] summarises, ranks and tests per-asset results.
//!
//! Everything is a pure function of its inputs; the only randomness lives in
//! [`fbm`] and is driven by explicit seeds.

pub mod bounds;
pub mod error;
pub mod fbm;
pub mod ordinal;
pub mod quantifiers;
pub mod rolling;
pub mod special;
pub mod stats;
mod sum;

pub use bounds::{lower_bound_curve, upper_bound_curve, within_bounds, BoundCurve, BoundKind};
pub use error::{Error, Result};
pub use fbm::{baseline_cloud, generate_fbm, generate_fgn, BaselineCloud, FbmSpec, FgnMethod};
pub use ordinal::{
    encode_window, extract_pattern_distribution, naive_pattern_oracle, OrdinalConfig,
    PatternDistribution, PatternId, TimeSeries,
};
pub use quantifiers::{
    cecp_point, jensen_shannon_disequilibrium, normalized_entropy, q0_constant, shannon_entropy,
    statistical_complexity, CecpPoint, ProbabilityVector,
};
pub use rolling::{rolling_quantifiers, window_count, RollingResult, WindowParams};
pub use stats::{
    efficiency_distance, one_way_anova, pairwise_anova_on_points, pairwise_anova_vs_baseline,
    rank_assets, rank_by_distance, spearman_rho, summarize, summarize_points, AnovaResult,
    AssetSummary, MeanComparison, PairwiseComparison, RankingEntry, SpearmanResult,
};
