//! Per-asset summaries, efficiency ranking and the hypothesis tests run on
//! rolling quantifiers: one-way ANOVA (all assets, and each asset against a
//! baseline) and Spearman rank correlation.
//!
//! Standard deviations use the `n - 1` denominator throughout.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fbm::mean_std;
use crate::quantifiers::CecpPoint;
use crate::rolling::RollingResult;
use crate::special::{fisher_sf, student_t_critical, student_t_two_sided_p};
use crate::sum::compensated_sum;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssetSummary {
    pub asset: String,
    pub mean_entropy: f64,
    pub mean_complexity: f64,
    pub std_entropy: f64,
    pub std_complexity: f64,
    pub window_count: usize,
}

/// Mean and standard deviation of each coordinate over the windows.
pub fn summarize(results: &RollingResult) -> Result<AssetSummary> {
    summarize_points(&results.asset, &results.points)
}

pub fn summarize_points(asset: &str, points: &[CecpPoint]) -> Result<AssetSummary> {
    if points.is_empty() {
        return Err(Error::InsufficientData(format!(
            "asset `{asset}` has no windows to summarize"
        )));
    }
    let h: Vec<f64> = points.iter().map(|p| p.entropy).collect();
    let c: Vec<f64> = points.iter().map(|p| p.complexity).collect();
    let (mean_entropy, std_entropy) = mean_std(&h);
    let (mean_complexity, std_complexity) = mean_std(&c);
    Ok(AssetSummary {
        asset: asset.to_string(),
        mean_entropy,
        mean_complexity,
        std_entropy,
        std_complexity,
        window_count: points.len(),
    })
}

/// Euclidean distance from the mean location to `(H, C) = (1, 0)`.
pub fn efficiency_distance(summary: &AssetSummary) -> f64 {
    (1.0 - summary.mean_entropy).hypot(summary.mean_complexity)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingEntry {
    pub asset: String,
    pub distance: f64,
    /// Ordinal position, 1 = most efficient. Equal distances keep input order.
    pub position: usize,
    /// Average rank; equals `position` unless the distance is tied.
    pub rank: f64,
    pub tied: bool,
}

/// Ranks assets by ascending efficiency distance.
pub fn rank_assets(summaries: &[AssetSummary]) -> Result<Vec<RankingEntry>> {
    let distances: Vec<(String, f64)> = summaries
        .iter()
        .map(|s| (s.asset.clone(), efficiency_distance(s)))
        .collect();
    rank_by_distance(&distances)
}

/// Ranks `(asset, distance)` pairs; smaller distance ranks first and tied
/// distances share their average rank.
pub fn rank_by_distance(distances: &[(String, f64)]) -> Result<Vec<RankingEntry>> {
    if distances.is_empty() {
        return Err(Error::InsufficientData("nothing to rank".into()));
    }
    let mut seen = BTreeMap::new();
    for (asset, d) in distances {
        if seen.insert(asset.as_str(), ()).is_some() {
            return Err(Error::DuplicateLabel(asset.clone()));
        }
        if !(d.is_finite() && *d >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "distance for `{asset}` is {d}"
            )));
        }
    }
    let mut order: Vec<usize> = (0..distances.len()).collect();
    order.sort_by(|&a, &b| distances[a].1.total_cmp(&distances[b].1));
    let mut entries = Vec::with_capacity(order.len());
    let mut i = 0;
    while i < order.len() {
        let d = distances[order[i]].1;
        let j = (i..order.len())
            .take_while(|&j| distances[order[j]].1 == d)
            .last()
            .unwrap_or(i);
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for (offset, &idx) in order[i..=j].iter().enumerate() {
            entries.push(RankingEntry {
                asset: distances[idx].0.clone(),
                distance: d,
                position: i + offset + 1,
                rank,
                tied: j > i,
            });
        }
        i = j + 1;
    }
    Ok(entries)
}

/// One-way fixed-effects ANOVA table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnovaResult {
    pub ss_between: f64,
    pub ss_within: f64,
    pub ss_total: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub df_total: usize,
    pub ms_between: f64,
    pub ms_within: f64,
    pub f_stat: f64,
    pub p_value: f64,
    /// Set when every observation within each group is identical; then
    /// `F = 0, p = 1` if the group means agree and `F = ∞, p = 0` otherwise.
    pub degenerate: bool,
}

pub fn one_way_anova<S: AsRef<[f64]>>(groups: &[S]) -> Result<AnovaResult> {
    if groups.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "ANOVA needs at least 2 groups, got {}",
            groups.len()
        )));
    }
    for (i, g) in groups.iter().enumerate() {
        let g = g.as_ref();
        if g.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "group {i} has {} observation(s), need at least 2",
                g.len()
            )));
        }
        if let Some(index) = g.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
    }
    let n_total: usize = groups.iter().map(|g| g.as_ref().len()).sum();
    let grand =
        compensated_sum(groups.iter().flat_map(|g| g.as_ref().iter().copied())) / n_total as f64;
    let means: Vec<f64> = groups
        .iter()
        .map(|g| compensated_sum(g.as_ref().iter().copied()) / g.as_ref().len() as f64)
        .collect();
    let ss_between = compensated_sum(
        groups
            .iter()
            .zip(&means)
            .map(|(g, m)| g.as_ref().len() as f64 * (m - grand) * (m - grand)),
    );
    let ss_within = compensated_sum(
        groups
            .iter()
            .zip(&means)
            .flat_map(|(g, &m)| g.as_ref().iter().map(move |x| (x - m) * (x - m))),
    );
    let ss_total = compensated_sum(
        groups
            .iter()
            .flat_map(|g| g.as_ref().iter().map(|x| (x - grand) * (x - grand))),
    );
    let df_between = groups.len() - 1;
    let df_within = n_total - groups.len();
    let ms_between = ss_between / df_between as f64;
    let ms_within = ss_within / df_within as f64;
    let (f_stat, p_value, degenerate) = if ss_within == 0.0 {
        if ss_between == 0.0 {
            (0.0, 1.0, true)
        } else {
            (f64::INFINITY, 0.0, true)
        }
    } else {
        let f = ms_between / ms_within;
        (f, fisher_sf(f, df_between as f64, df_within as f64)?, false)
    };
    Ok(AnovaResult {
        ss_between,
        ss_within,
        ss_total,
        df_between,
        df_within,
        df_total: n_total - 1,
        ms_between,
        ms_within,
        f_stat,
        p_value,
        degenerate,
    })
}

/// Two-group comparison of one quantifier against the baseline asset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanComparison {
    pub anova: AnovaResult,
    /// Asset mean minus baseline mean.
    pub mean_difference: f64,
    pub std_error: f64,
    pub ci95: [f64; 2],
    pub ci99: [f64; 2],
    pub significant_5pct: bool,
    pub significant_1pct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseComparison {
    pub asset: String,
    pub baseline: String,
    pub entropy: MeanComparison,
    pub complexity: MeanComparison,
}

fn compare_means(asset: &[f64], baseline: &[f64]) -> Result<MeanComparison> {
    let anova = one_way_anova(&[asset, baseline])?;
    let mean = |v: &[f64]| compensated_sum(v.iter().copied()) / v.len() as f64;
    let mean_difference = mean(asset) - mean(baseline);
    let std_error =
        (anova.ms_within * (1.0 / asset.len() as f64 + 1.0 / baseline.len() as f64)).sqrt();
    let df = anova.df_within as f64;
    let t95 = student_t_critical(0.05, df)?;
    let t99 = student_t_critical(0.01, df)?;
    Ok(MeanComparison {
        mean_difference,
        std_error,
        ci95: [
            mean_difference - t95 * std_error,
            mean_difference + t95 * std_error,
        ],
        ci99: [
            mean_difference - t99 * std_error,
            mean_difference + t99 * std_error,
        ],
        significant_5pct: anova.p_value < 0.05,
        significant_1pct: anova.p_value < 0.01,
        anova,
    })
}

/// ANOVA of every asset's window-level entropy and complexity against the
/// baseline asset, ordered by asset label. No multiple-comparison
/// correction is applied.
pub fn pairwise_anova_vs_baseline(
    results: &[RollingResult],
    baseline: &str,
) -> Result<Vec<PairwiseComparison>> {
    let groups: Vec<(&str, &[CecpPoint])> = results
        .iter()
        .map(|r| (r.asset.as_str(), r.points.as_slice()))
        .collect();
    pairwise_anova_on_points(&groups, baseline)
}

/// [`pairwise_anova_vs_baseline`] on bare `(asset, window points)` groups.
pub fn pairwise_anova_on_points(
    groups: &[(&str, &[CecpPoint])],
    baseline: &str,
) -> Result<Vec<PairwiseComparison>> {
    let mut by_label: BTreeMap<&str, &[CecpPoint]> = BTreeMap::new();
    for &(label, points) in groups {
        if by_label.insert(label, points).is_some() {
            return Err(Error::DuplicateLabel(label.to_string()));
        }
    }
    let base = by_label
        .get(baseline)
        .ok_or_else(|| Error::MissingBaseline(baseline.to_string()))?;
    let entropies = |p: &[CecpPoint]| p.iter().map(|x| x.entropy).collect::<Vec<_>>();
    let complexities = |p: &[CecpPoint]| p.iter().map(|x| x.complexity).collect::<Vec<_>>();
    let (base_h, base_c) = (entropies(base), complexities(base));
    by_label
        .iter()
        .filter(|(label, _)| **label != baseline)
        .map(|(label, points)| {
            Ok(PairwiseComparison {
                asset: label.to_string(),
                baseline: baseline.to_string(),
                entropy: compare_means(&entropies(points), &base_h)?,
                complexity: compare_means(&complexities(points), &base_c)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpearmanResult {
    pub rho: f64,
    pub p_value: f64,
    pub n: usize,
}

/// 1-based ranks; tied values receive the average of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = compensated_sum(x.iter().copied()) / n;
    let my = compensated_sum(y.iter().copied()) / n;
    let sxy = compensated_sum(x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)));
    let sxx = compensated_sum(x.iter().map(|a| (a - mx) * (a - mx)));
    let syy = compensated_sum(y.iter().map(|b| (b - my) * (b - my)));
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "Spearman correlation needs at least 3 pairs, got {}",
            x.len()
        )));
    }
    if let Some(index) = x.iter().chain(y).position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            index: index % x.len(),
        });
    }
    Ok(())
}

/// Spearman's rho with a two-sided p-value from
/// `t = rho · sqrt((n-2) / (1-rho²))` on `n - 2` degrees of freedom.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<SpearmanResult> {
    check_pair(x, y)?;
    let rho = pearson(&average_ranks(x), &average_ranks(y))
        .ok_or_else(|| Error::InsufficientData("a variable has zero rank variance".into()))?;
    let n = x.len();
    let df = (n - 2) as f64;
    let p_value = if rho.abs() >= 1.0 {
        0.0
    } else {
        student_t_two_sided_p(rho * (df / (1.0 - rho * rho)).sqrt(), df)?
    };
    Ok(SpearmanResult { rho, p_value, n })
}

/// Largest sample for which [`spearman_exact_p`] enumerates permutations.
pub const EXACT_SPEARMAN_MAX_N: usize = 10;

/// Exact two-sided permutation p-value of Spearman's rho: the share of all
/// `n!` re-pairings whose |rho| reaches the observed one.
pub fn spearman_exact_p(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len();
    if n > EXACT_SPEARMAN_MAX_N {
        return Err(Error::InvalidArgument(format!(
            "exact permutation p-value limited to n <= {EXACT_SPEARMAN_MAX_N}, got {n}"
        )));
    }
    let rx = average_ranks(x);
    let mut ry = average_ranks(y);
    let observed = pearson(&rx, &ry)
        .ok_or_else(|| Error::InsufficientData("a variable has zero rank variance".into()))?
        .abs();
    let mut hits = 0u64;
    let mut total = 0u64;
    // Heap's algorithm.
    let mut c = vec![0usize; n];
    let mut visit = |ry: &[f64]| {
        total += 1;
        if pearson(&rx, ry).unwrap_or(0.0).abs() >= observed - 1e-12 {
            hits += 1;
        }
    };
    visit(&ry);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                ry.swap(0, i);
            } else {
                ry.swap(c[i], i);
            }
            visit(&ry);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(hits as f64 / total as f64)
}
