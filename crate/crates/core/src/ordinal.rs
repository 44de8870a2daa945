//! Bandt-Pompe symbolization.
//!
//! A window `(x[s-(D-1)τ], …, x[s-τ], x[s])` is mapped to the permutation
//! `π = (r0, …, r_{D-1})` of lag offsets that lists the window from its
//! largest to its smallest value. Equal values are ordered so that the larger
//! offset (the older observation) comes first, which makes the symbol unique.
//! Patterns are addressed by the lexicographic rank of `π`.

use std::collections::HashMap;
use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest supported embedding dimension. `12! = 479_001_600` still fits a
/// dense `u64` histogram in memory.
pub const MAX_DIM: usize = 12;

/// Evenly spaced real observations with optional integer timestamps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    timestamps: Option<Vec<i64>>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::SeriesTooShort {
                len: 0,
                required: 1,
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            values,
            timestamps: None,
        })
    }

    /// Builds a series whose timestamps must be strictly increasing with a
    /// constant gap.
    pub fn with_timestamps(values: Vec<f64>, timestamps: Vec<i64>) -> Result<Self> {
        let mut series = Self::new(values)?;
        if timestamps.len() != series.values.len() {
            return Err(Error::DimensionMismatch {
                expected: series.values.len(),
                found: timestamps.len(),
            });
        }
        if timestamps.len() >= 2 {
            let gap = timestamps[1] - timestamps[0];
            if gap <= 0 {
                return Err(Error::IrregularTimestamps { index: 1 });
            }
            if let Some(pos) = timestamps.windows(2).position(|w| w[1] - w[0] != gap) {
                return Err(Error::IrregularTimestamps { index: pos + 1 });
            }
        }
        series.timestamps = Some(timestamps);
        Ok(series)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false: a series holds at least one observation.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn timestamps(&self) -> Option<&[i64]> {
        self.timestamps.as_deref()
    }

    /// Copies the observations in `range` (and their timestamps).
    pub fn slice(&self, range: Range<usize>) -> Result<Self> {
        if range.start >= range.end || range.end > self.values.len() {
            return Err(Error::InvalidArgument(format!(
                "slice {}..{} out of bounds for series of length {}",
                range.start,
                range.end,
                self.values.len()
            )));
        }
        Ok(Self {
            values: self.values[range.clone()].to_vec(),
            timestamps: self.timestamps.as_ref().map(|t| t[range].to_vec()),
        })
    }

    /// Applies `f` elementwise, keeping timestamps.
    pub fn map_values<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self> {
        let values: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        let mut out = Self::new(values)?;
        out.timestamps = self.timestamps.clone();
        Ok(out)
    }

    /// `ln(x[t] / x[t-1])` for `t >= 1`; the first timestamp is dropped.
    pub fn log_returns(&self) -> Result<Self> {
        if self.values.len() < 2 {
            return Err(Error::SeriesTooShort {
                len: self.values.len(),
                required: 2,
            });
        }
        if let Some(index) = self.values.iter().position(|&v| v <= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "log returns need strictly positive values (index {index} is {})",
                self.values[index]
            )));
        }
        let values = self.values.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
        let mut out = Self::new(values)?;
        out.timestamps = self.timestamps.as_ref().map(|t| t[1..].to_vec());
        Ok(out)
    }
}

/// Embedding dimension `D` and delay `τ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct OrdinalConfig {
    dim: usize,
    delay: usize,
}

impl OrdinalConfig {
    pub fn new(dim: usize, delay: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidConfig(format!(
                "embedding dimension must be at least 2, got {dim}"
            )));
        }
        if dim > MAX_DIM {
            return Err(Error::InvalidConfig(format!(
                "embedding dimension must be at most {MAX_DIM}, got {dim}"
            )));
        }
        if delay < 1 {
            return Err(Error::InvalidConfig(
                "embedding delay must be at least 1".into(),
            ));
        }
        Ok(Self { dim, delay })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn delay(&self) -> usize {
        self.delay
    }

    /// Number of distinct patterns, `D!`.
    pub fn pattern_count(&self) -> usize {
        factorial(self.dim) as usize
    }

    /// Observations spanned by one embedding vector, `(D-1)τ + 1`.
    pub fn span(&self) -> usize {
        (self.dim - 1) * self.delay + 1
    }

    /// Number of embedding vectors in a series of length `len`, `len - (D-1)τ`.
    pub fn sample_count(&self, len: usize) -> Result<usize> {
        if len < self.span() {
            return Err(Error::SeriesTooShort {
                len,
                required: self.span(),
            });
        }
        Ok(len - (self.dim - 1) * self.delay)
    }
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn factorial_table(dim: usize) -> [u32; MAX_DIM] {
    let mut table = [1u32; MAX_DIM];
    for i in 1..dim.min(MAX_DIM) {
        table[i] = table[i - 1] * i as u32;
    }
    table
}

/// An ordinal pattern, identified by the lexicographic rank of its
/// permutation among all `D!` permutations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PatternId {
    dim: u8,
    index: u32,
}

impl PatternId {
    pub fn from_index(dim: usize, index: u64) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidConfig(format!("unsupported dimension {dim}")));
        }
        if index >= factorial(dim) {
            return Err(Error::InvalidArgument(format!(
                "pattern index {index} out of range for D={dim}"
            )));
        }
        Ok(Self {
            dim: dim as u8,
            index: index as u32,
        })
    }

    /// Ranks a permutation of `0..D` lexicographically.
    pub fn from_permutation(perm: &[usize]) -> Result<Self> {
        let dim = perm.len();
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidConfig(format!("unsupported dimension {dim}")));
        }
        let mut seen = [false; MAX_DIM];
        for &r in perm {
            if r >= dim || seen[r] {
                return Err(Error::InvalidArgument(format!(
                    "{perm:?} is not a permutation of 0..{dim}"
                )));
            }
            seen[r] = true;
        }
        let fact = factorial_table(dim);
        let mut index = 0u32;
        for i in 0..dim {
            let smaller_after = perm[i + 1..].iter().filter(|&&r| r < perm[i]).count() as u32;
            index += smaller_after * fact[dim - 1 - i];
        }
        Ok(Self {
            dim: dim as u8,
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn index(&self) -> u64 {
        u64::from(self.index)
    }

    /// The permutation `(r0, …, r_{D-1})` of lag offsets, largest value first.
    pub fn permutation(&self) -> Vec<usize> {
        let dim = self.dim();
        let fact = factorial_table(dim);
        let mut remaining: Vec<usize> = (0..dim).collect();
        let mut rest = self.index;
        let mut perm = Vec::with_capacity(dim);
        for i in 0..dim {
            let weight = fact[dim - 1 - i];
            let pick = (rest / weight) as usize;
            rest %= weight;
            perm.push(remaining.remove(pick));
        }
        perm
    }
}

/// Rank of the window `values[start + k*delay]`, `k = 0..dim`, without
/// sorting. `order[k]` counts the window entries listed before entry `k`
/// in `π`; the lexicographic rank then follows from the Lehmer code.
#[inline]
fn pattern_index(values: &[f64], start: usize, dim: usize, delay: usize, fact: &[u32]) -> u32 {
    let mut window = [0.0f64; MAX_DIM];
    for (k, slot) in window.iter_mut().take(dim).enumerate() {
        *slot = values[start + k * delay];
    }
    let mut order = [0u8; MAX_DIM];
    for a in 0..dim {
        for b in a + 1..dim {
            // a is older than b; on equality the older entry is listed first.
            if window[b] > window[a] {
                order[a] += 1;
            } else {
                order[b] += 1;
            }
        }
    }
    let mut index = 0u32;
    for k in 0..dim {
        let inversions = order[k + 1..dim].iter().filter(|&&o| o > order[k]).count() as u32;
        index += inversions * fact[dim - 1 - order[k] as usize];
    }
    index
}

/// Encodes one window (oldest value first) into its ordinal pattern.
pub fn encode_window(window: &[f64], config: &OrdinalConfig) -> Result<PatternId> {
    if window.len() != config.dim() {
        return Err(Error::DimensionMismatch {
            expected: config.dim(),
            found: window.len(),
        });
    }
    if let Some(index) = window.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let fact = factorial_table(config.dim());
    Ok(PatternId {
        dim: config.dim() as u8,
        index: pattern_index(window, 0, config.dim(), 1, &fact),
    })
}

/// Exact integer histogram of ordinal patterns for one series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternDistribution {
    config: OrdinalConfig,
    counts: Vec<u64>,
    sample_count: u64,
}

impl PatternDistribution {
    pub fn config(&self) -> &OrdinalConfig {
        &self.config
    }

    /// Dense counts indexed by [`PatternId::index`].
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, pattern: PatternId) -> u64 {
        self.counts[pattern.index as usize]
    }

    /// `N - (D-1)τ`.
    pub fn sample_count(&self) -> u64 {
        self.sample_count
    }

    pub fn states(&self) -> usize {
        self.counts.len()
    }

    pub fn probability(&self, pattern: PatternId) -> f64 {
        self.count(pattern) as f64 / self.sample_count as f64
    }

    /// `count / sample_count` for every pattern, in index order.
    pub fn probabilities(&self) -> Vec<f64> {
        let n = self.sample_count as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Patterns with a nonzero count, in index order.
    pub fn observed(&self) -> impl Iterator<Item = (PatternId, u64)> + '_ {
        let dim = self.config.dim() as u8;
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(i, &c)| {
                (
                    PatternId {
                        dim,
                        index: i as u32,
                    },
                    c,
                )
            })
    }
}

/// Counts patterns over a slice already known to be finite.
pub(crate) fn count_patterns(
    values: &[f64],
    config: &OrdinalConfig,
) -> Result<PatternDistribution> {
    let samples = config.sample_count(values.len())?;
    let (dim, delay) = (config.dim(), config.delay());
    let fact = factorial_table(dim);
    let mut counts = vec![0u64; config.pattern_count()];
    for start in 0..samples {
        counts[pattern_index(values, start, dim, delay, &fact) as usize] += 1;
    }
    Ok(PatternDistribution {
        config: *config,
        counts,
        sample_count: samples as u64,
    })
}

/// Ordinal pattern histogram of `series` over every embedding vector.
pub fn extract_pattern_distribution(
    series: &TimeSeries,
    config: &OrdinalConfig,
) -> Result<PatternDistribution> {
    count_patterns(series.values(), config)
}

/// Largest dimension the oracle will enumerate (`8! = 40320` permutations).
pub const ORACLE_MAX_DIM: usize = 8;

/// Slow reference for [`extract_pattern_distribution`]: materialises every
/// window, sorts it with the tie rule and looks the permutation up in a
/// table of all permutations generated in lexicographic order. Only meant for
/// testing.
pub fn naive_pattern_oracle(
    series: &TimeSeries,
    config: &OrdinalConfig,
) -> Result<PatternDistribution> {
    let dim = config.dim();
    if dim > ORACLE_MAX_DIM {
        return Err(Error::InvalidConfig(format!(
            "the naive oracle enumerates permutations only up to D={ORACLE_MAX_DIM}"
        )));
    }
    let samples = config.sample_count(series.len())?;
    let table = lexicographic_table(dim);
    let values = series.values();
    let mut counts = vec![0u64; table.len()];
    for s in (dim - 1) * config.delay()..values.len() {
        // (value, offset) pairs for offsets D-1 down to 0.
        let mut window: Vec<(f64, usize)> = (0..dim)
            .map(|offset| (values[s - offset * config.delay()], offset))
            .collect();
        // Ascending value; equal values by ascending offset. That is the
        // sequence r_{D-1}, …, r_0.
        window.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        let perm: Vec<usize> = window.iter().rev().map(|&(_, offset)| offset).collect();
        counts[table[&perm]] += 1;
    }
    Ok(PatternDistribution {
        config: *config,
        counts,
        sample_count: samples as u64,
    })
}

fn lexicographic_table(dim: usize) -> HashMap<Vec<usize>, usize> {
    let mut perm: Vec<usize> = (0..dim).collect();
    let mut table = HashMap::new();
    let mut rank = 0;
    loop {
        table.insert(perm.clone(), rank);
        rank += 1;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    table
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    let Some(i) = (0..n - 1).rev().find(|&i| perm[i] < perm[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
    perm.swap(i, j);
    perm[i + 1..].reverse();
    true
}
