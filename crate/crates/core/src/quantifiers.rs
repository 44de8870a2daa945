//! Permutation entropy and Jensen-Shannon statistical complexity.
//!
//! All logarithms are natural. Terms with `p = 0` are skipped (`0 ln 0 = 0`)
//! and every sum runs in ascending index order through a compensated
//! accumulator, so results are bit-reproducible.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordinal::{count_patterns, OrdinalConfig, PatternDistribution, TimeSeries};
use crate::sum::{compensated_sum, CompensatedSum};

/// Allowed deviation of `Σ p` from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// A validated discrete distribution over `M >= 2` states.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    probs: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidProbability(format!(
                "need at least 2 states, got {}",
                probs.len()
            )));
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0 || **p > 1.0)
        {
            return Err(Error::InvalidProbability(format!(
                "entry {i} = {p} is outside [0, 1]"
            )));
        }
        let total = compensated_sum(probs.iter().copied());
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidProbability(format!(
                "entries sum to {total}, not 1"
            )));
        }
        Ok(Self { probs })
    }

    pub fn uniform(states: usize) -> Result<Self> {
        if states < 2 {
            return Err(Error::InvalidProbability(format!(
                "need at least 2 states, got {states}"
            )));
        }
        Ok(Self {
            probs: vec![1.0 / states as f64; states],
        })
    }

    /// All mass on state `at`.
    pub fn delta(states: usize, at: usize) -> Result<Self> {
        if at >= states {
            return Err(Error::InvalidArgument(format!(
                "delta position {at} out of range for {states} states"
            )));
        }
        let mut probs = vec![0.0; states];
        probs[at] = 1.0;
        Self::new(probs)
    }

    pub fn from_distribution(dist: &PatternDistribution) -> Self {
        Self {
            probs: dist.probabilities(),
        }
    }

    pub fn states(&self) -> usize {
        self.probs.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }
}

/// A location in the complexity-entropy causality plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CecpPoint {
    pub entropy: f64,
    pub complexity: f64,
}

/// `-Σ p ln p`, in nats.
pub fn shannon_entropy(p: &ProbabilityVector) -> f64 {
    entropy_of(p.as_slice())
}

fn entropy_of(probs: &[f64]) -> f64 {
    let mut acc = CompensatedSum::new();
    for &p in probs {
        if p > 0.0 {
            acc.add(-p * p.ln());
        }
    }
    acc.total().max(0.0)
}

/// `S[P] / ln M`, clamped to `[0, 1]`.
pub fn normalized_entropy(p: &ProbabilityVector) -> f64 {
    (shannon_entropy(p) / (p.states() as f64).ln()).clamp(0.0, 1.0)
}

/// Normalization making the Jensen-Shannon divergence between a delta
/// distribution and the uniform distribution on `states` states equal to one.
///
/// Closed form of `1 / (S[(δ+U)/2] - S[δ]/2 - S[U]/2)`.
pub fn q0_constant(states: usize) -> Result<f64> {
    if states < 2 {
        return Err(Error::InvalidArgument(format!(
            "Q0 needs at least 2 states, got {states}"
        )));
    }
    let m = states as f64;
    Ok(-2.0 / ((m + 1.0) / m * (m + 1.0).ln() - 2.0 * (2.0 * m).ln() + m.ln()))
}

/// Unnormalized Jensen-Shannon divergence written as the mean of the two
/// Kullback-Leibler divergences to the midpoint. Each KL sum is nonnegative,
/// which keeps the result from drifting below zero near `P = Pe`.
fn jensen_shannon(p: &[f64], q: &[f64]) -> f64 {
    let mut kl_p = CompensatedSum::new();
    let mut kl_q = CompensatedSum::new();
    for (&a, &b) in p.iter().zip(q) {
        let mid = 0.5 * (a + b);
        if a > 0.0 {
            kl_p.add(a * (a / mid).ln());
        }
        if b > 0.0 {
            kl_q.add(b * (b / mid).ln());
        }
    }
    (0.5 * (kl_p.total() + kl_q.total())).max(0.0)
}

/// `Q0 · {S[(P+R)/2] - S[P]/2 - S[R]/2}`, in `[0, 1]`.
pub fn jensen_shannon_disequilibrium(
    p: &ProbabilityVector,
    reference: &ProbabilityVector,
) -> Result<f64> {
    if p.states() != reference.states() {
        return Err(Error::DimensionMismatch {
            expected: reference.states(),
            found: p.states(),
        });
    }
    let q0 = q0_constant(p.states())?;
    Ok((q0 * jensen_shannon(p.as_slice(), reference.as_slice())).clamp(0.0, 1.0))
}

/// `H_S[P] · Q_J[P, Pe]` with `Pe` uniform over the same states.
pub fn statistical_complexity(p: &ProbabilityVector) -> f64 {
    point_of(p).complexity
}

fn point_of(p: &ProbabilityVector) -> CecpPoint {
    let entropy = normalized_entropy(p);
    if entropy == 0.0 || entropy == 1.0 {
        return CecpPoint {
            entropy,
            complexity: 0.0,
        };
    }
    let states = p.states();
    let uniform = vec![1.0 / states as f64; states];
    // states >= 2 is guaranteed by the type.
    let q0 = q0_constant(states).unwrap_or(1.0);
    let disequilibrium = (q0 * jensen_shannon(p.as_slice(), &uniform)).clamp(0.0, 1.0);
    CecpPoint {
        entropy,
        complexity: (entropy * disequilibrium).clamp(0.0, 1.0),
    }
}

/// CECP coordinates of a pattern histogram.
pub fn cecp_from_distribution(dist: &PatternDistribution) -> CecpPoint {
    point_of(&ProbabilityVector::from_distribution(dist))
}

pub(crate) fn cecp_of_values(values: &[f64], config: &OrdinalConfig) -> Result<CecpPoint> {
    Ok(cecp_from_distribution(&count_patterns(values, config)?))
}

/// Permutation entropy and permutation statistical complexity of `series`.
pub fn cecp_point(series: &TimeSeries, config: &OrdinalConfig) -> Result<CecpPoint> {
    cecp_of_values(series.values(), config)
}
