//! Fractional Gaussian noise / fractional Brownian motion synthesis and the
//! CECP reference clouds built from it.
//!
//! Paths are drawn exactly in distribution by circulant embedding of the fGn
//! autocovariance (Davies-Harte). If the embedding has a materially negative
//! eigenvalue the generator falls back to the sequential conditional
//! (Durbin-Levinson / Hosking) method, which is exact but `O(n²)`.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ordinal::{OrdinalConfig, TimeSeries};
use crate::quantifiers::{cecp_of_values, CecpPoint};
use crate::sum::compensated_sum;

/// Relative size below which negative embedding eigenvalues are treated as
/// rounding noise and clipped to zero.
const EIGEN_CLIP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FbmSpec {
    pub hurst: f64,
    pub length: usize,
    pub seed: u64,
}

impl FbmSpec {
    pub fn new(hurst: f64, length: usize, seed: u64) -> Result<Self> {
        let spec = Self {
            hurst,
            length,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if !(self.hurst > 0.0 && self.hurst < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "Hurst exponent must lie in (0, 1), got {}",
                self.hurst
            )));
        }
        if self.length < 2 {
            return Err(Error::InvalidArgument(format!(
                "path length must be at least 2, got {}",
                self.length
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FgnMethod {
    CirculantEmbedding,
    Hosking,
}

/// fGn autocovariance `½(|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H})`.
pub fn fgn_autocovariance(hurst: f64, lag: usize) -> f64 {
    let k = lag as f64;
    let e = 2.0 * hurst;
    0.5 * ((k + 1.0).powf(e) - 2.0 * k.powf(e) + (k - 1.0).abs().powf(e))
}

/// Reusable generator for many paths of one `(hurst, length)` pair.
pub struct FgnGenerator {
    hurst: f64,
    length: usize,
    kind: GeneratorKind,
}

enum GeneratorKind {
    Circulant {
        /// `sqrt(λ_j / m)` for the `m = 2n` circulant eigenvalues.
        scale: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
    },
    Hosking {
        /// Durbin-Levinson coefficients, row `t` holds `φ_{t,1..=t}`.
        phi: Vec<Vec<f64>>,
        /// Innovation standard deviations.
        sigma: Vec<f64>,
    },
}

impl FgnGenerator {
    /// Circulant embedding, or the Hosking fallback when it is not valid.
    pub fn new(hurst: f64, length: usize) -> Result<Self> {
        FbmSpec::new(hurst, length, 0)?;
        match Self::circulant(hurst, length) {
            Ok(g) => Ok(g),
            Err(Error::EmbeddingFailure(_)) => Self::with_method(hurst, length, FgnMethod::Hosking),
            Err(e) => Err(e),
        }
    }

    pub fn with_method(hurst: f64, length: usize, method: FgnMethod) -> Result<Self> {
        FbmSpec::new(hurst, length, 0)?;
        match method {
            FgnMethod::CirculantEmbedding => Self::circulant(hurst, length),
            FgnMethod::Hosking => Ok(Self::hosking(hurst, length)),
        }
    }

    pub fn method(&self) -> FgnMethod {
        match self.kind {
            GeneratorKind::Circulant { .. } => FgnMethod::CirculantEmbedding,
            GeneratorKind::Hosking { .. } => FgnMethod::Hosking,
        }
    }

    fn circulant(hurst: f64, n: usize) -> Result<Self> {
        let m = 2 * n;
        // First row: γ(0..=n) followed by γ(n-1..=1).
        let mut row: Vec<Complex<f64>> = (0..=n)
            .chain((1..n).rev())
            .map(|k| Complex::new(fgn_autocovariance(hurst, k), 0.0))
            .collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        fft.process(&mut row);
        let max = row.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
        let mut scale = Vec::with_capacity(m);
        for (j, c) in row.iter().enumerate() {
            let mut lambda = c.re;
            if lambda < 0.0 {
                if lambda < -EIGEN_CLIP * max {
                    return Err(Error::EmbeddingFailure(format!(
                        "eigenvalue {j} is {lambda:e} for H={hurst}, n={n}"
                    )));
                }
                lambda = 0.0;
            }
            scale.push((lambda / m as f64).sqrt());
        }
        Ok(Self {
            hurst,
            length: n,
            kind: GeneratorKind::Circulant { scale, fft },
        })
    }

    fn hosking(hurst: f64, n: usize) -> Self {
        let gamma: Vec<f64> = (0..n).map(|k| fgn_autocovariance(hurst, k)).collect();
        let mut phi: Vec<Vec<f64>> = vec![Vec::new()];
        let mut sigma = vec![gamma[0].sqrt()];
        let mut v = gamma[0];
        for t in 1..n {
            let prev = &phi[t - 1];
            let mut num = gamma[t];
            for j in 1..t {
                num -= prev[j - 1] * gamma[t - j];
            }
            let ptt = num / v;
            let mut row = Vec::with_capacity(t);
            for j in 1..t {
                row.push(prev[j - 1] - ptt * prev[t - j - 1]);
            }
            row.push(ptt);
            v *= 1.0 - ptt * ptt;
            sigma.push(v.max(0.0).sqrt());
            phi.push(row);
        }
        Self {
            hurst,
            length: n,
            kind: GeneratorKind::Hosking { phi, sigma },
        }
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn length(&self) -> usize {
        self.length
    }

    /// Draws one fGn path of `length` samples from `rng`.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let n = self.length;
        match &self.kind {
            GeneratorKind::Circulant { scale, fft } => {
                let mut w: Vec<Complex<f64>> = scale
                    .iter()
                    .map(|&s| {
                        let re: f64 = StandardNormal.sample(rng);
                        let im: f64 = StandardNormal.sample(rng);
                        Complex::new(s * re, s * im)
                    })
                    .collect();
                fft.process(&mut w);
                w[..n].iter().map(|c| c.re).collect()
            }
            GeneratorKind::Hosking { phi, sigma } => {
                let mut x = Vec::with_capacity(n);
                for t in 0..n {
                    let z: f64 = StandardNormal.sample(rng);
                    let mean: f64 = phi[t]
                        .iter()
                        .enumerate()
                        .map(|(j, p)| p * x[t - 1 - j])
                        .sum();
                    x.push(mean + sigma[t] * z);
                }
                x
            }
        }
    }
}

/// Random stream for simulation `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn cumulative(increments: Vec<f64>) -> Vec<f64> {
    increments
        .into_iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// Fractional Gaussian noise with unit variance increments.
pub fn generate_fgn(spec: &FbmSpec) -> Result<TimeSeries> {
    spec.validate()?;
    let generator = FgnGenerator::new(spec.hurst, spec.length)?;
    TimeSeries::new(generator.sample(&mut stream_rng(spec.seed, 0)))
}

/// fBm path `B(1), …, B(n)` as the running sum of [`generate_fgn`], with the
/// implicit origin `B(0) = 0` left out.
pub fn generate_fbm(spec: &FbmSpec) -> Result<TimeSeries> {
    let fgn = generate_fgn(spec)?;
    TimeSeries::new(cumulative(fgn.values().to_vec()))
}

/// Mean and sample standard deviation of CECP locations of simulated fBm
/// paths for one Hurst exponent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineCloud {
    pub hurst: f64,
    pub mean_point: CecpPoint,
    pub std_entropy: f64,
    pub std_complexity: f64,
    pub sims: usize,
}

/// Mean and sample (n-1) standard deviation; zero deviation for one sample.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Simulates `sims` fBm paths of `length` points and summarises their CECP
/// locations. Simulation `i` uses random stream `i` of `seed`, so the result
/// is independent of thread count and scheduling.
pub fn baseline_cloud(
    hurst: f64,
    sims: usize,
    length: usize,
    config: &OrdinalConfig,
    seed: u64,
) -> Result<BaselineCloud> {
    if sims == 0 {
        return Err(Error::InvalidArgument(
            "need at least one simulation".into(),
        ));
    }
    FbmSpec::new(hurst, length, seed)?;
    config.sample_count(length)?;
    let generator = FgnGenerator::new(hurst, length)?;
    let points: Vec<CecpPoint> = (0..sims)
        .into_par_iter()
        .map(|i| {
            let path = cumulative(generator.sample(&mut stream_rng(seed, i as u64)));
            cecp_of_values(&path, config)
        })
        .collect::<Result<_>>()?;
    let entropies: Vec<f64> = points.iter().map(|p| p.entropy).collect();
    let complexities: Vec<f64> = points.iter().map(|p| p.complexity).collect();
    let (mean_h, std_h) = mean_std(&entropies);
    let (mean_c, std_c) = mean_std(&complexities);
    Ok(BaselineCloud {
        hurst,
        mean_point: CecpPoint {
            entropy: mean_h,
            complexity: mean_c,
        },
        std_entropy: std_h,
        std_complexity: std_c,
        sims,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn autocovariance_reference_values() {
        for k in 1..50 {
            assert!(fgn_autocovariance(0.5, k).abs() < 1e-15);
        }
        assert_eq!(fgn_autocovariance(0.5, 0), 1.0);
        let expected = 0.5 * (2f64.powf(1.4) - 2.0);
        assert!((fgn_autocovariance(0.7, 1) - expected).abs() < 1e-15);
    }

    #[test]
    fn spec_validation() {
        assert!(FbmSpec::new(0.0, 10, 1).is_err());
        assert!(FbmSpec::new(1.0, 10, 1).is_err());
        assert!(FbmSpec::new(0.5, 1, 1).is_err());
        assert!(FbmSpec::new(0.5, 2, 1).is_ok());
    }

    #[test]
    fn seeded_paths_are_reproducible() {
        let spec = FbmSpec::new(0.7, 500, 42).unwrap();
        assert_eq!(generate_fgn(&spec).unwrap(), generate_fgn(&spec).unwrap());
        let other = FbmSpec { seed: 43, ..spec };
        assert_ne!(generate_fgn(&spec).unwrap(), generate_fgn(&other).unwrap());
    }

    #[test]
    fn fbm_is_running_sum_of_fgn() {
        let spec = FbmSpec::new(0.6, 64, 7).unwrap();
        let fgn = generate_fgn(&spec).unwrap();
        let fbm = generate_fbm(&spec).unwrap();
        assert_eq!(fbm.len(), 64);
        assert_eq!(fbm.values()[0], fgn.values()[0]);
        let mut acc = 0.0;
        for (b, g) in fbm.values().iter().zip(fgn.values()) {
            acc += g;
            assert_eq!(*b, acc);
        }
    }

    #[test]
    fn circulant_is_used_across_the_hurst_range() {
        for h in [0.05, 0.3, 0.5, 0.7, 0.9, 0.99] {
            for n in [2, 3, 360, 1000] {
                let g = FgnGenerator::new(h, n).unwrap();
                assert_eq!(g.method(), FgnMethod::CirculantEmbedding, "H={h} n={n}");
            }
        }
    }

    #[test]
    fn hosking_coefficients_reproduce_covariance() {
        // For H = 0.5 the increments are independent: all φ vanish.
        let g = FgnGenerator::with_method(0.5, 20, FgnMethod::Hosking).unwrap();
        if let GeneratorKind::Hosking { phi, sigma } = &g.kind {
            assert!(phi.iter().flatten().all(|p| p.abs() < 1e-14));
            assert!(sigma.iter().all(|s| (s - 1.0).abs() < 1e-14));
        } else {
            unreachable!();
        }
        // One-step predictor for H = 0.7: φ_11 = γ(1) / γ(0).
        let g = FgnGenerator::with_method(0.7, 3, FgnMethod::Hosking).unwrap();
        if let GeneratorKind::Hosking { phi, .. } = &g.kind {
            assert!((phi[1][0] - fgn_autocovariance(0.7, 1)).abs() < 1e-15);
        }
    }

    #[test]
    fn single_simulation_has_zero_spread() {
        let cfg = OrdinalConfig::new(4, 1).unwrap();
        let cloud = baseline_cloud(0.6, 1, 360, &cfg, 3).unwrap();
        assert_eq!(cloud.std_entropy, 0.0);
        assert_eq!(cloud.std_complexity, 0.0);
        assert_eq!(cloud.sims, 1);
        assert!(baseline_cloud(0.6, 0, 360, &cfg, 3).is_err());
        assert!(baseline_cloud(0.6, 5, 3, &cfg, 3).is_err());
    }

    #[test]
    fn clouds_do_not_depend_on_thread_count() {
        let cfg = OrdinalConfig::new(4, 1).unwrap();
        let parallel = baseline_cloud(0.7, 64, 360, &cfg, 11).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let serial = pool.install(|| baseline_cloud(0.7, 64, 360, &cfg, 11).unwrap());
        assert_eq!(parallel, serial);
    }
}
