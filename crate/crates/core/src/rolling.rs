//! Sliding-window evolution of the CECP location.
//!
//! Window `k` covers observations `[k·step, k·step + size)`. Trailing
//! observations that do not fill a window are dropped, and a window is tagged
//! with the timestamp of its last observation.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ordinal::{OrdinalConfig, TimeSeries};
use crate::quantifiers::{cecp_of_values, CecpPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WindowParams {
    size: usize,
    step: usize,
}

impl WindowParams {
    pub fn new(size: usize, step: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidConfig(format!(
                "window size must be at least 2, got {size}"
            )));
        }
        if step < 1 {
            return Err(Error::InvalidConfig(
                "window step must be at least 1".into(),
            ));
        }
        Ok(Self { size, step })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn step(&self) -> usize {
        self.step
    }

    /// Windows share observations when the step is shorter than the window.
    pub fn overlapping(&self) -> bool {
        self.step < self.size
    }

    /// Checks that every window admits at least one embedding vector.
    pub fn check_config(&self, config: &OrdinalConfig) -> Result<()> {
        config.sample_count(self.size).map(|_| ()).map_err(|_| {
            Error::InvalidConfig(format!(
                "window size {} is shorter than the embedding span {} (D={}, tau={})",
                self.size,
                config.span(),
                config.dim(),
                config.delay()
            ))
        })
    }
}

/// `floor((len - size) / step) + 1`.
pub fn window_count(series_len: usize, params: &WindowParams) -> Result<usize> {
    if series_len < params.size {
        return Err(Error::SeriesTooShort {
            len: series_len,
            required: params.size,
        });
    }
    Ok((series_len - params.size) / params.step + 1)
}

/// Per-window CECP points of one asset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RollingResult {
    pub asset: String,
    pub params: WindowParams,
    pub config: OrdinalConfig,
    /// Offset of each window's first observation.
    pub window_starts: Vec<usize>,
    /// Timestamp of each window's last observation, when the series has them.
    pub end_timestamps: Option<Vec<i64>>,
    pub points: Vec<CecpPoint>,
}

impl RollingResult {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn entropies(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.entropy).collect()
    }

    pub fn complexities(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.complexity).collect()
    }

    /// Embedding vectors per window, `size - (D-1)τ`.
    pub fn samples_per_window(&self) -> usize {
        self.params.size - (self.config.dim() - 1) * self.config.delay()
    }
}

/// CECP location of every full window of `series`.
pub fn rolling_quantifiers(
    asset: &str,
    series: &TimeSeries,
    params: &WindowParams,
    config: &OrdinalConfig,
) -> Result<RollingResult> {
    params.check_config(config)?;
    let count = window_count(series.len(), params)?;
    let values = series.values();
    let window_starts: Vec<usize> = (0..count).map(|k| k * params.step).collect();
    let points = window_starts
        .par_iter()
        .map(|&start| cecp_of_values(&values[start..start + params.size], config))
        .collect::<Result<Vec<_>>>()?;
    let end_timestamps = series.timestamps().map(|ts| {
        window_starts
            .iter()
            .map(|&start| ts[start + params.size - 1])
            .collect()
    });
    Ok(RollingResult {
        asset: asset.to_string(),
        params: *params,
        config: *config,
        window_starts,
        end_timestamps,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantifiers::cecp_point;

    fn default_params() -> (WindowParams, OrdinalConfig) {
        (
            WindowParams::new(360, 60).unwrap(),
            OrdinalConfig::new(4, 1).unwrap(),
        )
    }

    #[test]
    fn window_count_arithmetic() {
        let (p, _) = default_params();
        assert_eq!(window_count(360, &p).unwrap(), 1);
        assert_eq!(window_count(419, &p).unwrap(), 1);
        assert_eq!(window_count(420, &p).unwrap(), 2);
        assert_eq!(window_count(16_031, &p).unwrap(), 262);
        assert!(matches!(
            window_count(359, &p),
            Err(Error::SeriesTooShort {
                len: 359,
                required: 360
            })
        ));
    }

    #[test]
    fn params_validation() {
        assert!(WindowParams::new(1, 1).is_err());
        assert!(WindowParams::new(10, 0).is_err());
        let small = WindowParams::new(3, 1).unwrap();
        assert!(small
            .check_config(&OrdinalConfig::new(4, 1).unwrap())
            .is_err());
        assert!(small
            .check_config(&OrdinalConfig::new(3, 1).unwrap())
            .is_ok());
    }

    #[test]
    fn monotone_windows_sit_at_origin() {
        let (p, c) = default_params();
        let series = TimeSeries::new((0..480).map(f64::from).collect()).unwrap();
        let r = rolling_quantifiers("UP", &series, &p, &c).unwrap();
        assert_eq!(r.window_starts, vec![0, 60, 120]);
        assert!(r
            .points
            .iter()
            .all(|pt| pt.entropy == 0.0 && pt.complexity == 0.0));
        assert_eq!(r.samples_per_window(), 357);
        assert!(r.end_timestamps.is_none());
    }

    #[test]
    fn constant_window_is_not_an_error() {
        let p = WindowParams::new(10, 5).unwrap();
        let c = OrdinalConfig::new(3, 1).unwrap();
        let series = TimeSeries::new(vec![2.5; 20]).unwrap();
        let r = rolling_quantifiers("FLAT", &series, &p, &c).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r
            .points
            .iter()
            .all(|pt| pt.entropy == 0.0 && pt.complexity == 0.0));
    }

    #[test]
    fn windows_equal_standalone_slices() {
        let values: Vec<f64> = (0..1000).map(|i| ((i * 7919) % 1013) as f64).collect();
        let ts: Vec<i64> = (0..1000).map(|i| 1_000 + 300 * i).collect();
        let series = TimeSeries::with_timestamps(values, ts).unwrap();
        let p = WindowParams::new(200, 75).unwrap();
        let c = OrdinalConfig::new(4, 2).unwrap();
        let r = rolling_quantifiers("X", &series, &p, &c).unwrap();
        assert_eq!(r.len(), window_count(1000, &p).unwrap());
        let ends = r.end_timestamps.as_ref().unwrap();
        for (k, (&start, point)) in r.window_starts.iter().zip(&r.points).enumerate() {
            let slice = series.slice(start..start + 200).unwrap();
            assert_eq!(*point, cecp_point(&slice, &c).unwrap());
            assert_eq!(ends[k], 1_000 + 300 * (start as i64 + 199));
        }
    }
}
