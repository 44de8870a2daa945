//! Minimum and maximum statistical complexity as a function of normalized
//! entropy, for distributions over `M` states.
//!
//! The minimum is traced by `{q, (1-q)/(M-1), …}` for `q` in `[1/M, 1]`.
//! The maximum is traced by the families with `n` zero entries, one entry
//! `q` in `[0, 1/(M-n)]` and `M-n-1` entries sharing `1-q`. Consecutive
//! maximum families meet at the uniform distribution over `k` states, so the
//! envelope is a single chain running from `(0, 0)` to `(1, 0)`.
//!
//! Family members are evaluated in closed form over groups of equal entries,
//! so the cost does not depend on `M`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantifiers::{q0_constant, CecpPoint};

/// Family samples drawn per entropy bin spanned.
const OVERSAMPLE: usize = 8;
const MIN_FAMILY_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Upper,
}

/// Piecewise-linear envelope, sorted by strictly increasing entropy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCurve {
    kind: BoundKind,
    states: usize,
    points: Vec<(f64, f64)>,
}

impl BoundCurve {
    pub fn kind(&self) -> BoundKind {
        self.kind
    }

    pub fn states(&self) -> usize {
        self.states
    }

    /// `(H, C)` vertices.
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn max_complexity(&self) -> f64 {
        self.points.iter().map(|p| p.1).fold(0.0, f64::max)
    }

    /// Linear interpolation of `C` at entropy `h`.
    pub fn interpolate(&self, h: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&h) {
            return Err(Error::InvalidArgument(format!(
                "entropy {h} outside [0, 1]"
            )));
        }
        let pts = &self.points;
        let hi = pts.partition_point(|p| p.0 < h).min(pts.len() - 1);
        if hi == 0 {
            return Ok(pts[0].1);
        }
        let (h0, c0) = pts[hi - 1];
        let (h1, c1) = pts[hi];
        if h >= h1 {
            return Ok(c1);
        }
        let t = (h - h0) / (h1 - h0);
        Ok(c0 + t * (c1 - c0))
    }
}

/// A distribution over `states` states given as `(multiplicity, value)`
/// groups of equal entries.
fn grouped_point(states: usize, q0: f64, groups: &[(f64, f64)]) -> CecpPoint {
    let m = states as f64;
    let u = 1.0 / m;
    let mut entropy = 0.0;
    let mut js = 0.0;
    for &(mult, v) in groups {
        if mult == 0.0 {
            continue;
        }
        let mid = 0.5 * (v + u);
        if v > 0.0 {
            entropy -= mult * v * v.ln();
            js += mult * 0.5 * v * (v / mid).ln();
        }
        js += mult * 0.5 * u * (u / mid).ln();
    }
    let h = (entropy / m.ln()).clamp(0.0, 1.0);
    let q = (q0 * js).clamp(0.0, 1.0);
    CecpPoint {
        entropy: h,
        complexity: h * q,
    }
}

fn lower_member(states: usize, q0: f64, q: f64) -> CecpPoint {
    let rest = (states - 1) as f64;
    grouped_point(states, q0, &[(1.0, q), (rest, (1.0 - q) / rest)])
}

/// Member of the maximum family with `k` shared entries and `M-k-1` zeros.
fn upper_member(states: usize, q0: f64, k: usize, q: f64) -> CecpPoint {
    let zeros = (states - k - 1) as f64;
    grouped_point(
        states,
        q0,
        &[(zeros, 0.0), (1.0, q), (k as f64, (1.0 - q) / k as f64)],
    )
}

/// Uniform distribution over `k` of the `M` states.
fn junction(states: usize, q0: f64, k: usize) -> CecpPoint {
    grouped_point(
        states,
        q0,
        &[((states - k) as f64, 0.0), (k as f64, 1.0 / k as f64)],
    )
}

fn validate(states: usize, resolution: usize) -> Result<f64> {
    if states < 2 {
        return Err(Error::InvalidArgument(format!(
            "bounds need at least 2 states, got {states}"
        )));
    }
    if resolution < 2 {
        return Err(Error::InvalidArgument(format!(
            "resolution must be at least 2, got {resolution}"
        )));
    }
    q0_constant(states)
}

/// Parameter values in `[a, b]`, clustered towards both ends.
fn clustered(a: f64, b: f64, samples: usize) -> impl Iterator<Item = f64> {
    (0..=samples).map(move |i| {
        let t = i as f64 / samples as f64;
        a + (b - a) * 0.5 * (1.0 - (std::f64::consts::PI * t).cos())
    })
}

/// Per-bin extreme complexity plus exact vertices.
struct Envelope {
    kind: BoundKind,
    bins: Vec<Option<(f64, f64)>>,
    vertices: Vec<(f64, f64)>,
}

impl Envelope {
    fn new(kind: BoundKind, resolution: usize) -> Self {
        Self {
            kind,
            bins: vec![None; resolution],
            vertices: vec![(0.0, 0.0), (1.0, 0.0)],
        }
    }

    fn offer(&mut self, p: CecpPoint) {
        // The exact endpoints are already vertices.
        if p.entropy <= 0.0 || p.entropy >= 1.0 {
            return;
        }
        let res = self.bins.len();
        let bin = ((p.entropy * res as f64) as usize).min(res - 1);
        let better = match self.bins[bin] {
            None => true,
            Some((_, c)) => match self.kind {
                BoundKind::Upper => p.complexity > c,
                BoundKind::Lower => p.complexity < c,
            },
        };
        if better {
            self.bins[bin] = Some((p.entropy, p.complexity));
        }
    }

    fn vertex(&mut self, p: CecpPoint) {
        if p.entropy > 0.0 && p.entropy < 1.0 {
            self.vertices.push((p.entropy, p.complexity));
        }
    }

    fn finish(self, states: usize) -> BoundCurve {
        let mut points: Vec<(f64, f64)> = self.bins.into_iter().flatten().collect();
        points.extend(self.vertices);
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut curve: Vec<(f64, f64)> = Vec::with_capacity(points.len());
        for p in points {
            match curve.last_mut() {
                Some(last) if last.0 == p.0 => {
                    last.1 = match self.kind {
                        BoundKind::Upper => last.1.max(p.1),
                        BoundKind::Lower => last.1.min(p.1),
                    };
                }
                _ => curve.push(p),
            }
        }
        BoundCurve {
            kind: self.kind,
            states,
            points: curve,
        }
    }
}

/// Minimum-complexity envelope for `states` states.
pub fn lower_bound_curve(states: usize, resolution: usize) -> Result<BoundCurve> {
    let q0 = validate(states, resolution)?;
    let mut env = Envelope::new(BoundKind::Lower, resolution);
    let samples = (resolution * OVERSAMPLE).max(MIN_FAMILY_SAMPLES);
    for q in clustered(1.0 / states as f64, 1.0, samples) {
        env.offer(lower_member(states, q0, q));
    }
    Ok(env.finish(states))
}

/// Maximum-complexity envelope for `states` states.
pub fn upper_bound_curve(states: usize, resolution: usize) -> Result<BoundCurve> {
    let q0 = validate(states, resolution)?;
    if states == 2 {
        // Two states leave a single one-parameter family: both bounds coincide.
        let mut curve = lower_bound_curve(states, resolution)?;
        curve.kind = BoundKind::Upper;
        return Ok(curve);
    }
    let mut env = Envelope::new(BoundKind::Upper, resolution);
    let ln_m = (states as f64).ln();
    let bin_width = 1.0 / resolution as f64;

    // Families ordered by increasing entropy: k shared entries move from the
    // uniform distribution on k states to the one on k+1 states.
    let mut k = 1;
    while k < states {
        let width = ((k + 1) as f64 / k as f64).ln() / ln_m;
        if width < bin_width {
            break;
        }
        let samples = ((width / bin_width).ceil() as usize * OVERSAMPLE).max(MIN_FAMILY_SAMPLES);
        // Every member lies on the envelope: the families cover disjoint
        // entropy ranges. Near each junction C behaves like sqrt(H_j - H), so
        // all samples are kept as vertices instead of one per bin.
        for q in clustered(0.0, 1.0 / (k + 1) as f64, samples) {
            env.vertex(upper_member(states, q0, k, q));
        }
        env.vertex(junction(states, q0, k));
        k += 1;
    }
    // Remaining families each fit inside one bin; their junctions carry the
    // envelope, one per bin.
    if k < states {
        let first_bin = ((k as f64).ln() / ln_m * resolution as f64) as usize;
        let mut last_k = k - 1;
        for bin in first_bin..resolution {
            let h = (bin as f64 + 0.5) / resolution as f64;
            let kk = ((h * ln_m).exp().round() as usize).clamp(k, states - 1);
            if kk > last_k {
                env.vertex(junction(states, q0, kk));
                last_k = kk;
            }
        }
    }
    Ok(env.finish(states))
}

/// Whether `point` lies between the two curves, within `tol`.
pub fn within_bounds(
    point: &CecpPoint,
    lower: &BoundCurve,
    upper: &BoundCurve,
    tol: f64,
) -> Result<bool> {
    if lower.states() != upper.states() {
        return Err(Error::DimensionMismatch {
            expected: lower.states(),
            found: upper.states(),
        });
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance {tol} must be >= 0"
        )));
    }
    let lo = lower.interpolate(point.entropy)?;
    let hi = upper.interpolate(point.entropy)?;
    Ok(lo - tol <= point.complexity && point.complexity <= hi + tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantifiers::{normalized_entropy, statistical_complexity, ProbabilityVector};

    fn full_point(p: Vec<f64>) -> (f64, f64) {
        let v = ProbabilityVector::new(p).unwrap();
        (normalized_entropy(&v), statistical_complexity(&v))
    }

    #[test]
    fn grouped_evaluation_matches_full_vectors() {
        let m = 24;
        let q0 = q0_constant(m).unwrap();
        for &q in &[0.05, 0.2, 0.5, 0.9] {
            let mut p = vec![(1.0 - q) / 23.0; m];
            p[0] = q;
            let (h, c) = full_point(p);
            let g = lower_member(m, q0, q);
            assert!((g.entropy - h).abs() < 1e-12 && (g.complexity - c).abs() < 1e-12);
        }
        for k in [1usize, 3, 10, 22] {
            let q = 0.3 / (k + 1) as f64;
            let mut p = vec![0.0; m];
            p[0] = q;
            for x in p.iter_mut().skip(1).take(k) {
                *x = (1.0 - q) / k as f64;
            }
            let (h, c) = full_point(p);
            let g = upper_member(m, q0, k, q);
            assert!((g.entropy - h).abs() < 1e-12 && (g.complexity - c).abs() < 1e-12);
        }
    }

    #[test]
    fn family_endpoints() {
        let m = 24;
        let q0 = q0_constant(m).unwrap();
        let uniform = lower_member(m, q0, 1.0 / m as f64);
        assert!((uniform.entropy - 1.0).abs() < 1e-12 && uniform.complexity.abs() < 1e-12);
        let delta = lower_member(m, q0, 1.0);
        assert_eq!((delta.entropy, delta.complexity), (0.0, 0.0));
    }

    #[test]
    fn curves_are_well_formed() {
        for m in [2, 6, 24, 120] {
            for curve in [
                lower_bound_curve(m, 500).unwrap(),
                upper_bound_curve(m, 500).unwrap(),
            ] {
                let pts = curve.points();
                assert_eq!(pts[0], (0.0, 0.0));
                assert_eq!(*pts.last().unwrap(), (1.0, 0.0));
                assert!(pts.windows(2).all(|w| w[1].0 > w[0].0));
                assert!(pts.iter().all(|p| p.1 >= 0.0));
            }
        }
    }

    #[test]
    fn lower_never_exceeds_upper() {
        for m in [2, 3, 6, 24, 120] {
            let lo = lower_bound_curve(m, 2000).unwrap();
            let hi = upper_bound_curve(m, 2000).unwrap();
            for i in 0..=1000 {
                let h = i as f64 / 1000.0;
                assert!(lo.interpolate(h).unwrap() <= hi.interpolate(h).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn refinement_converges() {
        let lo1 = lower_bound_curve(24, 2000).unwrap();
        let lo2 = lower_bound_curve(24, 4000).unwrap();
        let hi1 = upper_bound_curve(24, 2000).unwrap();
        let hi2 = upper_bound_curve(24, 4000).unwrap();
        for i in 0..=100 {
            let h = i as f64 / 100.0;
            assert!((lo1.interpolate(h).unwrap() - lo2.interpolate(h).unwrap()).abs() < 1e-6);
            assert!((hi1.interpolate(h).unwrap() - hi2.interpolate(h).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn large_state_counts_stay_cheap() {
        // 10! states: most maximum families are narrower than one bin.
        let hi = upper_bound_curve(3_628_800, 2000).unwrap();
        assert!(hi.points().windows(2).all(|w| w[1].0 > w[0].0));
        assert!(hi.max_complexity() > 0.0 && hi.max_complexity() < 1.0);
    }

    #[test]
    fn within_bounds_examples() {
        let lo = lower_bound_curve(24, 2000).unwrap();
        let hi = upper_bound_curve(24, 2000).unwrap();
        let inside = |h, c| {
            within_bounds(
                &CecpPoint {
                    entropy: h,
                    complexity: c,
                },
                &lo,
                &hi,
                1e-9,
            )
        };
        assert!(inside(1.0, 0.0).unwrap());
        assert!(inside(0.0, 0.0).unwrap());
        assert!(hi.max_complexity() < 0.9);
        assert!(!inside(0.5, 0.9).unwrap());
        assert!(inside(1.5, 0.0).is_err());
        assert!(lower_bound_curve(1, 10).is_err());
        assert!(upper_bound_curve(24, 1).is_err());
    }
}
