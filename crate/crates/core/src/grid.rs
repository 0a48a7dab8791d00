//! Log-spaced scan grids, sup estimates and the trend rule that turns finite samples
//! into bounded/unbounded verdicts.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Log-spaced sample points `t_min = t_0 < … < t_{n-1} = t_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

impl Default for ScanGrid {
    fn default() -> Self {
        ScanGrid { t_min: 1e-6, t_max: 1e6, points: 512 }
    }
}

impl ScanGrid {
    pub fn new(t_min: f64, t_max: f64, points: usize) -> Result<Self> {
        let g = ScanGrid { t_min, t_max, points };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t_max > self.t_min && self.t_max.is_finite()) || self.points < 2 {
            return Err(Error::InvalidParameter(format!(
                "scan grid needs 0 < t_min < t_max < inf and at least 2 points, got {self:?}"
            )));
        }
        Ok(())
    }

    /// Same as [`validate`](Self::validate) plus the density requirement for index scans.
    pub fn validate_for_indices(&self) -> Result<()> {
        self.validate()?;
        if self.points < 100 || self.decades() < 8.0 - 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "index scans need at least 100 points over 8 decades, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn decades(&self) -> f64 {
        (self.t_max / self.t_min).log10()
    }

    /// `ln t_i`, with both endpoints reproduced exactly.
    pub fn log_points(&self) -> Vec<f64> {
        let (a, b) = (self.t_min.ln(), self.t_max.ln());
        let n = self.points;
        (0..n)
            .map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
            .collect()
    }

    pub fn values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.log_points().into_iter().map(f64::exp).collect();
        v[0] = self.t_min;
        let n = v.len();
        v[n - 1] = self.t_max;
        v
    }

    /// Number of grid steps spanning `decades` decades (at least one).
    pub fn steps_per(&self, decades: f64) -> usize {
        let per = (self.points - 1) as f64 / self.decades();
        ((per * decades).round() as usize).max(1)
    }
}

/// Outcome of a sup-type or pass/fail test on a finite grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Bounded,
    UnboundedTrend,
    Inconclusive,
    Pass,
    Fail,
}

impl Verdict {
    pub fn is_positive(self) -> bool {
        matches!(self, Verdict::Bounded | Verdict::Pass)
    }
}

/// Growth ratio at or above which a monotone edge run counts as an unbounded trend.
pub const TREND_FACTOR: f64 = 2.0;
/// Growth ratio below which an edge run is considered flat.
pub const FLAT_FACTOR: f64 = 1.0 + 1e-6;

/// Verdict from three successive sup levels `s0 ≤ s1 ≤ s2`, each taken over a range
/// two decades wider than the previous one.
///
/// Growth by [`TREND_FACTOR`] over the last step is an unbounded trend; growth below
/// [`FLAT_FACTOR`] is flat. In between, increments that at least halve from one step to the
/// next are read as settling toward a limit; anything else is inconclusive.
pub fn level_trend(s0: Option<f64>, s1: f64, s2: f64) -> Verdict {
    if s2.is_infinite() || s1.is_infinite() {
        return Verdict::UnboundedTrend;
    }
    if !(s1 > 0.0) {
        return Verdict::Bounded;
    }
    let growth = s2 / s1;
    if growth >= TREND_FACTOR {
        return Verdict::UnboundedTrend;
    }
    if growth <= FLAT_FACTOR {
        return Verdict::Bounded;
    }
    match s0 {
        Some(s0) if s1 > s0 && (s2 - s1) <= 0.5 * (s1 - s0) => Verdict::Bounded,
        _ => Verdict::Inconclusive,
    }
}

/// Classify one edge run `v[..]`, ordered from the interior toward the edge, where the last
/// `span` steps cover two decades.
fn edge_trend(v: &[f64], span: usize) -> Verdict {
    let n = v.len();
    let run = &v[n - 1 - span..];
    if run.iter().any(|x| x.is_infinite()) {
        return Verdict::UnboundedTrend;
    }
    let monotone = run.windows(2).all(|w| w[1] >= w[0]);
    if !monotone || !(run[0] > 0.0) {
        return Verdict::Bounded;
    }
    let earlier = (n > 2 * span).then(|| v[n - 1 - 2 * span]);
    level_trend(earlier, run[0], run[span])
}

/// Trend verdict for samples on a log grid: both ends are examined, `span` grid steps
/// making up two decades.
pub fn trend(values: &[f64], span: usize) -> Verdict {
    if values.iter().any(|v| v.is_infinite() || v.is_nan()) {
        return Verdict::UnboundedTrend;
    }
    if values.len() < 2 {
        return Verdict::Bounded;
    }
    let k = span.min(values.len() - 1);
    let top = edge_trend(values, k);
    let mut rev = values.to_vec();
    rev.reverse();
    let bottom = edge_trend(&rev, k);
    for v in [Verdict::UnboundedTrend, Verdict::Inconclusive] {
        if top == v || bottom == v {
            return v;
        }
    }
    Verdict::Bounded
}

/// Grid supremum with its location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupEstimate {
    pub sup: f64,
    pub at: f64,
    pub verdict: Verdict,
}

impl SupEstimate {
    /// Supremum of `values` sampled at `points`, with the trend verdict over `span` steps.
    pub fn from_samples(points: &[f64], values: &[f64], span: usize) -> Self {
        let mut best = (f64::NEG_INFINITY, f64::NAN);
        for (&t, &v) in points.iter().zip(values) {
            if v > best.0 || v.is_nan() {
                best = (if v.is_nan() { f64::INFINITY } else { v }, t);
            }
        }
        SupEstimate { sup: best.0, at: best.1, verdict: trend(values, span) }
    }
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd { (c, fc) } else { (d, fd) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_exact() {
        let g = ScanGrid::default();
        let v = g.values();
        assert_eq!(v[0], 1e-6);
        assert_eq!(v[511], 1e6);
        assert_eq!(g.steps_per(2.0), 85);
        assert!(ScanGrid::new(1.0, 10.0, 200).unwrap().validate_for_indices().is_err());
    }

    #[test]
    fn trend_rule() {
        let flat = vec![1.0; 50];
        assert_eq!(trend(&flat, 10), Verdict::Bounded);
        let lin: Vec<f64> = (0..50).map(|i| 1.2f64.powi(i)).collect();
        assert_eq!(trend(&lin, 10), Verdict::UnboundedTrend);
        let slow: Vec<f64> = (0..50).map(|i| 1.0 + 1e-3 * i as f64).collect();
        assert_eq!(trend(&slow, 10), Verdict::Inconclusive);
        let settling: Vec<f64> = (0..50).map(|i| 2.0 - 0.7f64.powi(i)).collect();
        assert_eq!(trend(&settling, 10), Verdict::Bounded);
        let mut down: Vec<f64> = lin.clone();
        down.reverse();
        assert_eq!(trend(&down, 10), Verdict::UnboundedTrend);
        let bump: Vec<f64> = (0..50).map(|i| if i == 25 { 9.0 } else { 1.0 }).collect();
        assert_eq!(trend(&bump, 10), Verdict::Bounded);
    }

    #[test]
    fn golden_section_finds_parabola_min() {
        let (x, fx) = golden_min(|x| (x - 0.3).powi(2) + 1.0, -1.0, 2.0, 100);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-14);
    }
}
