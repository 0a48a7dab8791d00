//! The two shifted dyadic grids `D^β`, β ∈ {0, 1/3}, the one-third cover, and the
//! Hardy-Littlewood and Bergman maximal operators built on them.
//!
//! Grid arithmetic is exact: the left endpoint of `2^{-j}([0,1) + k + (-1)^j β)` is the
//! integer `3k ± b` over `3·2^j`, compared against inputs as rationals.

use crate::error::{Error, Result};
use crate::grid::{ScanGrid, Verdict, TREND_FACTOR};
use crate::growth::{dini_constant, DiniResult, GrowthFunction};
use crate::halfplane::{box_volume, integrate, FnIntegrand, Interval, Measure, QuadratureConfig, Support};
use crate::orlicz::{gauge, LuxemburgResult, SampledFunction};
use crate::quadrature::{integrate_1d, Tolerance};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::f64::consts::PI;

/// Grid shift β.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shift {
    Zero,
    Third,
}

impl Shift {
    pub const BOTH: [Shift; 2] = [Shift::Zero, Shift::Third];

    pub fn value(self) -> f64 {
        match self {
            Shift::Zero => 0.0,
            Shift::Third => 1.0 / 3.0,
        }
    }

    fn thirds(self) -> i128 {
        match self {
            Shift::Zero => 0,
            Shift::Third => 1,
        }
    }
}

/// `2^{-j}([0,1) + k + (-1)^j β)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicInterval {
    pub beta: Shift,
    pub j: i32,
    pub k: i64,
}

/// Finest scale at which [`DyadicInterval::scaled_endpoints`] is defined.
pub const SCALE_EXPONENT: i32 = 40;

/// How two intervals of one grid sit relative to each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Disjoint,
    Equal,
    Contains,
    ContainedIn,
}

fn pow2(e: u32) -> BigInt {
    BigInt::one() << e
}

impl DyadicInterval {
    pub fn new(beta: Shift, j: i32, k: i64) -> Self {
        DyadicInterval { beta, j, k }
    }

    /// Left endpoint times `3·2^j`.
    pub fn numerator(&self) -> i128 {
        let sign = if self.j.rem_euclid(2) == 0 { 1 } else { -1 };
        3 * self.k as i128 + sign * self.beta.thirds()
    }

    fn over_denominator(&self, n: i128) -> BigRational {
        let n = BigInt::from(n);
        if self.j >= 0 {
            BigRational::new(n, BigInt::from(3) * pow2(self.j as u32))
        } else {
            BigRational::new(n * pow2(self.j.unsigned_abs()), BigInt::from(3))
        }
    }

    pub fn left_exact(&self) -> BigRational {
        self.over_denominator(self.numerator())
    }

    pub fn right_exact(&self) -> BigRational {
        self.over_denominator(self.numerator() + 3)
    }

    pub fn left(&self) -> f64 {
        self.numerator() as f64 / 3.0 * 2f64.powi(-self.j)
    }

    pub fn right(&self) -> f64 {
        (self.numerator() + 3) as f64 / 3.0 * 2f64.powi(-self.j)
    }

    pub fn length(&self) -> f64 {
        2f64.powi(-self.j)
    }

    /// Endpoints times `3·2^40`, when `j ≤ 40` and the product fits.
    pub fn scaled_endpoints(&self) -> Option<(i128, i128)> {
        let shift = SCALE_EXPONENT.checked_sub(self.j)?;
        if !(0..=126).contains(&shift) {
            return None;
        }
        let m = 1i128.checked_shl(shift as u32)?;
        let l = self.numerator().checked_mul(m)?;
        let r = (self.numerator() + 3).checked_mul(m)?;
        Some((l, r))
    }

    /// Exact relation between two intervals, in integer arithmetic where it fits.
    pub fn relation(&self, other: &DyadicInterval) -> Relation {
        let (a0, a1, b0, b1) = match (self.scaled_endpoints(), other.scaled_endpoints()) {
            (Some((a0, a1)), Some((b0, b1))) => {
                (BigInt::from(a0), BigInt::from(a1), BigInt::from(b0), BigInt::from(b1))
            }
            _ => {
                // Common denominator 3·2^m for the finer of the two.
                let m = self.j.max(other.j).max(0);
                let scale = |d: &DyadicInterval, n: i128| -> BigInt {
                    (BigRational::from_integer(BigInt::from(3) * pow2(m as u32)) * d.over_denominator(n)).to_integer()
                };
                (
                    scale(self, self.numerator()),
                    scale(self, self.numerator() + 3),
                    scale(other, other.numerator()),
                    scale(other, other.numerator() + 3),
                )
            }
        };
        if a1 <= b0 || b1 <= a0 {
            Relation::Disjoint
        } else if a0 == b0 && a1 == b1 {
            Relation::Equal
        } else if a0 <= b0 && b1 <= a1 {
            Relation::Contains
        } else if b0 <= a0 && a1 <= b1 {
            Relation::ContainedIn
        } else {
            // Overlap without nesting cannot happen within one grid.
            Relation::Disjoint
        }
    }

    /// The interval of scale `j` in grid `beta` containing `x`.
    pub fn containing(beta: Shift, j: i32, x: f64) -> Result<Self> {
        let xr = exact(x)?;
        let s = if j.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let guess = (x * 2f64.powi(j) - s * beta.value()).floor();
        if !guess.is_finite() || guess.abs() > 1e17 {
            return Err(Error::Domain(format!("x = {x} is out of reach at scale {j}")));
        }
        let mut d = DyadicInterval::new(beta, j, guess as i64);
        while d.left_exact() > xr {
            d.k -= 1;
        }
        while d.right_exact() <= xr {
            d.k += 1;
        }
        Ok(d)
    }

    /// The next coarser interval of the same grid containing this one.
    pub fn parent(&self) -> DyadicInterval {
        let s: i64 = if self.j.rem_euclid(2) == 0 { 1 } else { -1 };
        let b = self.beta.thirds() as i64;
        // Children of (j−1, k') start at 2k' − s·b, with s the sign at scale j.
        DyadicInterval::new(self.beta, self.j - 1, (self.k + s * b).div_euclid(2))
    }

    pub fn children(&self) -> [DyadicInterval; 2] {
        let s: i64 = if self.j.rem_euclid(2) == 0 { 1 } else { -1 };
        let b = self.beta.thirds() as i64;
        let first = 2 * self.k + s * b;
        [DyadicInterval::new(self.beta, self.j + 1, first), DyadicInterval::new(self.beta, self.j + 1, first + 1)]
    }

    /// `[a, b) ⊂ J`, exactly.
    pub fn covers(&self, a: f64, b: f64) -> Result<bool> {
        Ok(self.left_exact() <= exact(a)? && exact(b)? <= self.right_exact())
    }
}

fn exact(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidInput(format!("{x} is not a finite number")))
}

/// Order in which scales are tried by [`dyadic_cover_ordered`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverOrder {
    /// Shortest admissible `J` wins.
    #[default]
    SmallestFirst,
    /// Longest admissible `J` wins.
    LargestFirst,
}

/// A `J ∈ D^0 ∪ D^{1/3}` with `I ⊂ J` and `|J| ≤ 6|I|`, shortest first, β = 0 before 1/3.
///
/// ```
/// use carleson::dyadic::{dyadic_cover, Shift};
/// use carleson::halfplane::Interval;
/// let j = dyadic_cover(&Interval::from_endpoints(0.0, 1.0).unwrap()).unwrap();
/// assert_eq!((j.beta, j.j, j.k), (Shift::Zero, 0, 0));
/// ```
pub fn dyadic_cover(i: &Interval) -> Result<DyadicInterval> {
    dyadic_cover_endpoints(i.left(), i.right(), CoverOrder::SmallestFirst)
}

pub fn dyadic_cover_ordered(i: &Interval, order: CoverOrder) -> Result<DyadicInterval> {
    dyadic_cover_endpoints(i.left(), i.right(), order)
}

/// Cover of the half-open interval `[a, b)`.
pub fn dyadic_cover_endpoints(a: f64, b: f64, order: CoverOrder) -> Result<DyadicInterval> {
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(Error::InvalidInput(format!("[{a}, {b}) is not a nonempty finite interval")));
    }
    let len = exact(b)? - exact(a)?;
    let six_len = BigRational::from_integer(BigInt::from(6)) * &len;
    let w = b - a;
    let j_hi = (-w.log2()).floor() as i32 + 1;
    let j_lo = (-(6.0 * w).log2()).ceil() as i32 - 1;
    let mut js: Vec<i32> = (j_lo..=j_hi).collect();
    if order == CoverOrder::SmallestFirst {
        js.reverse();
    }
    for j in js {
        let size = if j >= 0 {
            BigRational::new(BigInt::one(), pow2(j as u32))
        } else {
            BigRational::from_integer(pow2(j.unsigned_abs()))
        };
        if size > six_len || size < len {
            continue;
        }
        for beta in Shift::BOTH {
            let s = if j.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let k0 = (a * 2f64.powi(j) - s * beta.value()).floor() as i64;
            for k in [k0 - 1, k0, k0 + 1] {
                let d = DyadicInterval::new(beta, j, k);
                if d.covers(a, b)? {
                    return Ok(d);
                }
            }
        }
    }
    Err(Error::PreconditionViolation(format!("no dyadic cover found for [{a}, {b})")))
}

/// A function on the line seen through its integrals.
pub trait LineFunction: Sync {
    /// `∫_a^b |f|`.
    fn integral(&self, a: f64, b: f64) -> Result<f64>;
    /// An upper bound for `|f|` on `[a, b)`.
    fn sup_on(&self, _a: f64, _b: f64) -> f64 {
        f64::INFINITY
    }
    /// Points where `f` may jump; used as interval endpoints when searching.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// One piece `h·χ_[a,b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub a: f64,
    pub b: f64,
    pub height: f64,
}

/// `Σ h_i χ_[a_i, b_i)` with disjoint pieces and nonnegative heights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    steps: Vec<Step>,
}

impl StepFunction {
    /// Sorts the pieces and takes `|h|`; overlapping pieces are rejected.
    pub fn new(mut steps: Vec<Step>) -> Result<Self> {
        for s in &steps {
            if !(s.a.is_finite() && s.b.is_finite() && s.b > s.a && s.height.is_finite()) {
                return Err(Error::InvalidInput(format!("bad step {s:?}")));
            }
        }
        steps.sort_by(|x, y| x.a.total_cmp(&y.a));
        if steps.windows(2).any(|w| w[1].a < w[0].b) {
            return Err(Error::InvalidInput("steps overlap".into()));
        }
        let steps = steps
            .into_iter()
            .map(|s| Step { height: s.height.abs(), ..s })
            .filter(|s| s.height > 0.0)
            .collect();
        Ok(StepFunction { steps })
    }

    pub fn indicator(a: f64, b: f64, height: f64) -> Result<Self> {
        StepFunction::new(vec![Step { a, b, height }])
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.steps.partition_point(|s| s.b <= x);
        match self.steps.get(i) {
            Some(s) if s.a <= x => s.height,
            _ => 0.0,
        }
    }

    pub fn sup(&self) -> f64 {
        self.steps.iter().map(|s| s.height).fold(0.0, f64::max)
    }

    /// `c·f`.
    pub fn scaled(&self, c: f64) -> StepFunction {
        self.map_heights(|h| c.abs() * h)
    }

    /// `f^e`.
    pub fn powf(&self, e: f64) -> StepFunction {
        self.map_heights(|h| h.powf(e))
    }

    fn map_heights<F: Fn(f64) -> f64>(&self, f: F) -> StepFunction {
        let steps = self.steps.iter().map(|s| Step { height: f(s.height), ..*s }).filter(|s| s.height > 0.0).collect();
        StepFunction { steps }
    }

    pub fn total_mass(&self) -> f64 {
        self.steps.iter().map(|s| s.height * (s.b - s.a)).sum()
    }

    /// `∫ Φ(f/λ) dx`.
    pub fn modular(&self, phi: &GrowthFunction, lambda: f64) -> f64 {
        self.steps.iter().map(|s| phi.value(s.height / lambda) * (s.b - s.a)).sum()
    }

    /// Luxemburg norm in `L^Φ(ℝ)`, from the exact modular.
    pub fn luxemburg(&self, phi: &GrowthFunction, tol: f64) -> Result<LuxemburgResult> {
        phi.validate()?;
        let m1 = self.modular(phi, 1.0);
        if m1 == 0.0 {
            return Ok(LuxemburgResult { norm: 0.0, modular_at_norm: 0.0, iterations: 0, bracket: (0.0, 0.0) });
        }
        if !m1.is_finite() {
            return Err(Error::NotInSpace(format!("modular of {self:?} is not finite")));
        }
        if let GrowthFunction::Power { p } = phi {
            let n = m1.powf(1.0 / p);
            return Ok(LuxemburgResult { norm: n, modular_at_norm: 1.0, iterations: 0, bracket: (n, n) });
        }
        let a = phi.estimate_indices(&ScanGrid::default())?.lower;
        gauge(|l| Ok(self.modular(phi, l)), m1, a, tol)
    }

    /// The same function as a [`SampledFunction`] on the line.
    pub fn to_sampled(&self) -> SampledFunction {
        let me = self.clone();
        let (x0, x1) = match (self.steps.first(), self.steps.last()) {
            (Some(f), Some(l)) => (f.a, l.b),
            _ => (0.0, 0.0),
        };
        SampledFunction::new(format!("{} steps", self.steps.len()), crate::orlicz::Domain::RealLine, move |x, _| {
            me.eval(x)
        })
        .with_support(Support { x0, x1, y1: f64::INFINITY })
    }

    fn has_break_inside(&self, l: f64, r: f64) -> bool {
        let i = self.steps.partition_point(|s| s.b <= l);
        for s in &self.steps[i..] {
            if s.a >= r {
                break;
            }
            if (s.a > l && s.a < r) || (s.b > l && s.b < r) {
                return true;
            }
        }
        false
    }
}

impl LineFunction for StepFunction {
    fn integral(&self, a: f64, b: f64) -> Result<f64> {
        let i = self.steps.partition_point(|s| s.b <= a);
        let mut acc = 0.0;
        for s in &self.steps[i..] {
            if s.a >= b {
                break;
            }
            acc += s.height * (s.b.min(b) - s.a.max(a)).max(0.0);
        }
        Ok(acc)
    }

    fn sup_on(&self, a: f64, b: f64) -> f64 {
        let i = self.steps.partition_point(|s| s.b <= a);
        self.steps[i..].iter().take_while(|s| s.a < b).map(|s| s.height).fold(0.0, f64::max)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.steps.iter().flat_map(|s| [s.a, s.b]).collect()
    }
}

impl LineFunction for SampledFunction {
    fn integral(&self, a: f64, b: f64) -> Result<f64> {
        let (a, b) = match self.support {
            Some(s) => (a.max(s.x0), b.min(s.x1)),
            None => (a, b),
        };
        if b <= a {
            return Ok(0.0);
        }
        let tol = Tolerance { abs: 1e-14, rel: 1e-11, max_cells: 4000 };
        Ok(integrate_1d(|x| self.eval(x, 0.0), a, b, tol)?.value)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.support.map(|s| vec![s.x0, s.x1]).unwrap_or_default()
    }
}

/// Range of scales `j` (interval length `2^{-j}`) admitted by the dyadic operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleWindow {
    pub j_min: i32,
    pub j_max: i32,
}

impl Default for ScaleWindow {
    fn default() -> Self {
        ScaleWindow { j_min: -40, j_max: 40 }
    }
}

impl ScaleWindow {
    pub fn validate(&self) -> Result<()> {
        if self.j_min > self.j_max || self.j_min < -60 || self.j_max > 60 {
            return Err(Error::InvalidParameter(format!("scale window [{}, {}]", self.j_min, self.j_max)));
        }
        Ok(())
    }
}

/// Which maximal operator to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Variant {
    /// Sup over all intervals containing the point.
    Hl,
    HlDyadic { beta: Shift },
    /// Averages over Carleson boxes `Q_J`, `J ∈ D^β`, against `y^α dx dy`.
    VAlphaDyadic { beta: Shift, alpha: f64 },
}

/// Search settings for maximal functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaximalConfig {
    pub window: ScaleWindow,
    /// Endpoint distances range over `[h_min, h_max]` geometrically.
    pub h_min: f64,
    pub h_max: f64,
    pub mesh_per_decade: usize,
    pub refine_iters: usize,
    pub quadrature: QuadratureConfig,
}

impl Default for MaximalConfig {
    fn default() -> Self {
        MaximalConfig {
            window: ScaleWindow::default(),
            h_min: 1e-6,
            h_max: 1e6,
            mesh_per_decade: 8,
            refine_iters: 60,
            quadrature: QuadratureConfig { rel_tol: 1e-8, ..QuadratureConfig::default() },
        }
    }
}

/// A maximal function value with the interval or box that attains it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaximalValue {
    /// An attained average, hence a lower bound for the supremum.
    pub value: f64,
    /// Improvement found by refining the best mesh interval; zero for dyadic variants,
    /// whose supremum over the window is exact.
    pub gap_estimate: f64,
    pub interval: (f64, f64),
    pub dyadic: Option<DyadicInterval>,
}

/// Hardy-Littlewood maximal function over intervals `[x−u, x+v]` with `u, v` on a
/// geometric mesh plus the jumps of `f`, followed by coordinate-wise golden refinement.
pub fn hl_maximal<F: LineFunction + ?Sized>(f: &F, x: f64, cfg: &MaximalConfig) -> Result<MaximalValue> {
    if !x.is_finite() {
        return Err(Error::InvalidInput(format!("point {x}")));
    }
    if !(cfg.h_min > 0.0 && cfg.h_max > cfg.h_min && cfg.mesh_per_decade > 0) {
        return Err(Error::InvalidParameter("mesh needs 0 < h_min < h_max and a positive density".into()));
    }
    let decades = (cfg.h_max / cfg.h_min).log10();
    let n = (decades * cfg.mesh_per_decade as f64).ceil() as usize;
    let mesh: Vec<f64> = (0..=n).map(|i| cfg.h_min * (cfg.h_max / cfg.h_min).powf(i as f64 / n as f64)).collect();
    let bps = f.breakpoints();
    let mut left: Vec<f64> = std::iter::once(x).chain(mesh.iter().map(|h| x - h)).chain(bps.iter().copied().filter(|&p| p < x)).collect();
    let mut right: Vec<f64> = std::iter::once(x).chain(mesh.iter().map(|h| x + h)).chain(bps.iter().copied().filter(|&p| p > x)).collect();
    left.sort_by(f64::total_cmp);
    left.dedup();
    right.sort_by(f64::total_cmp);
    right.dedup();
    // Integrals from x outward, so short intervals do not suffer cancellation.
    let mut pl = vec![0.0; left.len()];
    for i in (0..left.len() - 1).rev() {
        pl[i] = pl[i + 1] + f.integral(left[i], left[i + 1])?;
    }
    let mut pr = vec![0.0; right.len()];
    for i in 1..right.len() {
        pr[i] = pr[i - 1] + f.integral(right[i - 1], right[i])?;
    }
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for (il, &l) in left.iter().enumerate() {
        for (ir, &r) in right.iter().enumerate() {
            if r > l {
                let avg = (pl[il] + pr[ir]) / (r - l);
                if avg > best.0 {
                    best = (avg, il, ir);
                }
            }
        }
    }
    let (mesh_best, il, ir) = best;
    let avg = |l: f64, r: f64| -> f64 {
        if r <= l {
            return f64::NEG_INFINITY;
        }
        f.integral(l, r).map(|v| v / (r - l)).unwrap_or(f64::NEG_INFINITY)
    };
    let (mut l, mut r, mut value) = (left[il], right[ir], mesh_best);
    if cfg.refine_iters > 0 {
        for _ in 0..2 {
            let lo = left[il.saturating_sub(1)];
            let hi = left[(il + 1).min(left.len() - 1)];
            let (cand, v) = crate::grid::golden_min(|p| -avg(p, r), lo, hi.min(x), cfg.refine_iters);
            if -v > value {
                value = -v;
                l = cand;
            }
            let lo = right[ir.saturating_sub(1)].max(x);
            let hi = right[(ir + 1).min(right.len() - 1)];
            let (cand, v) = crate::grid::golden_min(|p| -avg(l, p), lo, hi, cfg.refine_iters);
            if -v > value {
                value = -v;
                r = cand;
            }
        }
    }
    Ok(MaximalValue { value, gap_estimate: value - mesh_best, interval: (l, r), dyadic: None })
}

/// `sup_{J ∋ x, J ∈ D^β, j_min ≤ j ≤ j_max} |J|^{-1} ∫_J |f|`, exact over the window.
///
/// ```
/// use carleson::dyadic::{dyadic_hl_maximal, ScaleWindow, Shift, StepFunction};
/// let f = StepFunction::indicator(0.0, 1.0, 1.0).unwrap();
/// let m = dyadic_hl_maximal(&f, 2.0, Shift::Zero, ScaleWindow::default()).unwrap();
/// assert_eq!(m.value, 0.25);
/// assert_eq!(m.interval, (0.0, 4.0));
/// ```
pub fn dyadic_hl_maximal<F: LineFunction + ?Sized>(f: &F, x: f64, beta: Shift, window: ScaleWindow) -> Result<MaximalValue> {
    window.validate()?;
    let mut best: Option<(f64, DyadicInterval)> = None;
    for j in window.j_min..=window.j_max {
        let d = DyadicInterval::containing(beta, j, x)?;
        let v = f.integral(d.left(), d.right())? / d.length();
        if best.map_or(true, |(b, _)| v > b) {
            best = Some((v, d));
        }
    }
    let (value, d) = best.expect("window is nonempty");
    Ok(MaximalValue { value, gap_estimate: 0.0, interval: (d.left(), d.right()), dyadic: Some(d) })
}

/// `sup_{J ∈ D^β, z ∈ Q_J} |Q_J|_α^{-1} ∫_{Q_J} g dV_α` at `z = x + iy`, where
/// `Q_J = J × (0, |J|)`. Boxes whose average cannot beat the running best, judged from
/// the total mass of `g`, are skipped.
pub fn bergman_dyadic_maximal(
    g: &SampledFunction,
    x: f64,
    y: f64,
    beta: Shift,
    alpha: f64,
    cfg: &MaximalConfig,
) -> Result<MaximalValue> {
    cfg.window.validate()?;
    if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(Error::InvalidInput(format!("({x}, {y}) is not in the upper half-plane")));
    }
    if !(alpha > -1.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must exceed -1")));
    }
    let mu = Measure::LebesgueAlpha { alpha };
    let total = {
        let mut it = FnIntegrand::new(|a, b| g.eval(a, b));
        if let Some(e) = g.envelope {
            it = it.with_envelope(e);
        }
        if let Some((x0, l)) = g.focus {
            it = it.with_focus(x0, l);
        }
        if let Some(s) = g.support {
            it = it.with_support(s);
        }
        integrate(&mu, &it, &cfg.quadrature).map(|r| r.value).unwrap_or(f64::INFINITY)
    };
    // Finest admissible scale: |J| > y.
    let j_top = ((-y.log2()).ceil() as i32 - 1).min(cfg.window.j_max);
    let mut best: Option<(f64, DyadicInterval)> = None;
    let mut j = j_top;
    while j >= cfg.window.j_min {
        let d = DyadicInterval::containing(beta, j, x)?;
        let side = d.length();
        if side <= y {
            j -= 1;
            continue;
        }
        let vol = box_volume(&Interval::from_endpoints(d.left(), d.right())?, alpha)?;
        if let Some((b, _)) = best {
            if total / vol <= b {
                break;
            }
        }
        let (x0, x1) = match g.support {
            Some(s) => (d.left().max(s.x0), d.right().min(s.x1)),
            None => (d.left(), d.right()),
        };
        let y1 = g.support.map_or(side, |s| side.min(s.y1));
        let mass = if x1 > x0 && y1 > 0.0 {
            let it = FnIntegrand::new(|a, b| g.eval(a, b)).with_support(Support { x0, x1, y1 });
            integrate(&mu, &it, &cfg.quadrature)?.value
        } else {
            0.0
        };
        let v = mass / vol;
        if best.map_or(true, |(b, _)| v > b) {
            best = Some((v, d));
        }
        j -= 1;
    }
    let (value, d) = best.ok_or_else(|| Error::InvalidParameter(format!("no box of the window contains height {y}")))?;
    Ok(MaximalValue { value, gap_estimate: 0.0, interval: (d.left(), d.right()), dyadic: Some(d) })
}

/// Dispatch on [`Variant`]. Line variants read `f` on the real line at `point.0`.
pub fn maximal_value(f: &SampledFunction, point: (f64, f64), variant: Variant, cfg: &MaximalConfig) -> Result<MaximalValue> {
    match variant {
        Variant::Hl => hl_maximal(f, point.0, cfg),
        Variant::HlDyadic { beta } => dyadic_hl_maximal(f, point.0, beta, cfg.window),
        Variant::VAlphaDyadic { beta, alpha } => bergman_dyadic_maximal(f, point.0, point.1, beta, alpha, cfg),
    }
}

/// The dyadic maximal function of a step function, restricted to the window, as a step
/// function. Exact: on a grid interval where `f` has no jump, every finer average equals
/// the value of `f`.
pub fn dyadic_maximal_function(f: &StepFunction, beta: Shift, window: ScaleWindow) -> Result<StepFunction> {
    window.validate()?;
    let (first, last) = match (f.steps.first(), f.steps.last()) {
        (Some(a), Some(b)) => (a.a, b.b),
        _ => return Ok(StepFunction { steps: Vec::new() }),
    };
    let start = DyadicInterval::containing(beta, window.j_min, first)?;
    let mut roots = vec![start];
    let mut d = start;
    while d.right() < last {
        d = DyadicInterval::new(beta, d.j, d.k + 1);
        roots.push(d);
    }
    let mut out = Vec::new();
    for r in roots {
        descend(f, r, 0.0, window.j_max, &mut out)?;
    }
    let mut merged: Vec<Step> = Vec::with_capacity(out.len());
    for s in out {
        match merged.last_mut() {
            Some(m) if m.b == s.a && m.height == s.height => m.b = s.b,
            _ => merged.push(s),
        }
    }
    Ok(StepFunction { steps: merged.into_iter().filter(|s| s.height > 0.0 && s.b > s.a).collect() })
}

fn descend(f: &StepFunction, d: DyadicInterval, above: f64, j_max: i32, out: &mut Vec<Step>) -> Result<()> {
    let (l, r) = (d.left(), d.right());
    let avg = f.integral(l, r)? / d.length();
    let m = above.max(avg);
    if d.j >= j_max || !f.has_break_inside(l, r) {
        out.push(Step { a: l, b: r, height: m });
        return Ok(());
    }
    for c in d.children() {
        descend(f, c, m, j_max, out)?;
    }
    Ok(())
}

/// One row of a weak-type profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakTypeRow {
    pub lambda: f64,
    /// `|{(M g)^γ > λ}|` at the finest scale of the window.
    pub measure: f64,
    /// `1/Φ(λ)`.
    pub bound: f64,
    /// Change of the measure when the finest scale is coarsened by one.
    pub mesh_error: f64,
    /// `mesh_error / bound`.
    pub slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakTypeProfile {
    pub norm: f64,
    pub gamma: f64,
    pub beta: Shift,
    pub rows: Vec<WeakTypeRow>,
    pub verdict: Verdict,
    pub max_slack: f64,
}

/// Level sets of `(M^{D^β}((|f|/‖f‖_Φ)^{1/γ}))^γ` against `1/Φ(λ)`.
pub fn weak_type_profile(
    f: &StepFunction,
    phi: &GrowthFunction,
    gamma: f64,
    lambdas: &[f64],
    beta: Shift,
    window: ScaleWindow,
) -> Result<WeakTypeProfile> {
    window.validate()?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} must be positive")));
    }
    let a = phi.estimate_indices(&ScanGrid::default())?.lower;
    if gamma * a < 1.0 - 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "Φ(t^γ) is not convex: γ·a_Φ = {:.6} < 1",
            gamma * a
        )));
    }
    let norm = f.luxemburg(phi, 1e-13)?.norm;
    if norm == 0.0 {
        return Err(Error::InvalidInput("f vanishes identically".into()));
    }
    let g = f.scaled(1.0 / norm).powf(1.0 / gamma);
    let fine = dyadic_maximal_function(&g, beta, window)?;
    let coarse = dyadic_maximal_function(&g, beta, ScaleWindow { j_max: window.j_max - 1, ..window })?;
    let level = |h: &StepFunction, mu: f64| -> f64 { h.steps.iter().filter(|s| s.height > mu).map(|s| s.b - s.a).sum() };
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidInput(format!("lambda = {lambda}")));
        }
        let mu = lambda.powf(1.0 / gamma);
        let measure = level(&fine, mu);
        let mesh_error = (measure - level(&coarse, mu)).abs();
        let bound = 1.0 / phi.value(lambda);
        let holds = measure <= bound * (1.0 + 1e-12) + mesh_error;
        rows.push(WeakTypeRow { lambda, measure, bound, mesh_error, slack: mesh_error / bound, holds });
    }
    let verdict = if rows.iter().all(|r| r.holds) { Verdict::Pass } else { Verdict::Fail };
    let max_slack = rows.iter().map(|r| r.slack).fold(0.0, f64::max);
    Ok(WeakTypeProfile { norm, gamma, beta, rows, verdict, max_slack })
}

/// `‖M f‖_{Φ₂} / ‖f‖_{Φ₁}` for one witness and one scale window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalRatio {
    pub member: usize,
    pub j_min: i32,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalBoundReport {
    pub verdict: Verdict,
    pub dini: DiniResult,
    pub ratios: Vec<EmpiricalRatio>,
    /// Bounded when the ratios neither spread by [`TREND_FACTOR`] across the family nor grow
    /// by that factor when the window is widened.
    pub empirical: Verdict,
    pub agree: bool,
}

/// Indicators `χ_[0, 2^m)`, `m = -12, -10, …, 12`.
pub fn default_witness_family() -> Vec<StepFunction> {
    (-6..=6).map(|m| StepFunction::indicator(0.0, 2f64.powi(2 * m), 1.0).expect("valid step")).collect()
}

/// Dini criterion for `M: L^{Φ₁} → L^{Φ₂}` corroborated by the dyadic maximal operator on
/// a witness family, under two scale windows `j ≥ -20` and `j ≥ -40`.
pub fn maximal_bound_test(
    phi1: &GrowthFunction,
    phi2: &GrowthFunction,
    family: &[StepFunction],
    beta: Shift,
    grid: &ScanGrid,
) -> Result<MaximalBoundReport> {
    let dini = dini_constant(phi1, phi2, grid)?;
    let windows = [ScaleWindow { j_min: -20, j_max: 40 }, ScaleWindow { j_min: -40, j_max: 40 }];
    let mut ratios = Vec::new();
    for (i, f) in family.iter().enumerate() {
        let n1 = f.luxemburg(phi1, 1e-12)?.norm;
        for w in windows {
            let mf = dyadic_maximal_function(f, beta, w)?;
            let n2 = mf.luxemburg(phi2, 1e-12)?.norm;
            ratios.push(EmpiricalRatio { member: i, j_min: w.j_min, ratio: n2 / n1 });
        }
    }
    let wide: Vec<f64> = ratios.iter().filter(|r| r.j_min == -40).map(|r| r.ratio).collect();
    let narrow: Vec<f64> = ratios.iter().filter(|r| r.j_min == -20).map(|r| r.ratio).collect();
    let (lo, hi) = wide.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    let spread = hi / lo;
    let widening = wide.iter().zip(&narrow).map(|(w, n)| w / n).fold(0.0, f64::max);
    let empirical = if wide.is_empty() {
        Verdict::Inconclusive
    } else if spread >= TREND_FACTOR || widening >= TREND_FACTOR {
        Verdict::UnboundedTrend
    } else {
        Verdict::Bounded
    };
    let agree = dini.verdict == empirical;
    let verdict = match (dini.verdict, agree) {
        (Verdict::Bounded, true) => Verdict::Pass,
        (Verdict::UnboundedTrend, true) => Verdict::Fail,
        _ => Verdict::Inconclusive,
    };
    Ok(MaximalBoundReport { verdict, dini, ratios, empirical, agree })
}

/// `(4/π)·12^{2+α}/(1+α)·max(2^α, (2/3)^α)`: the pointwise domination constant.
pub fn domination_constant(alpha: f64) -> f64 {
    4.0 / PI * 12f64.powf(2.0 + alpha) / (1.0 + alpha) * 2f64.powf(alpha).max((2.0f64 / 3.0).powf(alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominationRow {
    pub x: f64,
    pub y: f64,
    pub lhs: f64,
    pub maximal: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub verdict: Verdict,
    pub max_ratio: f64,
    pub constant: f64,
    pub rows: Vec<DominationRow>,
}

/// `max_z |F(z)|^γ / max_β M^{D^β}_{V_α}(|F|^γ)(z)` over `points`, against
/// [`domination_constant`].
pub fn pointwise_domination_check(
    f: &SampledFunction,
    gamma: f64,
    alpha: f64,
    points: &[(f64, f64)],
    cfg: &MaximalConfig,
) -> Result<DominationReport> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} must be positive")));
    }
    let fg = f.clone();
    let mut g = SampledFunction::new(format!("|{}|^{gamma}", f.label), f.domain, move |x, y| fg.eval(x, y).powf(gamma));
    g.envelope = f.envelope.map(|e| crate::halfplane::Envelope {
        amp: e.amp.powf(gamma),
        kappa: e.kappa * gamma,
        kappa_low: e.kappa_low.map(|k| k * gamma),
        ..e
    });
    g.support = f.support;
    g.focus = f.focus;
    use rayon::prelude::*;
    let rows: Vec<DominationRow> = points
        .par_iter()
        .map(|&(x, y)| -> Result<DominationRow> {
            let lhs = g.eval(x, y);
            let mut maximal = 0.0f64;
            for beta in Shift::BOTH {
                maximal = maximal.max(bergman_dyadic_maximal(&g, x, y, beta, alpha, cfg)?.value);
            }
            let ratio = if lhs == 0.0 { 0.0 } else { lhs / maximal };
            Ok(DominationRow { x, y, lhs, maximal, ratio })
        })
        .collect::<Result<_>>()?;
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let constant = domination_constant(alpha);
    let verdict = if max_ratio <= constant { Verdict::Pass } else { Verdict::Fail };
    Ok(DominationReport { verdict, max_ratio, constant, rows })
}

impl PartialOrd for DyadicInterval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicInterval {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.beta, self.j, self.k).cmp(&(other.beta, other.j, other.k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every `(β, j, k)` with `|J| ≤ 6|I|`, by brute force over a wide k range.
    fn brute_cover(a: f64, b: f64) -> Vec<DyadicInterval> {
        let mut out = Vec::new();
        for j in -10..=30 {
            let len = 2f64.powi(-j);
            if len > 6.0 * (b - a) || len < b - a {
                continue;
            }
            for beta in Shift::BOTH {
                let centre = (a * 2f64.powi(j)).floor() as i64;
                for k in centre - 4..=centre + 4 {
                    let d = DyadicInterval::new(beta, j, k);
                    let (l, r) = (d.left_exact(), d.right_exact());
                    if l <= exact(a).unwrap() && exact(b).unwrap() <= r {
                        out.push(d);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn unit_interval_covers_itself() {
        let d = dyadic_cover_endpoints(0.0, 1.0, CoverOrder::SmallestFirst).unwrap();
        assert_eq!(d, DyadicInterval::new(Shift::Zero, 0, 0));
    }

    #[test]
    fn centred_interval_needs_the_shifted_grid() {
        let d = dyadic_cover_endpoints(0.49, 0.51, CoverOrder::SmallestFirst).unwrap();
        assert_eq!(d, DyadicInterval::new(Shift::Third, 5, 16));
        assert!((d.left() - (16.0 - 1.0 / 3.0) / 32.0).abs() < 1e-15);
        let d = dyadic_cover_endpoints(0.49, 0.51, CoverOrder::LargestFirst).unwrap();
        assert_eq!(d, DyadicInterval::new(Shift::Third, 4, 7));
        assert!((d.left() - (7.0 + 1.0 / 3.0) / 16.0).abs() < 1e-15);
        let all = brute_cover(0.49, 0.51);
        let shortest = all.iter().map(|d| d.j).max().unwrap();
        assert_eq!(shortest, 5);
    }

    #[test]
    fn parent_and_children_nest() {
        for beta in Shift::BOTH {
            for j in -5..6 {
                for k in -7..7 {
                    let d = DyadicInterval::new(beta, j, k);
                    assert_eq!(d.parent().relation(&d), Relation::Contains);
                    for c in d.children() {
                        assert_eq!(c.parent(), d);
                        assert_eq!(d.relation(&c), Relation::Contains);
                    }
                }
            }
        }
    }

    #[test]
    fn containing_is_exact_at_thirds() {
        // 1/3 itself is not a double, so the left endpoint of [1/3, 4/3) lies just off it.
        let d = DyadicInterval::containing(Shift::Third, 0, 0.5).unwrap();
        assert_eq!((d.left(), d.right()), (1.0 / 3.0, 4.0 / 3.0));
        let d = DyadicInterval::containing(Shift::Zero, -2, 2.0).unwrap();
        assert_eq!((d.left(), d.right()), (0.0, 4.0));
        let d = DyadicInterval::containing(Shift::Third, 1, -0.1).unwrap();
        assert!(d.left_exact() <= exact(-0.1).unwrap() && exact(-0.1).unwrap() < d.right_exact());
    }

    #[test]
    fn hl_examples() {
        let f = StepFunction::indicator(0.0, 1.0, 1.0).unwrap();
        let m = hl_maximal(&f, 2.0, &MaximalConfig::default()).unwrap();
        assert!((m.value - 0.5).abs() < 1e-12, "{m:?}");
        assert_eq!(m.interval.0, 0.0);
        let one = SampledFunction::new("1", crate::orlicz::Domain::RealLine, |_, _| 1.0);
        let m = maximal_value(&one, (3.7, 0.0), Variant::Hl, &MaximalConfig::default()).unwrap();
        assert!((m.value - 1.0).abs() < 1e-12, "{m:?}");
        let s = SampledFunction::indicator(0.0, 1.0, 1.0);
        let m = maximal_value(&s, (2.0, 0.0), Variant::HlDyadic { beta: Shift::Zero }, &MaximalConfig::default()).unwrap();
        assert!((m.value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn maximal_function_of_indicator_is_geometric() {
        let f = StepFunction::indicator(0.0, 1.0, 1.0).unwrap();
        let w = ScaleWindow { j_min: -5, j_max: 5 };
        let m = dyadic_maximal_function(&f, Shift::Zero, w).unwrap();
        assert_eq!(m.eval(0.5), 1.0);
        assert_eq!(m.eval(1.5), 0.5);
        assert_eq!(m.eval(3.0), 0.25);
        assert_eq!(m.eval(20.0), 1.0 / 32.0);
        assert_eq!(m.eval(40.0), 0.0);
        for x in [0.3, 1.7, 6.0, 25.0] {
            let p = dyadic_hl_maximal(&f, x, Shift::Zero, w).unwrap().value;
            assert_eq!(m.eval(x), p);
        }
    }

    #[test]
    fn weak_type_for_normalised_indicator() {
        let f = StepFunction::indicator(0.0, 1.0, 1.0).unwrap();
        let lambdas: Vec<f64> = (0..20).map(|i| 0.05 * 1.25f64.powi(i)).collect();
        let p = weak_type_profile(&f, &GrowthFunction::power(2.0), 1.0, &lambdas, Shift::Zero, ScaleWindow::default()).unwrap();
        assert_eq!(p.verdict, Verdict::Pass);
        for r in &p.rows {
            // |{M χ > λ}| = 2^m with 2^{-m} > λ: the largest power of two below 1/λ.
            let expect = if r.lambda >= 1.0 { 0.0 } else { 2f64.powf((1.0 / r.lambda).log2().ceil() - 1.0) };
            assert_eq!(r.measure, expect, "λ = {}", r.lambda);
        }
        let err = weak_type_profile(&f, &GrowthFunction::power(2.0), 0.4, &lambdas, Shift::Zero, ScaleWindow::default());
        assert!(matches!(err, Err(Error::InvalidParameter(m)) if m.contains("γ·a_Φ")));
    }

    #[test]
    fn dini_and_empirical_agree() {
        let fam = default_witness_family();
        let g = ScanGrid::default();
        let p2 = GrowthFunction::power(2.0);
        let r = maximal_bound_test(&p2, &p2, &fam, Shift::Zero, &g).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        let p1 = GrowthFunction::power(1.0);
        let r = maximal_bound_test(&p1, &p1, &fam, Shift::Zero, &g).unwrap();
        assert_eq!(r.verdict, Verdict::Fail, "{:?}", r.ratios);
        let p3 = GrowthFunction::power(3.0);
        let r = maximal_bound_test(&p3, &p2, &fam, Shift::Zero, &g).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn constant_on_box_is_dominated_trivially() {
        let f = SampledFunction::new("1 on box", crate::orlicz::Domain::HalfPlane, |x: f64, y: f64| {
            if (0.0..1.0).contains(&x) && y < 1.0 { 1.0 } else { 0.0 }
        })
        .with_support(Support { x0: 0.0, x1: 1.0, y1: 1.0 });
        let r = pointwise_domination_check(&f, 1.0, 0.0, &[(0.5, 0.5), (0.25, 0.1)], &MaximalConfig::default()).unwrap();
        assert!(r.max_ratio <= 1.0 + 1e-9, "{r:?}");
    }

    #[test]
    fn domination_constant_at_zero() {
        assert!((domination_constant(0.0) - 4.0 / PI * 144.0).abs() < 1e-9);
    }
}
