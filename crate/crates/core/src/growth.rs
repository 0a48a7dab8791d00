//! Growth functions: evaluation, inversion, indices, class membership and transforms.
//!
//! Every family is handled in two coordinate systems. The direct one (`value`,
//! `inverse_value`) is used for ordinary magnitudes; the logarithmic one (`ln_value`,
//! `inverse_ln`) never overflows and is used when exponents are extreme.

use crate::error::{Error, Result};
use crate::grid::{golden_min, level_trend, ScanGrid, SupEstimate, Verdict};
use crate::quadrature::{integrate_1d, Tolerance};
use serde::{Deserialize, Serialize};
use std::f64::consts::E;

/// A continuous increasing bijection of `[0, ∞)` with `Φ(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GrowthFunction {
    /// `t^p`.
    Power { p: f64 },
    /// `t^p (ln(e + t))^a`.
    PowerLog { p: f64, a: f64 },
    /// Continuous piecewise power: `t^{p_0}` below the first breakpoint, then `c_i t^{p_i}`.
    PiecewisePower { breakpoints: Vec<f64>, exponents: Vec<f64> },
    /// Strictly increasing samples, interpolated linearly in log-log coordinates and
    /// extended by the end segments' power laws.
    Tabulated { t: Vec<f64>, phi: Vec<f64> },
    /// `Φ⁻¹`.
    Inverse { of: Box<GrowthFunction> },
    /// `outer ∘ inner⁻¹`.
    ComposeInverse { outer: Box<GrowthFunction>, inner: Box<GrowthFunction> },
    /// `t ↦ Φ(t^s)`.
    PowerSubst { base: Box<GrowthFunction>, s: f64 },
    /// `t ↦ 1/Φ(1/t)`.
    Reciprocal { of: Box<GrowthFunction> },
}

/// What [`GrowthFunction::evaluate`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    Value,
    Derivative,
    SlopeRatio,
}

/// Grid-certified lower and upper indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthIndices {
    pub lower: f64,
    pub upper: f64,
    pub grid: ScanGrid,
}

/// A sup-type constant with its verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantCheck {
    pub verdict: Verdict,
    pub constant: f64,
    /// Point (or first coordinate of the point) where the grid supremum sits.
    pub at: [f64; 2],
    #[serde(default)]
    pub divergent: bool,
}

/// The three auxiliary inequalities behind the refined classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TildeConditions {
    /// `Φ(st) ≤ C Φ(s)Φ(t)` for all `s, t > 0`.
    pub submultiplicative: ConstantCheck,
    /// `Φ(s/t) ≤ C Φ(s)/t^q` for `s, t ≥ 1`, with the upper-type exponent `q = b_Φ`.
    pub upper_quotient: ConstantCheck,
    /// `Φ(s/t) ≤ C s^p/Φ(t)` for `s, t ≥ 1`, with the lower-type exponent `p = a_Φ`.
    pub lower_quotient: ConstantCheck,
    pub in_u_tilde: bool,
    pub in_l_tilde: bool,
}

/// Class membership summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub indices: GrowthIndices,
    /// `Some(b_Φ)` when `a_Φ ≥ 1`.
    pub in_u: Option<f64>,
    /// `Some(a_Φ)` when `b_Φ ≤ 1`.
    pub in_l: Option<f64>,
    pub delta2: ConstantCheck,
    pub nabla2: ConstantCheck,
    pub tilde: TildeConditions,
    pub warnings: Vec<String>,
}

/// Result of [`dini_constant`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiniResult {
    pub verdict: Verdict,
    pub constant: f64,
    pub at: f64,
    /// `∫₀^{t_min} Φ₂(s)/s² ds` diverges.
    pub divergent: bool,
    pub ratios: Vec<(f64, f64)>,
}

const LN_BRACKET: (f64, f64) = (-27.631_021_115_928_547, 27.631_021_115_928_547);

/// `ln(ln(e + e^u))`, stable for large `u`.
fn ln_ln_e_plus_exp(u: f64) -> f64 {
    let inner = if u > 1.0 { u + (1.0 - u).exp().ln_1p() } else { (E + u.exp()).ln() };
    inner.ln()
}

/// Solve `f(u) = target` for increasing `f` on the real line by expanding bisection.
fn solve_increasing<F: Fn(f64) -> f64>(f: F, target: f64, guess: f64) -> f64 {
    if target == f64::INFINITY {
        return f64::INFINITY;
    }
    if target == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let guess = if guess.is_finite() { guess } else { 0.0 };
    let (mut lo, mut hi) = (guess - 1.0, guess + 1.0);
    let mut step = 1.0;
    while f(lo) > target {
        hi = lo;
        lo -= step;
        step *= 2.0;
        if step > 1e6 {
            return f64::NEG_INFINITY;
        }
    }
    step = 1.0;
    while f(hi) < target {
        lo = hi;
        hi += step;
        step *= 2.0;
        if step > 1e6 {
            return f64::INFINITY;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Log-log segment data `(ln t_i, ln Φ_i)` for the piecewise families.
fn log_nodes(f: &GrowthFunction) -> Option<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    match f {
        GrowthFunction::PiecewisePower { breakpoints, exponents } => {
            let lt: Vec<f64> = breakpoints.iter().map(|b| b.ln()).collect();
            let mut lv = Vec::with_capacity(lt.len());
            let mut acc = exponents[0] * lt[0];
            lv.push(acc);
            for i in 1..lt.len() {
                acc += exponents[i] * (lt[i] - lt[i - 1]);
                lv.push(acc);
            }
            Some((lt, lv, exponents.clone()))
        }
        GrowthFunction::Tabulated { t, phi } => {
            let lt: Vec<f64> = t.iter().map(|x| x.ln()).collect();
            let lv: Vec<f64> = phi.iter().map(|x| x.ln()).collect();
            let mut slopes: Vec<f64> = (0..lt.len() - 1)
                .map(|i| (lv[i + 1] - lv[i]) / (lt[i + 1] - lt[i]))
                .collect();
            // exponent list: below-first, between nodes, above-last
            let first = slopes[0];
            let last = slopes[slopes.len() - 1];
            slopes.insert(0, first);
            slopes.push(last);
            Some((lt, lv, slopes))
        }
        _ => None,
    }
}

/// Index `k` of the log-log segment containing `u`: `0` below the first node,
/// `n` above the last one.
fn segment(nodes: &[f64], u: f64) -> usize {
    nodes.partition_point(|&x| x <= u)
}

fn piecewise_ln_value(nodes: &(Vec<f64>, Vec<f64>, Vec<f64>), u: f64) -> f64 {
    let (lt, lv, ex) = nodes;
    let k = segment(lt, u);
    if k == 0 {
        lv[0] + ex[0] * (u - lt[0])
    } else {
        lv[k - 1] + ex[k] * (u - lt[k - 1])
    }
}

fn piecewise_inverse_ln(nodes: &(Vec<f64>, Vec<f64>, Vec<f64>), w: f64) -> f64 {
    let (lt, lv, ex) = nodes;
    let k = segment(lv, w);
    if k == 0 {
        lt[0] + (w - lv[0]) / ex[0]
    } else {
        lt[k - 1] + (w - lv[k - 1]) / ex[k]
    }
}

fn piecewise_slope(nodes: &(Vec<f64>, Vec<f64>, Vec<f64>), u: f64) -> f64 {
    let (lt, _, ex) = nodes;
    ex[segment(lt, u)]
}

impl GrowthFunction {
    pub fn power(p: f64) -> Self {
        GrowthFunction::Power { p }
    }

    pub fn power_log(p: f64, a: f64) -> Self {
        GrowthFunction::PowerLog { p, a }
    }

    /// Check family parameters.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        match self {
            GrowthFunction::Power { p } => {
                if !p.is_finite() || *p <= 0.0 {
                    return bad(format!("power exponent must be positive and finite, got {p}"));
                }
            }
            GrowthFunction::PowerLog { p, a } => {
                if !p.is_finite() || !a.is_finite() || *p <= 0.0 {
                    return bad(format!("power-log parameters must be finite with p > 0, got ({p}, {a})"));
                }
                // t/((e+t)ln(e+t)) < 1, so p + min(a,0) > 0 keeps the slope ratio positive.
                if p + a.min(0.0) <= 0.0 {
                    return bad(format!("power-log with p={p}, a={a} is not increasing"));
                }
            }
            GrowthFunction::PiecewisePower { breakpoints, exponents } => {
                if exponents.len() != breakpoints.len() + 1 || breakpoints.is_empty() {
                    return bad("piecewise power needs one more exponent than breakpoints".into());
                }
                if breakpoints.iter().any(|b| !b.is_finite() || *b <= 0.0)
                    || breakpoints.windows(2).any(|w| w[1] <= w[0])
                {
                    return bad("breakpoints must be positive, finite and strictly increasing".into());
                }
                if exponents.iter().any(|p| !p.is_finite() || *p <= 0.0) {
                    return bad("piecewise exponents must be positive and finite".into());
                }
            }
            GrowthFunction::Tabulated { t, phi } => {
                if t.len() != phi.len() || t.len() < 2 {
                    return bad("tabulated family needs at least two (t, phi) pairs".into());
                }
                let ok = |v: &Vec<f64>| {
                    v.iter().all(|x| x.is_finite() && *x > 0.0) && v.windows(2).all(|w| w[1] > w[0])
                };
                if !ok(t) || !ok(phi) {
                    return bad("tabulated samples must be positive, finite and strictly increasing".into());
                }
            }
            GrowthFunction::Inverse { of } | GrowthFunction::Reciprocal { of } => of.validate()?,
            GrowthFunction::ComposeInverse { outer, inner } => {
                outer.validate()?;
                inner.validate()?;
            }
            GrowthFunction::PowerSubst { base, s } => {
                if !s.is_finite() || *s <= 0.0 {
                    return bad(format!("power substitution exponent must be positive, got {s}"));
                }
                base.validate()?;
            }
        }
        Ok(())
    }

    /// True for families whose inverse is available in closed form.
    pub fn has_closed_form_inverse(&self) -> bool {
        match self {
            GrowthFunction::Power { .. }
            | GrowthFunction::PiecewisePower { .. }
            | GrowthFunction::Tabulated { .. } => true,
            GrowthFunction::PowerLog { .. } => false,
            GrowthFunction::Inverse { of } => of.has_closed_form_value(),
            GrowthFunction::Reciprocal { of } => of.has_closed_form_inverse(),
            GrowthFunction::PowerSubst { base, .. } => base.has_closed_form_inverse(),
            GrowthFunction::ComposeInverse { outer, inner } => {
                outer.has_closed_form_inverse() && inner.has_closed_form_value()
            }
        }
    }

    fn has_closed_form_value(&self) -> bool {
        match self {
            GrowthFunction::Inverse { of } => of.has_closed_form_inverse(),
            GrowthFunction::Reciprocal { of } | GrowthFunction::PowerSubst { base: of, .. } => {
                of.has_closed_form_value()
            }
            GrowthFunction::ComposeInverse { outer, inner } => {
                outer.has_closed_form_value() && inner.has_closed_form_inverse()
            }
            _ => true,
        }
    }

    /// `Φ(t)` for `t ≥ 0`.
    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            GrowthFunction::Power { p } => t.powf(*p),
            GrowthFunction::PowerLog { p, a } => t.powf(*p) * (E + t).ln().powf(*a),
            GrowthFunction::PiecewisePower { .. } | GrowthFunction::Tabulated { .. } => {
                self.ln_value(t.ln()).exp()
            }
            GrowthFunction::Inverse { of } => of.inverse_value(t),
            GrowthFunction::ComposeInverse { outer, inner } => outer.value(inner.inverse_value(t)),
            GrowthFunction::PowerSubst { base, s } => base.value(t.powf(*s)),
            GrowthFunction::Reciprocal { of } => 1.0 / of.value(1.0 / t),
        }
    }

    /// `ln Φ(e^u)`.
    pub fn ln_value(&self, u: f64) -> f64 {
        match self {
            GrowthFunction::Power { p } => p * u,
            GrowthFunction::PowerLog { p, a } => p * u + a * ln_ln_e_plus_exp(u),
            GrowthFunction::PiecewisePower { .. } | GrowthFunction::Tabulated { .. } => {
                piecewise_ln_value(&log_nodes(self).expect("piecewise family"), u)
            }
            GrowthFunction::Inverse { of } => of.inverse_ln(u),
            GrowthFunction::ComposeInverse { outer, inner } => outer.ln_value(inner.inverse_ln(u)),
            GrowthFunction::PowerSubst { base, s } => base.ln_value(s * u),
            GrowthFunction::Reciprocal { of } => -of.ln_value(-u),
        }
    }

    /// `ln Φ⁻¹(e^w)`, with no range restriction.
    pub fn inverse_ln(&self, w: f64) -> f64 {
        match self {
            GrowthFunction::Power { p } => w / p,
            GrowthFunction::PowerLog { p, .. } => solve_increasing(|u| self.ln_value(u), w, w / p),
            GrowthFunction::PiecewisePower { .. } | GrowthFunction::Tabulated { .. } => {
                piecewise_inverse_ln(&log_nodes(self).expect("piecewise family"), w)
            }
            GrowthFunction::Inverse { of } => of.ln_value(w),
            GrowthFunction::ComposeInverse { outer, inner } => inner.ln_value(outer.inverse_ln(w)),
            GrowthFunction::PowerSubst { base, s } => base.inverse_ln(w) / s,
            GrowthFunction::Reciprocal { of } => -of.inverse_ln(-w),
        }
    }

    /// `Φ⁻¹(y)` for `y ≥ 0`, with no range restriction.
    pub fn inverse_value(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        if y == f64::INFINITY {
            return f64::INFINITY;
        }
        match self {
            GrowthFunction::Power { p } => y.powf(1.0 / p),
            GrowthFunction::Inverse { of } => of.value(y),
            GrowthFunction::ComposeInverse { outer, inner } => inner.value(outer.inverse_value(y)),
            GrowthFunction::PowerSubst { base, s } => base.inverse_value(y).powf(1.0 / s),
            GrowthFunction::Reciprocal { of } => 1.0 / of.inverse_value(1.0 / y),
            _ => self.inverse_ln(y.ln()).exp(),
        }
    }

    /// `tΦ'(t)/Φ(t)` for `t > 0`.
    pub fn slope_ratio(&self, t: f64) -> f64 {
        match self {
            GrowthFunction::Power { p } => *p,
            GrowthFunction::PowerLog { p, a } => {
                let l = (E + t).ln();
                p + a * (t / (E + t)) / l
            }
            GrowthFunction::PiecewisePower { .. } | GrowthFunction::Tabulated { .. } => {
                let nodes = log_nodes(self).expect("piecewise family");
                let u = t.ln();
                if let GrowthFunction::Tabulated { .. } = self {
                    // At a sample node use the central difference of the neighbouring samples.
                    let (lt, lv, ex) = &nodes;
                    if let Ok(i) = lt.binary_search_by(|x| x.total_cmp(&u)) {
                        if i > 0 && i + 1 < lt.len() {
                            return (lv[i + 1] - lv[i - 1]) / (lt[i + 1] - lt[i - 1]);
                        }
                        return ex[if i == 0 { 0 } else { ex.len() - 1 }];
                    }
                }
                piecewise_slope(&nodes, u)
            }
            GrowthFunction::Inverse { of } => 1.0 / of.slope_ratio(of.inverse_value(t)),
            GrowthFunction::ComposeInverse { outer, inner } => {
                let u = inner.inverse_value(t);
                outer.slope_ratio(u) / inner.slope_ratio(u)
            }
            GrowthFunction::PowerSubst { base, s } => s * base.slope_ratio(t.powf(*s)),
            GrowthFunction::Reciprocal { of } => of.slope_ratio(1.0 / t),
        }
    }

    /// Evaluate `Φ`, `Φ'` or the slope ratio at `t`.
    ///
    /// ```
    /// use carleson::growth::{EvalMode, GrowthFunction};
    /// let phi = GrowthFunction::power(3.0);
    /// assert_eq!(phi.evaluate(2.0, EvalMode::Derivative).unwrap(), 12.0);
    /// ```
    pub fn evaluate(&self, t: f64, mode: EvalMode) -> Result<f64> {
        self.validate()?;
        if !t.is_finite() {
            return Err(Error::InvalidInput(format!("argument must be finite, got {t}")));
        }
        if t < 0.0 {
            return Err(Error::Domain(format!("growth functions live on [0, inf), got {t}")));
        }
        match mode {
            EvalMode::Value => Ok(self.value(t)),
            _ if t == 0.0 => Err(Error::Domain("derivative modes need t > 0".into())),
            EvalMode::SlopeRatio => Ok(self.slope_ratio(t)),
            EvalMode::Derivative => Ok(self.slope_ratio(t) * self.value(t) / t),
        }
    }

    /// Solve `Φ(t) = y`.
    ///
    /// Closed forms are used where available. Otherwise bisection in `ln t` runs on
    /// `[1e-12, 1e12]` and fails with [`Error::Range`] if `y` lies outside its image.
    pub fn invert(&self, y: f64, tol: f64) -> Result<f64> {
        self.validate()?;
        if !y.is_finite() || y < 0.0 {
            return Err(Error::Domain(format!("inversion needs finite y >= 0, got {y}")));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        if self.has_closed_form_inverse() {
            return Ok(self.inverse_value(y));
        }
        let (mut lo, mut hi) = LN_BRACKET;
        let w = y.ln();
        if self.ln_value(lo) > w || self.ln_value(hi) < w {
            return Err(Error::Range { lo: lo.exp(), hi: hi.exp() });
        }
        let tol = tol.max(f64::EPSILON);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.ln_value(mid) < w {
                lo = mid;
            } else {
                hi = mid;
            }
            let t = (0.5 * (lo + hi)).exp();
            if hi - lo < 1e-12 && (self.value(t) - y).abs() <= tol * y.max(1.0) {
                break;
            }
            if hi - lo < 4.0 * f64::EPSILON * hi.abs().max(1.0) {
                break;
            }
        }
        Ok((0.5 * (lo + hi)).exp())
    }

    /// Extreme slope ratios over `grid`, with golden-section refinement of interior extrema.
    pub fn estimate_indices(&self, grid: &ScanGrid) -> Result<GrowthIndices> {
        grid.validate_for_indices()?;
        self.validate()?;
        let us = grid.log_points();
        let sr: Vec<f64> = us.iter().map(|&u| self.slope_ratio(u.exp())).collect();
        if sr.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::InvalidInput("slope ratio not finite and positive on the grid".into()));
        }
        let refine = |sign: f64| -> f64 {
            let (mut k, mut best) = (0, sign * sr[0]);
            for (i, v) in sr.iter().enumerate() {
                if sign * v < best {
                    best = sign * v;
                    k = i;
                }
            }
            if k > 0 && k + 1 < sr.len() {
                let (_, v) = golden_min(|u| sign * self.slope_ratio(u.exp()), us[k - 1], us[k + 1], 80);
                best = best.min(v);
            }
            sign * best
        };
        Ok(GrowthIndices { lower: refine(1.0), upper: refine(-1.0), grid: *grid })
    }

    /// Full class report on `grid` (2-D checks use a coarser sub-grid of the same range).
    pub fn classify(&self, grid: &ScanGrid) -> Result<ClassReport> {
        let indices = self.estimate_indices(grid)?;
        let in_u = (indices.lower >= 1.0).then_some(indices.upper);
        let in_l = (indices.upper <= 1.0).then_some(indices.lower);
        let pts = grid.values();
        let span = grid.steps_per(2.0);
        let doubling: Vec<f64> = pts.iter().map(|&t| self.value(2.0 * t) / self.value(t)).collect();
        let d2 = SupEstimate::from_samples(&pts, &doubling, span);
        let delta2 = ConstantCheck { verdict: d2.verdict, constant: d2.sup, at: [d2.at, f64::NAN], divergent: false };
        let dini = dini_constant(self, self, grid)?;
        let nabla2 = ConstantCheck {
            verdict: dini.verdict,
            constant: dini.constant,
            at: [dini.at, f64::NAN],
            divergent: dini.divergent,
        };
        let g2 = ScanGrid { points: 97, ..*grid };
        let tilde = self.tilde_conditions(&indices, &g2);
        let mut warnings = Vec::new();
        if let GrowthFunction::Tabulated { .. } = self {
            if indices.upper / indices.lower > 1e3 {
                warnings.push("slope ratio varies by more than three orders of magnitude".to_string());
            }
        }
        Ok(ClassReport { indices, in_u, in_l, delta2, nabla2, tilde, warnings })
    }

    fn tilde_conditions(&self, idx: &GrowthIndices, g: &ScanGrid) -> TildeConditions {
        let all = g.values();
        let ge1: Vec<f64> = all.iter().copied().filter(|&t| t >= 1.0).collect();
        let q = idx.upper;
        let p = idx.lower;
        let submultiplicative = sup_2d(&all, &all, |s, t| self.value(s * t) / (self.value(s) * self.value(t)));
        let upper_quotient = sup_2d(&ge1, &ge1, |s, t| self.value(s / t) * t.powf(q) / self.value(s));
        let lower_quotient = sup_2d(&ge1, &ge1, |s, t| self.value(s / t) * self.value(t) / s.powf(p));
        let in_u_tilde = idx.lower >= 1.0 && submultiplicative.verdict.is_positive() && upper_quotient.verdict.is_positive();
        let in_l_tilde = idx.upper <= 1.0 && submultiplicative.verdict.is_positive() && lower_quotient.verdict.is_positive();
        TildeConditions { submultiplicative, upper_quotient, lower_quotient, in_u_tilde, in_l_tilde }
    }
}

/// Grid supremum of `f(s, t)` over `xs × ys`.
///
/// The verdict applies [`level_trend`] to the suprema over the grid shrunk by four, two
/// and zero decades at every edge (edges of a range narrower than the shrink are kept).
pub fn sup_2d<F: Fn(f64, f64) -> f64>(xs: &[f64], ys: &[f64], f: F) -> ConstantCheck {
    if xs.is_empty() || ys.is_empty() {
        return ConstantCheck { verdict: Verdict::Inconclusive, constant: f64::NAN, at: [f64::NAN; 2], divergent: false };
    }
    let (x0, x1) = (xs[0], xs[xs.len() - 1]);
    let (y0, y1) = (ys[0], ys[ys.len() - 1]);
    let keep = |v: f64, lo: f64, hi: f64, dec: f64| {
        let m = 10f64.powf(dec);
        hi / lo < m * m * 1.000_001 || (v >= lo * m * 0.999_999 && v <= hi / m * 1.000_001)
    };
    let mut best = (f64::NEG_INFINITY, [f64::NAN; 2]);
    let mut levels = [f64::NEG_INFINITY; 2];
    for &s in xs {
        for &t in ys {
            let mut v = f(s, t);
            if v.is_nan() {
                v = f64::INFINITY;
            }
            if v > best.0 {
                best = (v, [s, t]);
            }
            for (k, dec) in [4.0, 2.0].into_iter().enumerate() {
                if keep(s, x0, x1, dec) && keep(t, y0, y1, dec) && v > levels[k] {
                    levels[k] = v;
                }
            }
        }
    }
    let s0 = levels[0].is_finite().then_some(levels[0]);
    let verdict = level_trend(s0, levels[1], best.0);
    ConstantCheck { verdict, constant: best.0, at: best.1, divergent: false }
}

/// `Φ₂ ∘ Φ₁⁻¹`, simplified for powers.
///
/// ```
/// use carleson::growth::{compose_inverse, GrowthFunction};
/// let f = compose_inverse(&GrowthFunction::power(4.0), &GrowthFunction::power(2.0));
/// assert_eq!(f, GrowthFunction::power(2.0));
/// ```
pub fn compose_inverse(outer: &GrowthFunction, inner: &GrowthFunction) -> GrowthFunction {
    match (outer, inner) {
        (GrowthFunction::Power { p: a }, GrowthFunction::Power { p: b }) => GrowthFunction::power(a / b),
        _ => GrowthFunction::ComposeInverse { outer: Box::new(outer.clone()), inner: Box::new(inner.clone()) },
    }
}

/// `t ↦ Φ(t^s)`.
pub fn power_subst(phi: &GrowthFunction, s: f64) -> GrowthFunction {
    match phi {
        GrowthFunction::Power { p } => GrowthFunction::power(p * s),
        GrowthFunction::PowerSubst { base, s: r } => power_subst(base, r * s),
        _ => GrowthFunction::PowerSubst { base: Box::new(phi.clone()), s },
    }
}

/// `t ↦ 1/Φ(1/t)`.
pub fn reciprocal(phi: &GrowthFunction) -> GrowthFunction {
    match phi {
        GrowthFunction::Power { .. } => phi.clone(),
        GrowthFunction::Reciprocal { of } => (**of).clone(),
        _ => GrowthFunction::Reciprocal { of: Box::new(phi.clone()) },
    }
}

/// `Φ⁻¹` as a growth function in its own right.
pub fn inverse(phi: &GrowthFunction) -> GrowthFunction {
    match phi {
        GrowthFunction::Power { p } => GrowthFunction::power(1.0 / p),
        GrowthFunction::Inverse { of } => (**of).clone(),
        _ => GrowthFunction::Inverse { of: Box::new(phi.clone()) },
    }
}

/// The family of transforms accepted by [`transform`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Transform {
    ComposeInverse { outer: GrowthFunction, inner: GrowthFunction },
    PowerSubst { phi: GrowthFunction, s: f64 },
    Reciprocal { phi: GrowthFunction },
    Inverse { phi: GrowthFunction },
}

/// Build the transformed growth function after validating its constituents.
pub fn transform(kind: &Transform) -> Result<GrowthFunction> {
    let out = match kind {
        Transform::ComposeInverse { outer, inner } => compose_inverse(outer, inner),
        Transform::PowerSubst { phi, s } => {
            if !(*s > 0.0) {
                return Err(Error::InvalidParameter(format!("power substitution needs s > 0, got {s}")));
            }
            power_subst(phi, *s)
        }
        Transform::Reciprocal { phi } => reciprocal(phi),
        Transform::Inverse { phi } => inverse(phi),
    };
    out.validate()?;
    Ok(out)
}

/// Pass iff `Φ₂/Φ₁` is non-decreasing on the grid up to relative slack `1e-9`.
pub fn quotient_monotone(phi1: &GrowthFunction, phi2: &GrowthFunction, grid: &ScanGrid) -> Verdict {
    let ratios: Vec<f64> = grid
        .log_points()
        .iter()
        .map(|&u| phi2.ln_value(u) - phi1.ln_value(u))
        .collect();
    // Work with log-ratios: non-decreasing within relative 1e-9 means a drop of at most ln(1+1e-9).
    let slack = 1e-9f64.ln_1p();
    if ratios.windows(2).all(|w| w[1] >= w[0] - slack) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Grid supremum of `Φ(s/t)Φ(t)/Φ(s)`.
pub fn quotient_bound_check(phi: &GrowthFunction, grid: &ScanGrid) -> ConstantCheck {
    let v = grid.values();
    sup_2d(&v, &v, |s, t| (phi.ln_value((s / t).ln()) + phi.ln_value(t.ln()) - phi.ln_value(s.ln())).exp())
}

/// `(∫₀ᵗ Φ₂(s)/s² ds)·t/Φ₁(t)` on the grid, with its supremum and trend verdict.
///
/// The integral is accumulated segment by segment in the variable `ln s`; below the first
/// grid point `Φ₂` is extended by its local power law, which certifies divergence when the
/// local exponent is at most one.
pub fn dini_constant(phi1: &GrowthFunction, phi2: &GrowthFunction, grid: &ScanGrid) -> Result<DiniResult> {
    grid.validate()?;
    let us = grid.log_points();
    let pts = grid.values();
    let t0 = pts[0];
    let r = phi2.slope_ratio(t0);
    if r <= 1.0 + 1e-12 {
        let ratios = pts.iter().map(|&t| (t, f64::INFINITY)).collect();
        return Ok(DiniResult { verdict: Verdict::UnboundedTrend, constant: f64::INFINITY, at: t0, divergent: true, ratios });
    }
    let mut acc = phi2.value(t0) / (t0 * (r - 1.0));
    let tol = Tolerance { abs: 0.0, rel: 1e-13, max_cells: 200 };
    let mut vals = Vec::with_capacity(pts.len());
    for i in 0..pts.len() {
        if i > 0 {
            let seg = integrate_1d(|u| (phi2.ln_value(u) - u).exp(), us[i - 1], us[i], tol)
                .or_else(|e| match e {
                    Error::AccuracyFailure { partial, .. } => Ok(crate::quadrature::Estimate { value: partial, error: 0.0 }),
                    other => Err(other),
                })?;
            acc += seg.value;
        }
        let t = pts[i];
        vals.push(acc * t / phi1.value(t));
    }
    let est = SupEstimate::from_samples(&pts, &vals, grid.steps_per(2.0));
    Ok(DiniResult {
        verdict: est.verdict,
        constant: est.sup,
        at: est.at,
        divergent: false,
        ratios: pts.into_iter().zip(vals).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pl() -> GrowthFunction {
        GrowthFunction::power_log(2.0, 1.0)
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(GrowthFunction::power(2.0).evaluate(3.0, EvalMode::Value).unwrap(), 9.0);
        assert_eq!(GrowthFunction::power(3.0).evaluate(2.0, EvalMode::Derivative).unwrap(), 12.0);
        assert_eq!(GrowthFunction::power(2.5).evaluate(7.0, EvalMode::SlopeRatio).unwrap(), 2.5);
        assert!(matches!(GrowthFunction::power(2.0).evaluate(0.0, EvalMode::Derivative), Err(Error::Domain(_))));
        assert!(matches!(GrowthFunction::power(f64::NAN).evaluate(1.0, EvalMode::Value), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(GrowthFunction::power(2.0).invert(9.0, 1e-12).unwrap(), 3.0);
        assert_eq!(GrowthFunction::power(1.0).invert(5.0, 1e-12).unwrap(), 5.0);
        let y = 4.0 * (E + 2.0).ln();
        assert_relative_eq!(pl().invert(y, 1e-12).unwrap(), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn invert_reports_bracket() {
        match pl().invert(1e40, 1e-12) {
            Err(Error::Range { lo, hi }) => {
                assert_relative_eq!(lo, 1e-12, max_relative = 1e-12);
                assert_relative_eq!(hi, 1e12, max_relative = 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn power_log_derivative_matches_finite_difference() {
        let f = pl();
        for &t in &[0.01, 0.7, 3.0, 150.0] {
            let h = t * 1e-6;
            let fd = (f.value(t + h) - f.value(t - h)) / (2.0 * h);
            let d = f.evaluate(t, EvalMode::Derivative).unwrap();
            assert_relative_eq!(d, fd, max_relative = 1e-8);
        }
    }

    #[test]
    fn index_examples() {
        let g = ScanGrid::default();
        let i = GrowthFunction::power(2.0).estimate_indices(&g).unwrap();
        assert_eq!((i.lower, i.upper), (2.0, 2.0));
        let inv = inverse(&GrowthFunction::power(4.0));
        let i = inv.estimate_indices(&g).unwrap();
        assert_eq!((i.lower, i.upper), (0.25, 0.25));
        let i = pl().estimate_indices(&g).unwrap();
        assert!((i.lower - 2.0).abs() < 1e-3);
        assert!(i.upper > 2.0);
        // the interior maximum of 2 + t/((e+t)ln(e+t))
        let (_, m) = golden_min(|u| -pl().slope_ratio(u.exp()), -2.0, 4.0, 200);
        assert_relative_eq!(i.upper, -m, max_relative = 1e-12);
    }

    #[test]
    fn classify_examples() {
        let g = ScanGrid::default();
        let c = GrowthFunction::power(2.0).classify(&g).unwrap();
        assert_eq!(c.in_u, Some(2.0));
        assert_eq!(c.in_l, None);
        assert_eq!(c.nabla2.verdict, Verdict::Bounded);
        assert_relative_eq!(c.nabla2.constant, 1.0, max_relative = 1e-12);
        assert_relative_eq!(c.delta2.constant, 4.0, max_relative = 1e-12);

        let c = GrowthFunction::power(1.0).classify(&g).unwrap();
        assert_eq!(c.in_u, Some(1.0));
        assert_eq!(c.in_l, Some(1.0));
        assert!(c.nabla2.divergent);
        assert_eq!(c.nabla2.verdict, Verdict::UnboundedTrend);

        let c = GrowthFunction::power(0.5).classify(&g).unwrap();
        assert_eq!(c.in_l, Some(0.5));
        assert_eq!(c.in_u, None);
        assert_relative_eq!(c.tilde.submultiplicative.constant, 1.0, max_relative = 1e-12);
        assert!(c.tilde.in_l_tilde);

        // t^2 ln(e+t) is in U but the quotient condition fails: the log factor is not
        // absorbed by t^q with q = b_Φ > 2.
        let c = pl().classify(&g).unwrap();
        assert!(c.in_u.is_some());
        assert!(c.tilde.submultiplicative.verdict.is_positive());
        assert!(!c.tilde.in_u_tilde, "{:?}", c.tilde);
        let c = GrowthFunction::power(3.0).classify(&g).unwrap();
        assert!(c.tilde.in_u_tilde);
    }

    #[test]
    fn transform_examples() {
        let p = GrowthFunction::power;
        assert_eq!(transform(&Transform::ComposeInverse { outer: p(4.0), inner: p(2.0) }).unwrap(), p(2.0));
        let f = transform(&Transform::PowerSubst { phi: p(3.0), s: 2.0 }).unwrap();
        assert_eq!(f, p(6.0));
        let i = f.estimate_indices(&ScanGrid::default()).unwrap();
        assert_eq!((i.lower, i.upper), (6.0, 6.0));
        assert_eq!(transform(&Transform::Reciprocal { phi: p(2.7) }).unwrap(), p(2.7));
        assert!(transform(&Transform::PowerSubst { phi: p(3.0), s: 0.0 }).is_err());
    }

    #[test]
    fn composite_inverses_round_trip() {
        let fams = vec![
            GrowthFunction::ComposeInverse { outer: Box::new(pl()), inner: Box::new(GrowthFunction::power(1.5)) },
            GrowthFunction::PowerSubst { base: Box::new(pl()), s: 0.7 },
            GrowthFunction::Reciprocal { of: Box::new(pl()) },
            GrowthFunction::Inverse { of: Box::new(pl()) },
        ];
        for f in fams {
            for &t in &[1e-3f64, 0.2, 1.0, 7.0, 1e3] {
                let y = f.value(t);
                assert_relative_eq!(f.inverse_value(y), t, max_relative = 1e-11);
                assert_relative_eq!(f.ln_value(t.ln()).exp(), y, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn composite_slope_ratio_matches_log_derivative() {
        let fams = vec![
            GrowthFunction::ComposeInverse { outer: Box::new(pl()), inner: Box::new(GrowthFunction::power(1.5)) },
            GrowthFunction::PowerSubst { base: Box::new(pl()), s: 0.7 },
            GrowthFunction::Reciprocal { of: Box::new(pl()) },
            GrowthFunction::Inverse { of: Box::new(pl()) },
        ];
        for f in fams {
            for &t in &[1e-3f64, 0.2, 1.0, 7.0, 1e3] {
                let u = t.ln();
                let h = 1e-5;
                let fd = (f.ln_value(u + h) - f.ln_value(u - h)) / (2.0 * h);
                assert_relative_eq!(f.slope_ratio(t), fd, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn piecewise_and_tabulated() {
        let f = GrowthFunction::PiecewisePower { breakpoints: vec![1.0, 10.0], exponents: vec![1.0, 2.0, 1.5] };
        f.validate().unwrap();
        assert_relative_eq!(f.value(0.5), 0.5, max_relative = 1e-14);
        assert_relative_eq!(f.value(3.0), 9.0, max_relative = 1e-14);
        assert_relative_eq!(f.value(40.0), 100.0 * 4f64.powf(1.5), max_relative = 1e-14);
        assert_relative_eq!(f.inverse_value(f.value(40.0)), 40.0, max_relative = 1e-14);
        let i = f.estimate_indices(&ScanGrid::default()).unwrap();
        assert_eq!((i.lower, i.upper), (1.0, 2.0));

        let tab = GrowthFunction::Tabulated { t: vec![1.0, 2.0, 4.0], phi: vec![1.0, 4.0, 16.0] };
        assert_relative_eq!(tab.value(3.0), 9.0, max_relative = 1e-14);
        assert_relative_eq!(tab.value(100.0), 1e4, max_relative = 1e-12);
        assert_relative_eq!(tab.slope_ratio(2.0), 2.0, max_relative = 1e-14);
        assert!(GrowthFunction::Tabulated { t: vec![1.0, 1.0], phi: vec![1.0, 2.0] }.validate().is_err());
    }

    #[test]
    fn quotient_monotone_examples() {
        let g = ScanGrid::default();
        let p = GrowthFunction::power;
        assert_eq!(quotient_monotone(&p(2.0), &p(4.0), &g), Verdict::Pass);
        assert_eq!(quotient_monotone(&p(4.0), &p(2.0), &g), Verdict::Fail);
        assert_eq!(quotient_monotone(&p(1.0), &GrowthFunction::power_log(1.0, 1.0), &g), Verdict::Pass);
    }

    #[test]
    fn dini_examples() {
        let g = ScanGrid::default();
        let p = GrowthFunction::power;
        let d = dini_constant(&p(2.0), &p(2.0), &g).unwrap();
        assert_relative_eq!(d.constant, 1.0, max_relative = 1e-9);
        assert_eq!(d.verdict, Verdict::Bounded);
        let d = dini_constant(&p(1.0), &p(2.0), &g).unwrap();
        assert_eq!(d.verdict, Verdict::UnboundedTrend);
        let d = dini_constant(&p(1.5), &p(1.5), &g).unwrap();
        assert_relative_eq!(d.constant, 2.0, max_relative = 1e-9);
        assert_eq!(d.verdict, Verdict::Bounded);
    }

    #[test]
    fn quotient_bound_examples() {
        let g = ScanGrid { points: 61, ..ScanGrid::default() };
        assert_relative_eq!(quotient_bound_check(&GrowthFunction::power(2.0), &g).constant, 1.0, max_relative = 1e-12);
        assert_relative_eq!(quotient_bound_check(&GrowthFunction::power(0.5), &g).constant, 1.0, max_relative = 1e-12);
        // Φ(s/t)Φ(t)/Φ(s) ~ ln(e+t) as s → 0: finite on the grid, but growing.
        let c = quotient_bound_check(&pl(), &g);
        assert!(c.constant.is_finite());
        assert_eq!(c.at, [1e-6, 1e6]);
        assert_ne!(c.verdict, Verdict::Bounded);
    }

    #[test]
    fn serde_shape() {
        let f: GrowthFunction = serde_json::from_str(r#"{"family":"power_log","p":2,"a":1}"#).unwrap();
        assert_eq!(f, pl());
    }
}
