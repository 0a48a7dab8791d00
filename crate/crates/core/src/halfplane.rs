//! Intervals, Carleson squares, measures on the upper half-plane and integration against them.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::growth::GrowthFunction;
use crate::quadrature::{integrate_2d, Tolerance};
use crate::special::beta_value;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// A bounded interval of the real line, stored by centre and length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub center: f64,
    pub length: f64,
}

impl Interval {
    pub fn new(center: f64, length: f64) -> Result<Self> {
        if !center.is_finite() || !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "interval needs finite centre and positive length, got ({center}, {length})"
            )));
        }
        Ok(Interval { center, length })
    }

    pub fn from_endpoints(a: f64, b: f64) -> Result<Self> {
        Interval::new(0.5 * (a + b), b - a)
    }

    pub fn left(&self) -> f64 {
        self.center - 0.5 * self.length
    }

    pub fn right(&self) -> f64 {
        self.center + 0.5 * self.length
    }
}

/// `Q_I = {x + iy : x ∈ I, 0 < y < |I|}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlesonSquare {
    pub base: Interval,
}

impl CarlesonSquare {
    pub fn new(base: Interval) -> Self {
        CarlesonSquare { base }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.base.left() && x <= self.base.right() && y > 0.0 && y < self.base.length
    }
}

/// Weighted area of `Q_I` under `y^α dx dy`: `|I|^{2+α}/(1+α)`.
///
/// ```
/// use carleson::halfplane::{box_volume, Interval};
/// let i = Interval::new(0.0, 2.0).unwrap();
/// assert_eq!(box_volume(&i, 0.0).unwrap(), 4.0);
/// ```
pub fn box_volume(i: &Interval, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(i.length.powf(2.0 + alpha) / (1.0 + alpha))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("weight exponent must exceed -1, got {alpha}")));
    }
    Ok(())
}

/// A point mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub y: f64,
    pub mass: f64,
}

/// Density of an absolutely continuous measure.
#[derive(Debug, Clone)]
pub enum Density {
    /// Parsed expression in `x, y`.
    Expression { expr: Arc<Expr>, source: String },
    /// `1/(y² Φ(1/y^s))`.
    Canonical { phi: GrowthFunction, s: f64 },
}

impl Density {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Density::Expression { expr, .. } => expr.eval(x, y, 0.0),
            Density::Canonical { phi, s } => {
                let ly = y.ln();
                (-2.0 * ly - phi.ln_value(-s * ly)).exp()
            }
        }
    }

    /// Local power `γ` with `density ≈ y^γ` as `y → 0`, used to grade the vertical mesh.
    fn exponent_near_zero(&self) -> f64 {
        let g = match self {
            Density::Canonical { phi, s } => s * phi.slope_ratio(1e8) - 2.0,
            Density::Expression { .. } => {
                let (a, b) = (self.eval(0.0, 1e-8), self.eval(0.0, 1e-6));
                (b / a).ln() / 100f64.ln()
            }
        };
        if g.is_finite() { g } else { 0.0 }
    }
}

/// A positive Borel measure on the upper half-plane.
#[derive(Debug, Clone)]
pub enum Measure {
    /// `y^α dx dy`.
    LebesgueAlpha { alpha: f64 },
    Density(Density),
    Atomic(Vec<Atom>),
}

impl Measure {
    pub fn validate(&self) -> Result<()> {
        match self {
            Measure::LebesgueAlpha { alpha } => check_alpha(*alpha),
            Measure::Density(Density::Canonical { phi, s }) => {
                phi.validate()?;
                if !(*s > 0.0) {
                    return Err(Error::InvalidParameter(format!("canonical exponent must be positive, got {s}")));
                }
                Ok(())
            }
            Measure::Density(Density::Expression { .. }) => Ok(()),
            Measure::Atomic(atoms) => {
                for a in atoms {
                    if !(a.mass > 0.0 && a.y > 0.0) || !a.x.is_finite() || !a.y.is_finite() || !a.mass.is_finite() {
                        return Err(Error::InvalidInput(format!("atom must sit in the half-plane with positive mass: {a:?}")));
                    }
                }
                Ok(())
            }
        }
    }

    /// Weight against `dx dy` at `(x, y)`; `None` for atomic measures.
    pub fn weight(&self, x: f64, y: f64) -> Option<f64> {
        match self {
            Measure::LebesgueAlpha { alpha } => Some(if *alpha == 0.0 { 1.0 } else { y.powf(*alpha) }),
            Measure::Density(d) => Some(d.eval(x, y)),
            Measure::Atomic(_) => None,
        }
    }

    fn exponent_near_zero(&self) -> f64 {
        match self {
            Measure::LebesgueAlpha { alpha } => *alpha,
            Measure::Density(d) => d.exponent_near_zero(),
            Measure::Atomic(_) => 0.0,
        }
    }
}

/// Two-sided power-decay envelope around `z₀ = x₀ + iy₀`:
/// `amp_low·(y₀/|ω−z̄₀|)^{κ_low} ≤ f(ω) ≤ amp·(y₀/|ω−z̄₀|)^κ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub x0: f64,
    pub y0: f64,
    pub amp: f64,
    pub kappa: f64,
    /// Decay exponent of a matching lower bound, if one is known.
    pub kappa_low: Option<f64>,
}

/// Axis-aligned box outside which the integrand vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Support {
    pub x0: f64,
    pub x1: f64,
    pub y1: f64,
}

/// A nonnegative function on the upper half-plane with optional structural hints.
pub trait Integrand: Sync {
    fn eval(&self, x: f64, y: f64) -> f64;
    /// Centre and length scale where the mass concentrates.
    fn focus(&self) -> Option<(f64, f64)> {
        self.envelope().map(|e| (e.x0, e.y0))
    }
    fn envelope(&self) -> Option<Envelope> {
        None
    }
    fn support(&self) -> Option<Support> {
        None
    }
}

/// Closure-backed integrand with builder-style hints.
pub struct FnIntegrand<F> {
    f: F,
    focus: Option<(f64, f64)>,
    envelope: Option<Envelope>,
    support: Option<Support>,
}

impl<F: Fn(f64, f64) -> f64 + Sync> FnIntegrand<F> {
    pub fn new(f: F) -> Self {
        FnIntegrand { f, focus: None, envelope: None, support: None }
    }

    pub fn with_focus(mut self, x0: f64, scale: f64) -> Self {
        self.focus = Some((x0, scale));
        self
    }

    pub fn with_envelope(mut self, e: Envelope) -> Self {
        self.envelope = Some(e);
        self
    }

    pub fn with_support(mut self, s: Support) -> Self {
        self.support = Some(s);
        self
    }
}

impl<F: Fn(f64, f64) -> f64 + Sync> Integrand for FnIntegrand<F> {
    fn eval(&self, x: f64, y: f64) -> f64 {
        (self.f)(x, y)
    }
    fn focus(&self) -> Option<(f64, f64)> {
        self.focus.or_else(|| self.envelope.map(|e| (e.x0, e.y0)))
    }
    fn envelope(&self) -> Option<Envelope> {
        self.envelope
    }
    fn support(&self) -> Option<Support> {
        self.support
    }
}

/// Where to cut the half-plane; `None` means the full unbounded direction, handled by a
/// change of variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub x_half_width: Option<f64>,
    pub y_min: f64,
    pub y_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub truncation: Truncation,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-13,
            rel_tol: 1e-9,
            truncation: Truncation { x_half_width: None, y_min: 0.0, y_max: None },
            max_subdivisions: 20_000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol >= 0.0 && self.rel_tol >= 0.0 && self.abs_tol + self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be nonnegative and not both zero".into()));
        }
        let t = self.truncation;
        if !(t.y_min >= 0.0) || t.x_half_width.is_some_and(|w| !(w > 0.0)) || t.y_max.is_some_and(|m| !(m > t.y_min)) {
            return Err(Error::InvalidParameter(format!("invalid truncation {t:?}")));
        }
        Ok(())
    }
}

/// How an integral was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Finite sum over atoms.
    Atomic,
    /// Quadrature over the declared support box.
    Support,
    /// Quadrature over the whole half-plane through a change of variables.
    Mapped,
    /// Quadrature over a truncated box plus an analytic tail bound.
    Truncated,
    /// Quadrature over a truncated box with no tail control.
    TruncatedUnbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    /// Quadrature error plus the tail bound, when one is available.
    pub error_estimate: f64,
    pub tail_bound: f64,
    pub strategy: Strategy,
}

/// Upper bound for `∫ A(y₀/|ω−z̄₀|)^κ dV_α` outside `|x−x₀| ≤ X, y_min ≤ y ≤ Y`.
fn tail_bound(e: &Envelope, alpha: f64, x_half: Option<f64>, y_min: f64, y_max: Option<f64>) -> f64 {
    let (k, a) = (e.kappa, alpha);
    if k <= a + 2.0 {
        return f64::INFINITY;
    }
    let scale = e.amp * e.y0.powf(k);
    let mut tail = 0.0;
    if let Some(x) = x_half {
        let b = beta_value(1.0 + a, k - a - 1.0).unwrap_or(f64::INFINITY);
        tail += 2f64.powf(k / 2.0) * b * 2.0 * x.powf(a + 2.0 - k) / (k - a - 2.0);
    }
    let bl = beta_value(0.5, (k - 1.0) / 2.0).unwrap_or(f64::INFINITY);
    if let Some(y) = y_max {
        tail += bl * y.powf(a + 2.0 - k) / (k - a - 2.0);
    }
    if y_min > 0.0 {
        tail += bl * e.y0.powf(1.0 - k) * y_min.powf(1.0 + a) / (1.0 + a);
    }
    scale * tail
}

/// Change of variables from `[0,1]` to one coordinate axis.
#[derive(Clone, Copy)]
enum AxisMap {
    Affine { lo: f64, hi: f64 },
    /// `lo + (hi - lo) b^m`, clustering nodes at `lo`.
    Graded { lo: f64, hi: f64, m: f64 },
    /// `c + L tan(π(a - 1/2))` onto the real line.
    Cauchy { c: f64, l: f64 },
    /// `lo + L (b/(1-b))^m` onto `[lo, ∞)`.
    HalfLine { lo: f64, l: f64, m: f64 },
}

impl AxisMap {
    /// Coordinate and Jacobian.
    fn apply(&self, s: f64) -> (f64, f64) {
        match *self {
            AxisMap::Affine { lo, hi } => (lo + (hi - lo) * s, hi - lo),
            AxisMap::Graded { lo, hi, m } => (lo + (hi - lo) * s.powf(m), (hi - lo) * m * s.powf(m - 1.0)),
            AxisMap::Cauchy { c, l } => {
                let th = PI * (s - 0.5);
                let (sn, cs) = th.sin_cos();
                (c + l * sn / cs, l * PI / (cs * cs))
            }
            AxisMap::HalfLine { lo, l, m } => {
                let r = s / (1.0 - s);
                (lo + l * r.powf(m), l * m * r.powf(m - 1.0) / ((1.0 - s) * (1.0 - s)))
            }
        }
    }
}

/// Integrate `f` against `μ`.
///
/// Atomic measures are summed. Otherwise the domain is the integrand's support box if it
/// declares one, else the configured truncation, with unbounded directions mapped onto
/// `[0,1]`. Under `V_α`, a lower envelope decaying no faster than `|ω|^{-(2+α)}` certifies
/// divergence before any quadrature runs.
pub fn integrate<I: Integrand + ?Sized>(mu: &Measure, f: &I, cfg: &QuadratureConfig) -> Result<Integral> {
    mu.validate()?;
    cfg.validate()?;
    if let Measure::Atomic(atoms) = mu {
        let value = atoms.iter().map(|a| a.mass * f.eval(a.x, a.y)).sum();
        return Ok(Integral { value, error_estimate: 0.0, tail_bound: 0.0, strategy: Strategy::Atomic });
    }
    let tr = cfg.truncation;
    let support = f.support();
    let (cx, scale) = f.focus().unwrap_or((0.0, 1.0));
    let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
    let gamma = mu.exponent_near_zero();
    if gamma <= -1.0 + 1e-9 && tr.y_min == 0.0 {
        return Err(Error::Divergent(format!(
            "density behaves like y^{gamma:.6} near the boundary and is not integrable there"
        )));
    }
    let gamma = gamma.max(-0.95);
    let m = if gamma < 0.0 { (2.0 / (1.0 + gamma)).min(40.0) } else { 2.0 };

    let (xmap, ymap, strategy, tail) = if let Some(s) = support {
        let y_hi = tr.y_max.map_or(s.y1, |y| y.min(s.y1));
        if y_hi <= tr.y_min || s.x1 <= s.x0 {
            return Ok(Integral { value: 0.0, error_estimate: 0.0, tail_bound: 0.0, strategy: Strategy::Support });
        }
        (
            AxisMap::Affine { lo: s.x0, hi: s.x1 },
            AxisMap::Graded { lo: tr.y_min, hi: y_hi, m },
            Strategy::Support,
            0.0,
        )
    } else {
        if tr.x_half_width.is_none() && tr.y_max.is_none() {
            if let (Measure::LebesgueAlpha { alpha }, Some(e)) = (mu, f.envelope()) {
                if let Some(kl) = e.kappa_low {
                    if kl <= 2.0 + alpha {
                        return Err(Error::Divergent(format!(
                            "integrand decays like |w|^-{kl}, not integrable against y^{alpha} dx dy"
                        )));
                    }
                }
            }
        }
        let xmap = match tr.x_half_width {
            Some(w) => AxisMap::Affine { lo: cx - w, hi: cx + w },
            None => AxisMap::Cauchy { c: cx, l: scale },
        };
        let ymap = match tr.y_max {
            Some(h) => AxisMap::Graded { lo: tr.y_min, hi: h, m },
            None if tr.y_min > 0.0 => AxisMap::HalfLine { lo: tr.y_min, l: scale.max(tr.y_min), m: 1.0 },
            None => AxisMap::HalfLine { lo: 0.0, l: scale, m },
        };
        let truncated = tr.x_half_width.is_some() || tr.y_max.is_some() || tr.y_min > 0.0;
        let (strategy, tail) = if !truncated {
            (Strategy::Mapped, 0.0)
        } else {
            match (mu, f.envelope()) {
                (Measure::LebesgueAlpha { alpha }, Some(e)) => {
                    (Strategy::Truncated, tail_bound(&e, *alpha, tr.x_half_width, tr.y_min, tr.y_max))
                }
                _ => (Strategy::TruncatedUnbounded, f64::NAN),
            }
        };
        (xmap, ymap, strategy, tail)
    };

    let g = |a: f64, b: f64| {
        let (x, jx) = xmap.apply(a);
        let (y, jy) = ymap.apply(b);
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return 0.0;
        }
        let v = f.eval(x, y);
        if v == 0.0 {
            return 0.0;
        }
        let w = mu.weight(x, y).unwrap_or(0.0);
        let r = v * w * jx * jy;
        if r.is_finite() { r } else { 0.0 }
    };
    let tol = Tolerance { abs: cfg.abs_tol, rel: cfg.rel_tol, max_cells: cfg.max_subdivisions };
    let est = integrate_2d(g, (0.0, 1.0), (0.0, 1.0), tol)?;
    let tail_part = if tail.is_finite() { tail } else { 0.0 };
    Ok(Integral {
        value: est.value,
        error_estimate: est.error + tail_part,
        tail_bound: tail,
        strategy,
    })
}

/// `μ(Q_I)`: exact for `V_α`, a sum for atoms, quadrature over the square otherwise.
///
/// Atoms count when `x ∈ [a, b]` and `0 < y < |I|`.
pub fn measure_of_square(mu: &Measure, q: &CarlesonSquare, cfg: &QuadratureConfig) -> Result<f64> {
    mu.validate()?;
    match mu {
        Measure::LebesgueAlpha { alpha } => box_volume(&q.base, *alpha),
        Measure::Atomic(atoms) => Ok(atoms.iter().filter(|a| q.contains(a.x, a.y)).map(|a| a.mass).sum()),
        Measure::Density(_) => {
            let b = q.base;
            let ind = FnIntegrand::new(|_, _| 1.0).with_support(Support { x0: b.left(), x1: b.right(), y1: b.length });
            let cfg = QuadratureConfig {
                truncation: Truncation { x_half_width: None, y_min: 0.0, y_max: None },
                ..*cfg
            };
            Ok(integrate(mu, &ind, &cfg)?.value)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expression, VarContext};
    use crate::special::oracle_kernel_integral;
    use approx::assert_relative_eq;

    fn kernel(a: f64, x0: f64, y0: f64) -> impl Integrand {
        FnIntegrand::new(move |x: f64, y: f64| ((x - x0).powi(2) + (y + y0).powi(2)).powf(-a / 2.0)).with_envelope(
            Envelope { x0, y0, amp: y0.powf(-a), kappa: a, kappa_low: Some(a) },
        )
    }

    #[test]
    fn box_volume_examples() {
        let i = |l| Interval::new(0.0, l).unwrap();
        assert_eq!(box_volume(&i(2.0), 0.0).unwrap(), 4.0);
        assert_eq!(box_volume(&i(1.0), 1.0).unwrap(), 0.5);
        assert_eq!(box_volume(&i(4.0), -0.5).unwrap(), 16.0);
        assert!(matches!(box_volume(&i(1.0), -1.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn integrate_kernel_at_i() {
        let v = integrate(&Measure::LebesgueAlpha { alpha: 0.0 }, &kernel(4.0, 0.0, 1.0), &QuadratureConfig::default())
            .unwrap();
        assert_relative_eq!(v.value, PI / 4.0, max_relative = 1e-9);
        assert!(v.error_estimate >= (v.value - PI / 4.0).abs());
        assert_eq!(v.strategy, Strategy::Mapped);
    }

    #[test]
    fn integrate_matches_oracle_with_weights() {
        for &(a, alpha, x0, y0) in &[(3.5, 0.5, 2.0, 0.3), (2.5, -0.5, -1.0, 4.0), (6.0, 2.0, 0.0, 1e-3)] {
            let exact = oracle_kernel_integral(a, alpha, y0).unwrap();
            let v = integrate(&Measure::LebesgueAlpha { alpha }, &kernel(a, x0, y0), &QuadratureConfig::default())
                .unwrap();
            assert_relative_eq!(v.value, exact, max_relative = 1e-8);
        }
    }

    #[test]
    fn divergence_is_certified() {
        let r = integrate(&Measure::LebesgueAlpha { alpha: 0.0 }, &kernel(2.0, 0.0, 1.0), &QuadratureConfig::default());
        assert!(matches!(r, Err(Error::Divergent(_))));
    }

    #[test]
    fn truncated_tail_bound_covers_error() {
        let cfg = QuadratureConfig {
            truncation: Truncation { x_half_width: Some(50.0), y_min: 0.0, y_max: Some(50.0) },
            ..Default::default()
        };
        let v = integrate(&Measure::LebesgueAlpha { alpha: 0.0 }, &kernel(4.0, 0.0, 1.0), &cfg).unwrap();
        assert_eq!(v.strategy, Strategy::Truncated);
        assert!(v.value < PI / 4.0);
        assert!(PI / 4.0 - v.value <= v.error_estimate);
    }

    #[test]
    fn atomic_and_indicator_examples() {
        let mu = Measure::Atomic(vec![Atom { x: 0.0, y: 1.0, mass: 2.0 }]);
        let one = FnIntegrand::new(|_, _| 1.0);
        assert_eq!(integrate(&mu, &one, &QuadratureConfig::default()).unwrap().value, 2.0);
        let sq = FnIntegrand::new(|_, _| 1.0).with_support(Support { x0: -1.0, x1: 1.0, y1: 2.0 });
        let v = integrate(&Measure::LebesgueAlpha { alpha: 0.0 }, &sq, &QuadratureConfig::default()).unwrap();
        assert_relative_eq!(v.value, 4.0, max_relative = 1e-14);
    }

    #[test]
    fn measure_of_square_examples() {
        let cfg = QuadratureConfig::default();
        let q = |a, b| CarlesonSquare::new(Interval::from_endpoints(a, b).unwrap());
        assert_eq!(measure_of_square(&Measure::LebesgueAlpha { alpha: 1.0 }, &q(0.0, 1.0), &cfg).unwrap(), 0.5);
        let mu = Measure::Atomic(vec![Atom { x: 0.1, y: 0.1, mass: 3.0 }]);
        assert_eq!(measure_of_square(&mu, &q(0.0, 1.0), &cfg).unwrap(), 3.0);
        // Φ(t) = t with s = 1 gives the density 1/y, whose boxes have infinite mass.
        let canon = Measure::Density(Density::Canonical { phi: GrowthFunction::power(1.0), s: 1.0 });
        assert!(matches!(measure_of_square(&canon, &q(0.0, 1.0), &cfg), Err(Error::Divergent(_))));
        let canon = Measure::Density(Density::Canonical { phi: GrowthFunction::power(3.0), s: 1.0 });
        assert_relative_eq!(measure_of_square(&canon, &q(0.0, 1.0), &cfg).unwrap(), 0.5, max_relative = 1e-12);
        let lin = parse_expression("y", VarContext::Plane).unwrap();
        let mu = Measure::Density(Density::Expression { expr: Arc::new(lin), source: "y".into() });
        assert_relative_eq!(measure_of_square(&mu, &q(0.0, 1.0), &cfg).unwrap(), 0.5, max_relative = 1e-12);
        let expr = parse_expression("y^(-0.5)", VarContext::Plane).unwrap();
        let mu = Measure::Density(Density::Expression { expr: Arc::new(expr), source: "y^(-0.5)".into() });
        // ∫_0^2 ∫_0^2 y^{-1/2} dy dx = 2 · 2√2
        assert_relative_eq!(measure_of_square(&mu, &q(0.0, 2.0), &cfg).unwrap(), 4.0 * 2f64.sqrt(), max_relative = 1e-9);
    }
}
