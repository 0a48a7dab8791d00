//! Modulars and Luxemburg norms on the real line and on the upper half-plane.

use crate::error::{Error, Result};
use crate::grid::{ScanGrid, Verdict};
use crate::growth::GrowthFunction;
use crate::halfplane::{integrate, Envelope, Integrand, Measure, QuadratureConfig, Support};
use crate::quadrature::{integrate_1d, Tolerance};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    RealLine,
    HalfPlane,
}

/// Where a modular is integrated.
#[derive(Debug, Clone)]
pub enum Space {
    /// Lebesgue measure on the real line.
    Line,
    HalfPlane(Measure),
}

type Eval = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// `|f|` for a function on the line (second argument ignored) or on the half-plane,
/// with optional decay and support hints.
#[derive(Clone)]
pub struct SampledFunction {
    pub label: String,
    pub domain: Domain,
    f: Eval,
    /// Two-sided decay `(y₀/|ω − z̄₀|)^κ`; on the line, `ω = x` and the envelope reads
    /// `(y₀/√((x−x₀)² + y₀²))^κ`.
    pub envelope: Option<Envelope>,
    /// `[x₀, x₁]` on the line, a box on the half-plane.
    pub support: Option<Support>,
    pub focus: Option<(f64, f64)>,
}

impl std::fmt::Debug for SampledFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SampledFunction")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("envelope", &self.envelope)
            .field("support", &self.support)
            .finish()
    }
}

impl SampledFunction {
    pub fn new<F>(label: impl Into<String>, domain: Domain, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        SampledFunction { label: label.into(), domain, f: Arc::new(f), envelope: None, support: None, focus: None }
    }

    /// `height · χ_[a,b]` on the line.
    pub fn indicator(a: f64, b: f64, height: f64) -> Self {
        SampledFunction::new(format!("{height}*chi[{a},{b}]"), Domain::RealLine, move |x, _| {
            if x >= a && x <= b { height.abs() } else { 0.0 }
        })
        .with_support(Support { x0: a, x1: b, y1: f64::INFINITY })
    }

    pub fn with_envelope(mut self, e: Envelope) -> Self {
        self.envelope = Some(e);
        self
    }

    pub fn with_support(mut self, s: Support) -> Self {
        self.support = Some(s);
        self
    }

    pub fn with_focus(mut self, x0: f64, scale: f64) -> Self {
        self.focus = Some((x0, scale));
        self
    }

    /// `|f|` at `(x, y)`.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.f)(x, y).abs()
    }

    /// `c·f`.
    pub fn scaled(&self, c: f64) -> Self {
        let f = self.f.clone();
        let mut out = self.clone();
        out.f = Arc::new(move |x, y| c * f(x, y));
        out.label = format!("{c}*({})", self.label);
        if let Some(e) = out.envelope.as_mut() {
            e.amp *= c.abs();
        }
        out
    }

    /// The horizontal slice `x ↦ F(x + iy)` as a function on the line.
    pub fn restrict_to_line(&self, y: f64) -> Self {
        let f = self.f.clone();
        let mut out = SampledFunction::new(format!("{}|y={y}", self.label), Domain::RealLine, move |x, _| f(x, y));
        if let Some(e) = self.envelope {
            let h = e.y0 + y;
            let r = e.y0 / h;
            out.envelope = Some(Envelope { x0: e.x0, y0: h, amp: e.amp * r.powf(e.kappa), ..e });
        }
        if let Some(s) = self.support {
            if y < s.y1 {
                out.support = Some(Support { y1: f64::INFINITY, ..s });
            } else {
                out.f = Arc::new(|_, _| 0.0);
                out.support = Some(Support { x0: 0.0, x1: 0.0, y1: 0.0 });
            }
        }
        out.focus = self.focus.map(|(x0, l)| (x0, l + y));
        out
    }
}

/// Result of a Luxemburg norm computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LuxemburgResult {
    pub norm: f64,
    pub modular_at_norm: f64,
    pub iterations: usize,
    pub bracket: (f64, f64),
}

fn phi_indices(phi: &GrowthFunction) -> Result<(f64, f64)> {
    let i = phi.estimate_indices(&ScanGrid::default())?;
    Ok((i.lower, i.upper))
}

/// Integrand `Φ(|f|/λ)` on the half-plane with the decay envelope transported through Φ.
struct PhiOf<'a> {
    f: &'a SampledFunction,
    phi: &'a GrowthFunction,
    lambda: f64,
    idx: (f64, f64),
}

impl Integrand for PhiOf<'_> {
    fn eval(&self, x: f64, y: f64) -> f64 {
        self.phi.value(self.f.eval(x, y) / self.lambda)
    }
    fn focus(&self) -> Option<(f64, f64)> {
        self.f.focus.or_else(|| self.f.envelope.map(|e| (e.x0, e.y0)))
    }
    fn envelope(&self) -> Option<Envelope> {
        // For r ≤ 1: Φ(A r^κ) ≤ Φ(A) r^{κ a_Φ} and Φ(A r^κ) ≥ Φ(A) r^{κ b_Φ}.
        self.f.envelope.map(|e| Envelope {
            amp: self.phi.value(e.amp / self.lambda),
            kappa: e.kappa * self.idx.0,
            kappa_low: e.kappa_low.map(|k| k * self.idx.1),
            ..e
        })
    }
    fn support(&self) -> Option<Support> {
        self.f.support
    }
}

fn line_modular(f: &SampledFunction, phi: &GrowthFunction, lambda: f64, cfg: &QuadratureConfig, idx: (f64, f64)) -> Result<f64> {
    let tol = Tolerance { abs: cfg.abs_tol, rel: cfg.rel_tol, max_cells: cfg.max_subdivisions };
    let g = |x: f64| phi.value(f.eval(x, 0.0) / lambda);
    if let Some(s) = f.support {
        if s.x1 <= s.x0 {
            return Ok(0.0);
        }
        return Ok(integrate_1d(g, s.x0, s.x1, tol)?.value);
    }
    if let Some(e) = f.envelope {
        if let Some(k) = e.kappa_low {
            if k * idx.1 <= 1.0 {
                return Err(Error::NotInSpace(format!(
                    "{} decays like |x|^-{k}; its modular diverges on every line",
                    f.label
                )));
            }
        }
    }
    let (c, l) = f.focus.or_else(|| f.envelope.map(|e| (e.x0, e.y0))).unwrap_or((0.0, 1.0));
    let mapped = |s: f64| {
        let th = PI * (s - 0.5);
        let (sn, cs) = th.sin_cos();
        let v = g(c + l * sn / cs);
        if v == 0.0 { 0.0 } else { v * l * PI / (cs * cs) }
    };
    let est = integrate_1d(mapped, 0.0, 1.0, tol)?;
    if !est.value.is_finite() {
        return Err(Error::NotInSpace(format!("modular of {} is infinite", f.label)));
    }
    Ok(est.value)
}

fn modular_scaled(f: &SampledFunction, phi: &GrowthFunction, space: &Space, lambda: f64, cfg: &QuadratureConfig, idx: (f64, f64)) -> Result<f64> {
    match (space, f.domain) {
        (Space::Line, Domain::RealLine) => line_modular(f, phi, lambda, cfg, idx),
        (Space::HalfPlane(mu), Domain::HalfPlane) => {
            let g = PhiOf { f, phi, lambda, idx };
            match integrate(mu, &g, cfg) {
                Err(Error::Divergent(m)) => Err(Error::NotInSpace(m)),
                other => Ok(other?.value),
            }
        }
        _ => Err(Error::InvalidInput(format!("{} lives on {:?}, which does not match the space", f.label, f.domain))),
    }
}

/// `∫ Φ(|f|) dμ`.
///
/// ```
/// use carleson::growth::GrowthFunction;
/// use carleson::halfplane::QuadratureConfig;
/// use carleson::orlicz::{modular, SampledFunction, Space};
/// let f = SampledFunction::indicator(0.0, 1.0, 2.0);
/// let m = modular(&f, &GrowthFunction::power(2.0), &Space::Line, &QuadratureConfig::default()).unwrap();
/// assert!((m - 4.0).abs() < 1e-12);
/// ```
pub fn modular(f: &SampledFunction, phi: &GrowthFunction, space: &Space, cfg: &QuadratureConfig) -> Result<f64> {
    phi.validate()?;
    modular_scaled(f, phi, space, 1.0, cfg, phi_indices(phi)?)
}

/// `inf{λ > 0 : ∫ Φ(|f|/λ) dμ ≤ 1}` by bisection on λ, to relative bracket width `tol`.
///
/// Power growth functions skip the bisection: the modular is homogeneous of degree `p`.
pub fn luxemburg_norm(f: &SampledFunction, phi: &GrowthFunction, space: &Space, tol: f64, cfg: &QuadratureConfig) -> Result<LuxemburgResult> {
    phi.validate()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let idx = phi_indices(phi)?;
    let m1 = modular_scaled(f, phi, space, 1.0, cfg, idx)?;
    if m1 == 0.0 {
        return Ok(LuxemburgResult { norm: 0.0, modular_at_norm: 0.0, iterations: 0, bracket: (0.0, 0.0) });
    }
    if let GrowthFunction::Power { p } = phi {
        let n = m1.powf(1.0 / p);
        return Ok(LuxemburgResult { norm: n, modular_at_norm: 1.0, iterations: 0, bracket: (n, n) });
    }
    gauge(|l| modular_scaled(f, phi, space, l, cfg, idx), m1, idx.0, tol)
}

/// Bisection for `inf{λ : m(λ) ≤ 1}` given a non-increasing modular `m`, its value `m1` at
/// `λ = 1` and the lower index `a` used for the initial upper bracket.
pub fn gauge<M: Fn(f64) -> Result<f64>>(at: M, m1: f64, a: f64, tol: f64) -> Result<LuxemburgResult> {
    let mut hi = m1.powf(1.0 / a) + 1.0;
    let mut m_hi = at(hi)?;
    let mut guard = 0;
    while m_hi > 1.0 {
        hi *= 2.0;
        m_hi = at(hi)?;
        guard += 1;
        if guard > 200 {
            return Err(Error::NotInSpace("modular stays above 1 for every tested scale".into()));
        }
    }
    let mut lo = 0.0;
    let mut iterations = 0;
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        let m = at(mid)?;
        if m <= 1.0 {
            hi = mid;
            m_hi = m;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(LuxemburgResult { norm: hi, modular_at_norm: m_hi, iterations, bracket: (lo, hi) })
}

/// Both norm-modular inequalities with their empirical constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormModularCheck {
    pub verdict: Verdict,
    pub modular: f64,
    pub norm: f64,
    pub lower_index: f64,
    pub upper_index: f64,
    /// `modular / max(N^a, N^b)`.
    pub modular_constant: f64,
    /// `N / max(M^{1/a}, M^{1/b})`.
    pub norm_constant: f64,
}

/// Check `M ≤ max(N^a, N^b)` and `N ≤ max(M^{1/a}, M^{1/b})` for `M` the modular and `N` the
/// Luxemburg norm; both hold with constant one, so each ratio must stay within `1 + slack`.
pub fn norm_modular_bounds_check(f: &SampledFunction, phi: &GrowthFunction, space: &Space, cfg: &QuadratureConfig, slack: f64) -> Result<NormModularCheck> {
    let (a, b) = phi_indices(phi)?;
    let m = modular(f, phi, space, cfg)?;
    let n = luxemburg_norm(f, phi, space, 1e-12, cfg)?.norm;
    if m == 0.0 && n == 0.0 {
        return Ok(NormModularCheck { verdict: Verdict::Pass, modular: 0.0, norm: 0.0, lower_index: a, upper_index: b, modular_constant: 1.0, norm_constant: 1.0 });
    }
    let c1 = m / n.powf(a).max(n.powf(b));
    let c2 = n / m.powf(1.0 / a).max(m.powf(1.0 / b));
    let verdict = if c1 <= 1.0 + slack && c2 <= 1.0 + slack { Verdict::Pass } else { Verdict::Fail };
    Ok(NormModularCheck { verdict, modular: m, norm: n, lower_index: a, upper_index: b, modular_constant: c1, norm_constant: c2 })
}

/// One row of a line profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineNorm {
    pub y: f64,
    pub norm: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineProfile {
    pub rows: Vec<LineNorm>,
    /// Non-increasing in `y` within `2·tol`.
    pub monotone: bool,
    /// Value at the smallest `y`; the true Hardy-Orlicz norm is the limit `y → 0`.
    pub hardy_estimate: Option<f64>,
    pub extrapolated: bool,
}

/// Luxemburg norm of each horizontal slice `x ↦ F(x + iy)`.
pub fn line_norm_profile(f: &SampledFunction, phi: &GrowthFunction, ys: &[f64], tol: f64, cfg: &QuadratureConfig) -> Result<LineProfile> {
    if f.domain != Domain::HalfPlane {
        return Err(Error::InvalidInput("line profiles need a function on the half-plane".into()));
    }
    let mut ys = ys.to_vec();
    ys.sort_by(|a, b| a.total_cmp(b));
    use rayon::prelude::*;
    let rows: Vec<LineNorm> = ys
        .par_iter()
        .map(|&y| match luxemburg_norm(&f.restrict_to_line(y), phi, &Space::Line, tol, cfg) {
            Ok(r) => LineNorm { y, norm: Some(r.norm), error: None },
            Err(e) => LineNorm { y, norm: None, error: Some(e.to_string()) },
        })
        .collect();
    let vals: Vec<f64> = rows.iter().filter_map(|r| r.norm).collect();
    let monotone = vals.windows(2).all(|w| w[1] <= w[0] * (1.0 + 2.0 * tol) + 1e-300);
    let hardy_estimate = rows.first().and_then(|r| r.norm);
    Ok(LineProfile { rows, monotone, hardy_estimate, extrapolated: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cauchy() -> SampledFunction {
        // |1/(z+i)| = 1/|ω - (-i)|
        SampledFunction::new("1/(z+i)", Domain::HalfPlane, |x, y| 1.0 / (x * x + (y + 1.0).powi(2)).sqrt())
            .with_envelope(Envelope { x0: 0.0, y0: 1.0, amp: 1.0, kappa: 1.0, kappa_low: Some(1.0) })
    }

    #[test]
    fn modular_examples() {
        let cfg = QuadratureConfig::default();
        let p2 = GrowthFunction::power(2.0);
        let f = SampledFunction::indicator(0.0, 1.0, 2.0);
        assert_relative_eq!(modular(&f, &p2, &Space::Line, &cfg).unwrap(), 4.0, max_relative = 1e-14);
        let zero = SampledFunction::indicator(0.0, 1.0, 0.0);
        assert_eq!(modular(&zero, &p2, &Space::Line, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn luxemburg_indicator_formula() {
        let cfg = QuadratureConfig::default();
        let tol = 1e-12;
        for phi in [GrowthFunction::power(2.0), GrowthFunction::power_log(2.0, 1.0), GrowthFunction::power(0.5)] {
            for &(len, c) in &[(1.0, 2.0), (4.0, 3.0), (1e-3, 1.0), (1e3, 0.5)] {
                let f = SampledFunction::indicator(0.0, len, c);
                let r = luxemburg_norm(&f, &phi, &Space::Line, tol, &cfg).unwrap();
                let exact = c / phi.inverse_value(1.0 / len);
                assert_relative_eq!(r.norm, exact, max_relative = 1e-9);
                assert!(r.modular_at_norm <= 1.0 + 1e-12);
            }
        }
        let f = SampledFunction::indicator(0.0, 4.0, 3.0);
        let r = luxemburg_norm(&f, &GrowthFunction::power(2.0), &Space::Line, tol, &cfg).unwrap();
        assert_relative_eq!(r.norm, 6.0, max_relative = 1e-12);
    }

    #[test]
    fn bisection_iteration_bound() {
        let cfg = QuadratureConfig::default();
        let f = SampledFunction::indicator(0.0, 1.0, 2.0);
        let tol = 1e-10;
        let r = luxemburg_norm(&f, &GrowthFunction::power_log(2.0, 1.0), &Space::Line, tol, &cfg).unwrap();
        let initial = 4.0 * (std::f64::consts::E + 2.0).ln() + 1.0;
        assert!(r.iterations as f64 <= ((initial / (tol * r.norm)).log2()).ceil() + 1.0);
        assert!(r.bracket.1 - r.bracket.0 <= tol * r.bracket.1);
    }

    #[test]
    fn profiles() {
        let cfg = QuadratureConfig::default();
        let p2 = GrowthFunction::power(2.0);
        let ys = [0.01, 0.1, 1.0, 10.0];
        let prof = line_norm_profile(&cauchy(), &p2, &ys, 1e-10, &cfg).unwrap();
        assert!(prof.monotone);
        for r in &prof.rows {
            assert_relative_eq!(r.norm.unwrap(), (PI / (1.0 + r.y)).sqrt(), max_relative = 1e-8);
        }
        let one = SampledFunction::new("1", Domain::HalfPlane, |_, _| 1.0)
            .with_envelope(Envelope { x0: 0.0, y0: 1.0, amp: 1.0, kappa: 0.0, kappa_low: Some(0.0) });
        let prof = line_norm_profile(&one, &p2, &ys, 1e-10, &cfg).unwrap();
        assert!(prof.rows.iter().all(|r| r.norm.is_none() && r.error.as_deref().unwrap().contains("not in the space")));
    }

    #[test]
    fn norm_modular_inequalities() {
        let cfg = QuadratureConfig::default();
        for phi in [GrowthFunction::power(3.0), GrowthFunction::power_log(2.0, 1.0), GrowthFunction::power(0.5)] {
            for &len in &[1e-3, 1e-1, 1.0, 10.0, 1e3] {
                let f = SampledFunction::indicator(0.0, len, 1.0);
                let c = norm_modular_bounds_check(&f, &phi, &Space::Line, &cfg, 1e-6).unwrap();
                assert_eq!(c.verdict, Verdict::Pass, "{c:?}");
            }
        }
        let c = norm_modular_bounds_check(&cauchy(), &GrowthFunction::power(2.0), &Space::HalfPlane(Measure::LebesgueAlpha { alpha: -0.5 }), &cfg, 1e-6).unwrap();
        assert_relative_eq!(c.modular_constant, 1.0, max_relative = 1e-9);
    }
}
