//! Explicit analytic functions on the upper half-plane: the unit-ball test functions
//! `F_z` and `G_z`, Poisson extensions, and the power witness `(ω + i)^{-a}`.

use crate::error::{Error, Result};
use crate::expr::{parse_expression, Expr, VarContext};
use crate::grid::{ScanGrid, Verdict};
use crate::growth::GrowthFunction;
use crate::halfplane::{Envelope, Measure, QuadratureConfig};
use crate::orlicz::{line_norm_profile, luxemburg_norm, modular, Domain, SampledFunction, Space};
use crate::quadrature::{integrate_1d, Tolerance};
use crate::special::beta_value;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// `B(1+α, 2+α)·B(1/2, (3+2α)/2)`, the `V_α`-mass of `(y/|ω − z̄|)^{4+2α}` times `y^{-2-α}`.
pub fn bergman_constant(alpha: f64) -> Result<f64> {
    if !(alpha > -1.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must exceed -1")));
    }
    Ok(beta_value(1.0 + alpha, 2.0 + alpha)? * beta_value(0.5, (3.0 + 2.0 * alpha) / 2.0)?)
}

/// `ρ = 1` when `a_Φ ≥ 1`, else `ρ = a_Φ`; in both cases `Φ(t)/t^ρ` is nondecreasing.
pub fn rho_for(phi: &GrowthFunction) -> Result<f64> {
    let a = phi.estimate_indices(&ScanGrid::default())?.lower;
    Ok(if a >= 1.0 { 1.0 } else { a })
}

/// Boundary data for a Poisson extension.
#[derive(Debug, Clone)]
pub enum BoundaryData {
    /// An expression in `t`.
    Expression { expr: Arc<Expr>, source: String },
    /// `h·χ_[a,b]`, integrated in closed form.
    Indicator { a: f64, b: f64, height: f64 },
}

impl BoundaryData {
    pub fn parse(src: &str) -> Result<Self> {
        Ok(BoundaryData::Expression { expr: Arc::new(parse_expression(src, VarContext::Line)?), source: src.to_string() })
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            BoundaryData::Expression { expr, .. } => expr.eval(0.0, 0.0, t),
            BoundaryData::Indicator { a, b, height } => {
                if t >= *a && t <= *b {
                    *height
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum WitnessKind {
    HardyTest { x: f64, y: f64 },
    BergmanTest { x: f64, y: f64, alpha: f64 },
    Poisson(BoundaryData),
    Power { a: f64 },
}

/// Serializable description of a witness, as found in run configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessSpec {
    HardyTest { z: [f64; 2] },
    BergmanTest { z: [f64; 2], alpha: f64 },
    Poisson { expr: String },
    Power { a: f64 },
}

/// A witness together with the growth function it was built for.
#[derive(Debug, Clone)]
pub struct WitnessFunction {
    pub kind: WitnessKind,
    pub phi: Option<GrowthFunction>,
    pub rho: f64,
    /// `|w(ω)| = amp·(y₀/|ω − z̄₀|)^exponent` for the closed-form kinds.
    amp: f64,
    exponent: f64,
}

fn check_point(x: f64, y: f64) -> Result<()> {
    if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain(format!("({x}, {y}) is not in the upper half-plane")));
    }
    Ok(())
}

impl WitnessFunction {
    /// `F_z(ω) = Φ⁻¹(1/(πy))·y^{2/ρ}/(ω − z̄)^{2/ρ}`.
    pub fn hardy_test(z: (f64, f64), phi: &GrowthFunction) -> Result<Self> {
        check_point(z.0, z.1)?;
        phi.validate()?;
        let rho = rho_for(phi)?;
        let amp = phi.inverse_value(1.0 / (PI * z.1));
        Ok(WitnessFunction { kind: WitnessKind::HardyTest { x: z.0, y: z.1 }, phi: Some(phi.clone()), rho, amp, exponent: 2.0 / rho })
    }

    /// `G_z(ω) = Φ⁻¹(1/(C_α y^{2+α}))·y^{(4+2α)/ρ}/(ω − z̄)^{(4+2α)/ρ}`.
    pub fn bergman_test(z: (f64, f64), phi: &GrowthFunction, alpha: f64) -> Result<Self> {
        check_point(z.0, z.1)?;
        phi.validate()?;
        let c = bergman_constant(alpha)?;
        let rho = rho_for(phi)?;
        let amp = phi.inverse_value(1.0 / (c * z.1.powf(2.0 + alpha)));
        Ok(WitnessFunction {
            kind: WitnessKind::BergmanTest { x: z.0, y: z.1, alpha },
            phi: Some(phi.clone()),
            rho,
            amp,
            exponent: (4.0 + 2.0 * alpha) / rho,
        })
    }

    /// `(ω + i)^{-a}`.
    pub fn power(a: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::InvalidParameter(format!("exponent {a}")));
        }
        Ok(WitnessFunction { kind: WitnessKind::Power { a }, phi: None, rho: 1.0, amp: 1.0, exponent: a })
    }

    pub fn poisson(data: BoundaryData) -> Self {
        WitnessFunction { kind: WitnessKind::Poisson(data), phi: None, rho: 1.0, amp: f64::NAN, exponent: f64::NAN }
    }

    pub fn from_spec(spec: &WitnessSpec, phi: Option<&GrowthFunction>) -> Result<Self> {
        let need = || phi.ok_or_else(|| Error::InvalidInput("this witness needs a growth function".into()));
        match spec {
            WitnessSpec::HardyTest { z } => WitnessFunction::hardy_test((z[0], z[1]), need()?),
            WitnessSpec::BergmanTest { z, alpha } => WitnessFunction::bergman_test((z[0], z[1]), need()?, *alpha),
            WitnessSpec::Poisson { expr } => Ok(WitnessFunction::poisson(BoundaryData::parse(expr)?)),
            WitnessSpec::Power { a } => WitnessFunction::power(*a),
        }
    }

    /// Centre `z₀` of the pole at `z̄₀`.
    fn centre(&self) -> Option<(f64, f64)> {
        match self.kind {
            WitnessKind::HardyTest { x, y } | WitnessKind::BergmanTest { x, y, .. } => Some((x, y)),
            WitnessKind::Power { .. } => Some((0.0, 1.0)),
            WitnessKind::Poisson(_) => None,
        }
    }

    /// Complex value, with the principal branch of `(ω − z̄₀)^{-c}`.
    pub fn value(&self, w: (f64, f64)) -> Result<Complex64> {
        check_point(w.0, w.1)?;
        match self.centre() {
            Some((x0, y0)) => {
                let d = Complex64::new(w.0 - x0, w.1 + y0);
                let scale = match self.kind {
                    WitnessKind::Power { .. } => 1.0,
                    _ => self.amp * y0.powf(self.exponent),
                };
                Ok(scale * (-self.exponent * d.ln()).exp())
            }
            None => Ok(Complex64::new(self.modulus(w)?, 0.0)),
        }
    }

    /// `|w(ω)|`; for Poisson witnesses, the absolute value of the extension.
    pub fn modulus(&self, w: (f64, f64)) -> Result<f64> {
        check_point(w.0, w.1)?;
        match &self.kind {
            WitnessKind::Poisson(data) => Ok(poisson_integral(data, w.0, w.1)?.abs()),
            _ => Ok(self.closed_modulus(w.0, w.1)),
        }
    }

    /// Closed-form modulus, also valid on the boundary line.
    fn closed_modulus(&self, x: f64, y: f64) -> f64 {
        match self.centre() {
            Some((x0, y0)) => self.amp * (y0 / (x - x0).hypot(y + y0)).powf(self.exponent),
            None => f64::NAN,
        }
    }

    /// The modulus as a [`SampledFunction`] on the half-plane, with its exact envelope.
    pub fn to_sampled(&self) -> SampledFunction {
        let me = self.clone();
        let label = match &self.kind {
            WitnessKind::HardyTest { x, y } => format!("F_({x}+{y}i)"),
            WitnessKind::BergmanTest { x, y, alpha } => format!("G_({x}+{y}i), alpha={alpha}"),
            WitnessKind::Power { a } => format!("(z+i)^-{a}"),
            WitnessKind::Poisson(BoundaryData::Expression { source, .. }) => format!("U[{source}]"),
            WitnessKind::Poisson(BoundaryData::Indicator { a, b, height }) => format!("U[{height}*chi[{a},{b}]]"),
        };
        let f = match self.kind {
            WitnessKind::Poisson(_) => {
                SampledFunction::new(label, Domain::HalfPlane, move |x, y| me.modulus((x, y)).unwrap_or(f64::NAN))
            }
            _ => SampledFunction::new(label, Domain::HalfPlane, move |x, y| me.closed_modulus(x, y)),
        };
        match self.centre() {
            Some((x0, y0)) => f.with_envelope(Envelope { x0, y0, amp: self.amp, kappa: self.exponent, kappa_low: Some(self.exponent) }),
            None => f,
        }
    }
}

/// `U_f(x+iy) = (1/π)∫ y/((x−t)² + y²) f(t) dt`.
///
/// Expressions are integrated after `t = x + y·tan θ`, which turns the kernel into `dθ/π` on
/// `(−π/2, π/2)`; data growing too fast for the kernel shows up as a quadrature failure.
pub fn poisson_integral(data: &BoundaryData, x: f64, y: f64) -> Result<f64> {
    check_point(x, y)?;
    match data {
        BoundaryData::Indicator { a, b, height } => Ok(height / PI * (((b - x) / y).atan() - ((a - x) / y).atan())),
        BoundaryData::Expression { expr, .. } => {
            let g = |th: f64| {
                let v = expr.eval(0.0, 0.0, x + y * th.tan());
                if v.is_finite() { v } else { f64::NAN }
            };
            let h = PI / 2.0;
            let tol = Tolerance { abs: 1e-13, rel: 1e-11, max_cells: 4000 };
            let est = integrate_1d(g, -h, h, tol)?;
            if !est.value.is_finite() {
                return Err(Error::AccuracyFailure { partial: est.value, error: f64::INFINITY });
            }
            Ok(est.value / PI)
        }
    }
}

/// Modular certificate for a unit-ball test function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitBallCheck {
    /// Half-plane modular, or the largest line modular for Hardy tests.
    pub modular: f64,
    pub pass: bool,
    /// `(v, ∫ Φ(|F(x+iv)|) dx)` for Hardy tests.
    pub lines: Vec<(f64, f64)>,
}

/// Slack allowed above 1 for quadrature error in [`verify_unit_ball`].
pub const UNIT_BALL_SLACK: f64 = 1e-7;

/// Line heights used for Hardy tests at `z = x + iy`: the boundary and `y·10^{k/2}`,
/// `|k| ≤ 6`.
pub fn hardy_line_heights(y: f64) -> Vec<f64> {
    std::iter::once(0.0).chain((-6..=6).map(|k| y * 10f64.powf(k as f64 / 2.0))).collect()
}

/// Checks that the modular of `w` is at most one: the supremum over line modulars for Hardy
/// tests, the `V_α` modular for Bergman tests.
pub fn verify_unit_ball(w: &WitnessFunction, cfg: &QuadratureConfig) -> Result<UnitBallCheck> {
    let phi = w.phi.as_ref().ok_or_else(|| Error::InvalidInput("unit-ball checks apply to hardy_test and bergman_test".into()))?;
    let f = w.to_sampled();
    match w.kind {
        WitnessKind::HardyTest { y, .. } => {
            let mut lines = Vec::new();
            for v in hardy_line_heights(y) {
                lines.push((v, modular(&f.restrict_to_line(v), phi, &Space::Line, cfg)?));
            }
            let m = lines.iter().map(|l| l.1).fold(0.0, f64::max);
            Ok(UnitBallCheck { modular: m, pass: m <= 1.0 + UNIT_BALL_SLACK, lines })
        }
        WitnessKind::BergmanTest { alpha, .. } => {
            let m = modular(&f, phi, &Space::HalfPlane(Measure::LebesgueAlpha { alpha }), cfg)?;
            Ok(UnitBallCheck { modular: m, pass: m <= 1.0 + UNIT_BALL_SLACK, lines: Vec::new() })
        }
        _ => Err(Error::InvalidInput("unit-ball checks apply to hardy_test and bergman_test".into())),
    }
}

/// `c·w` with the same structure; used for sanity checks in the failing direction.
pub fn scaled(w: &WitnessFunction, c: f64) -> WitnessFunction {
    WitnessFunction { amp: w.amp * c.abs(), ..w.clone() }
}

/// Which pointwise estimate to test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "snake_case")]
pub enum BoundContext {
    /// `|F(x+iy)| ≤ Φ⁻¹(2/(πy))·‖F‖`.
    Hardy,
    /// `|F(x+iy)| ≤ C·Φ⁻¹(1/y^{2+α})·‖F‖`.
    Bergman { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointwiseRow {
    pub x: f64,
    pub y: f64,
    pub modulus: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointwiseReport {
    pub verdict: Verdict,
    pub norm: f64,
    pub constant: f64,
    pub max_ratio: f64,
    pub rows: Vec<PointwiseRow>,
}

/// `(4·max(2^α, (2/3)^α)/π)^{1/ρ}`.
pub fn bergman_pointwise_constant(alpha: f64, rho: f64) -> f64 {
    (4.0 * 2f64.powf(alpha).max((2.0f64 / 3.0).powf(alpha)) / PI).powf(1.0 / rho)
}

/// Luxemburg norm of `f` in `H^Φ` (largest line norm over `ys`, boundary included) or in
/// `A^Φ_α`.
pub fn witness_norm(f: &SampledFunction, phi: &GrowthFunction, ctx: BoundContext, ys: &[f64], cfg: &QuadratureConfig) -> Result<f64> {
    match ctx {
        BoundContext::Hardy => {
            let p = line_norm_profile(f, phi, ys, 1e-10, cfg)?;
            if let Some(r) = p.rows.iter().find(|r| r.norm.is_none()) {
                return Err(Error::NotInSpace(format!("line y = {}: {}", r.y, r.error.clone().unwrap_or_default())));
            }
            Ok(p.rows.iter().filter_map(|r| r.norm).fold(0.0, f64::max))
        }
        BoundContext::Bergman { alpha } => {
            Ok(luxemburg_norm(f, phi, &Space::HalfPlane(Measure::LebesgueAlpha { alpha }), 1e-10, cfg)?.norm)
        }
    }
}

/// Ratios `|F(z)| / bound(z)` over `points`, with `norm` the Luxemburg norm of `F`.
pub fn pointwise_bound_check(
    f: &SampledFunction,
    phi: &GrowthFunction,
    ctx: BoundContext,
    norm: f64,
    points: &[(f64, f64)],
) -> Result<PointwiseReport> {
    if !(norm >= 0.0) {
        return Err(Error::InvalidInput(format!("norm = {norm}")));
    }
    let constant = match ctx {
        BoundContext::Hardy => 1.0,
        BoundContext::Bergman { alpha } => bergman_pointwise_constant(alpha, rho_for(phi)?),
    };
    let mut rows = Vec::with_capacity(points.len());
    for &(x, y) in points {
        check_point(x, y)?;
        let m = f.eval(x, y);
        let bound = match ctx {
            BoundContext::Hardy => phi.inverse_value(2.0 / (PI * y)),
            BoundContext::Bergman { alpha } => phi.inverse_value(y.powf(-(2.0 + alpha))),
        } * norm;
        let ratio = if m == 0.0 { 0.0 } else { m / bound };
        rows.push(PointwiseRow { x, y, modulus: m, ratio });
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let verdict = if max_ratio <= constant { Verdict::Pass } else { Verdict::Fail };
    Ok(PointwiseReport { verdict, norm, constant, max_ratio, rows })
}
