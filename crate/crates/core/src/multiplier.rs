//! Multiplier windows `ω(t) = Φ₂⁻¹(1/t^target)/Φ₁⁻¹(1/t^source)`, the weighted sup-norms
//! built on them, and regime classification for pointwise multipliers.

use crate::error::{Error, Result};
use crate::grid::{trend, ScanGrid, Verdict};
use crate::growth::{quotient_monotone, GrowthFunction};
use crate::halfplane::{Measure, QuadratureConfig};
use crate::orlicz::{luxemburg_norm, SampledFunction, Space};
use crate::witness::WitnessFunction;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// `ω(t) = Φ₂⁻¹(t^{-target}) / Φ₁⁻¹(t^{-source})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaWindow {
    pub phi1: GrowthFunction,
    pub phi2: GrowthFunction,
    pub source: f64,
    pub target: f64,
}

impl OmegaWindow {
    /// Hardy source (`s = 1`) into `A^{Φ₂}_α`.
    pub fn hardy(phi1: &GrowthFunction, phi2: &GrowthFunction, alpha: f64) -> Result<Self> {
        OmegaWindow::new(phi1, phi2, 1.0, 2.0 + alpha)
    }

    /// `A^{Φ₁}_α` into `A^{Φ₂}_β`.
    pub fn bergman(phi1: &GrowthFunction, phi2: &GrowthFunction, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} must exceed -1")));
        }
        OmegaWindow::new(phi1, phi2, 2.0 + alpha, 2.0 + beta)
    }

    pub fn new(phi1: &GrowthFunction, phi2: &GrowthFunction, source: f64, target: f64) -> Result<Self> {
        phi1.validate()?;
        phi2.validate()?;
        if !(source > 0.0 && target > 1.0 && source.is_finite() && target.is_finite()) {
            return Err(Error::InvalidParameter(format!("exponents source = {source}, target = {target}")));
        }
        Ok(OmegaWindow { phi1: phi1.clone(), phi2: phi2.clone(), source, target })
    }

    /// Weight of the target Bergman space.
    pub fn target_alpha(&self) -> f64 {
        self.target - 2.0
    }

    /// `ln ω(e^u)`, finite for every real `u`.
    pub fn ln_omega(&self, u: f64) -> f64 {
        self.phi2.inverse_ln(-self.target * u) - self.phi1.inverse_ln(-self.source * u)
    }
}

/// `ω(t)`.
///
/// ```
/// use carleson::growth::GrowthFunction;
/// use carleson::multiplier::{omega_eval, OmegaWindow};
/// let w = OmegaWindow::hardy(&GrowthFunction::power(0.5), &GrowthFunction::power(2.0), 0.0).unwrap();
/// assert!((omega_eval(&w, 3.0).unwrap() - 3.0).abs() < 1e-12);
/// ```
pub fn omega_eval(w: &OmegaWindow, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    Ok(w.ln_omega(t.ln()).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    HOmegaInfinity,
    HInfinity,
    ZeroOnly,
    Indeterminate,
}

/// Thresholds for [`regime_classify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeConfig {
    /// `ω ≈ 1` means `c ≤ ω ≤ 1/c` on the grid.
    pub c: f64,
    /// `ω → 0` at 0 means `ω(t_min) < ratio·ω(t_mid)` with `ω` monotone.
    pub ratio: f64,
}

impl Default for RegimeConfig {
    fn default() -> Self {
        RegimeConfig { c: 0.5, ratio: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeDiagnostics {
    pub omega_min: f64,
    pub omega_max: f64,
    pub comparable_to_one: bool,
    /// `ω(t_min)/ω(t_mid)`.
    pub limit_ratio: f64,
    pub monotone: bool,
    pub vanishes_at_zero: bool,
    /// `b_Φ₁` and `a_Φ₂`.
    pub b_phi1: f64,
    pub a_phi2: f64,
    pub index_gap: bool,
    pub quotient_monotone: Verdict,
    pub phi2_in_u_tilde: bool,
    pub phi2_in_l_tilde: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub regime: Regime,
    pub omega_samples: Vec<(f64, f64)>,
    pub diagnostics: RegimeDiagnostics,
    pub grid: ScanGrid,
}

/// Regime of the multiplier space, tried in the order `H^∞`, `{0}`, `H_ω^∞`.
///
/// `ω` is sampled on `grid`; reaching far into `t → 0` matters because a slowly vanishing
/// window such as `t^{0.1}` only drops below the ratio threshold at very small `t`.
pub fn regime_classify(w: &OmegaWindow, grid: &ScanGrid, cfg: &RegimeConfig) -> Result<RegimeReport> {
    grid.validate()?;
    let us = grid.log_points();
    let ln_w: Vec<f64> = us.iter().map(|&u| w.ln_omega(u)).collect();
    if ln_w.iter().any(|v| !v.is_finite()) {
        return Err(Error::AccuracyFailure { partial: f64::NAN, error: f64::INFINITY });
    }
    let omega: Vec<f64> = ln_w.iter().map(|v| v.exp()).collect();
    let (lo, hi) = ln_w.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let comparable_to_one = lo >= cfg.c.ln() && hi <= -cfg.c.ln();
    let mid = ln_w[ln_w.len() / 2];
    let limit_ratio = (ln_w[0] - mid).exp();
    let monotone = ln_w.windows(2).all(|p| p[1] >= p[0] - 1e-12 * p[0].abs().max(1.0));
    let vanishes_at_zero = monotone && ln_w[0] - mid < cfg.ratio.ln();
    let idx_grid = ScanGrid::default();
    let b1 = w.phi1.estimate_indices(&idx_grid)?.upper;
    let a2 = w.phi2.estimate_indices(&idx_grid)?.lower;
    let index_gap = b1 < a2;
    let qm = quotient_monotone(&w.phi1, &w.phi2, &idx_grid);
    let class = w.phi2.classify(&idx_grid)?;
    let regime = if qm != Verdict::Pass {
        Regime::Indeterminate
    } else if comparable_to_one {
        Regime::HInfinity
    } else if vanishes_at_zero {
        Regime::ZeroOnly
    } else if index_gap {
        Regime::HOmegaInfinity
    } else {
        Regime::Indeterminate
    };
    Ok(RegimeReport {
        regime,
        omega_samples: grid.values().into_iter().zip(omega).collect(),
        diagnostics: RegimeDiagnostics {
            omega_min: lo.exp(),
            omega_max: hi.exp(),
            comparable_to_one,
            limit_ratio,
            monotone,
            vanishes_at_zero,
            b_phi1: b1,
            a_phi2: a2,
            index_gap,
            quotient_monotone: qm,
            phi2_in_u_tilde: class.tilde.in_u_tilde,
            phi2_in_l_tilde: class.tilde.in_l_tilde,
        },
        grid: *grid,
    })
}

/// Grid supremum of `|F(z)|/ω(Im z)`, a lower bound for the `H_ω^∞` norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HOmegaNorm {
    pub value: f64,
    pub at: (f64, f64),
}

pub fn h_omega_norm(f: &SampledFunction, w: &OmegaWindow, points: &[(f64, f64)]) -> Result<HOmegaNorm> {
    let mut best = HOmegaNorm { value: 0.0, at: (f64::NAN, f64::NAN) };
    for &(x, y) in points {
        let r = f.eval(x, y) / omega_eval(w, y)?;
        if r.is_nan() {
            return Err(Error::Domain(format!("|F|/ω is undefined at ({x}, {y})")));
        }
        if r > best.value || best.at.0.is_nan() {
            best = HOmegaNorm { value: r, at: (x, y) };
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductRow {
    pub label: String,
    pub y: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductReport {
    /// Bounded when the product norms stay bounded along the family.
    pub verdict: Verdict,
    pub max_norm: f64,
    pub rows: Vec<ProductRow>,
    /// `sup |G(z)|/ω(Im z)` over the witness centres.
    pub h_omega_constant: HOmegaNorm,
}

/// `‖G·F‖` in `A^{Φ₂}_{target−2}` over a family of unit-ball witnesses, ordered by the
/// height of their centres.
pub fn multiplier_product_test(
    g: &SampledFunction,
    family: &[WitnessFunction],
    w: &OmegaWindow,
    cfg: &QuadratureConfig,
) -> Result<ProductReport> {
    let space = Space::HalfPlane(Measure::LebesgueAlpha { alpha: w.target_alpha() });
    let mut members: Vec<(f64, f64, &WitnessFunction)> = family
        .iter()
        .map(|m| match m.kind {
            crate::witness::WitnessKind::HardyTest { x, y } | crate::witness::WitnessKind::BergmanTest { x, y, .. } => Ok((y, x, m)),
            _ => Err(Error::InvalidInput("product tests use hardy_test or bergman_test witnesses".into())),
        })
        .collect::<Result<_>>()?;
    members.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let rows: Vec<ProductRow> = members
        .par_iter()
        .map(|&(y, _, m)| {
            let f = m.to_sampled();
            let gg = g.clone();
            let mut prod = SampledFunction::new(format!("G*{}", f.label), f.domain, move |a, b| gg.eval(a, b) * f.eval(a, b));
            if let Some(e) = m.to_sampled().envelope {
                prod = prod.with_focus(e.x0, e.y0);
            }
            match luxemburg_norm(&prod, &w.phi2, &space, 1e-10, cfg) {
                Ok(r) => ProductRow { label: prod.label.clone(), y, norm: Some(r.norm), error: None },
                Err(Error::NotInSpace(_)) => ProductRow { label: prod.label.clone(), y, norm: Some(f64::INFINITY), error: None },
                Err(e) => ProductRow { label: prod.label.clone(), y, norm: None, error: Some(e.to_string()) },
            }
        })
        .collect();
    let mut per_y: Vec<f64> = Vec::new();
    let mut last_y = f64::NAN;
    for r in &rows {
        if let Some(n) = r.norm {
            if r.y == last_y {
                let l = per_y.last_mut().expect("pushed before");
                *l = l.max(n);
            } else {
                per_y.push(n);
                last_y = r.y;
            }
        }
    }
    let max_norm = per_y.iter().copied().fold(0.0, f64::max);
    let ys: Vec<f64> = members.iter().map(|m| m.0).collect();
    let span = if ys.len() > 1 {
        let step = (ys[ys.len() - 1] / ys[0]).ln() / (ys.len() - 1) as f64;
        if step > 0.0 { ((100f64).ln() / step).round().max(1.0) as usize } else { 1 }
    } else {
        1
    };
    let verdict = if max_norm == 0.0 {
        Verdict::Bounded
    } else if per_y.is_empty() {
        Verdict::Inconclusive
    } else {
        trend(&per_y, span)
    };
    let pts: Vec<(f64, f64)> = members.iter().map(|m| (m.1, m.0)).collect();
    let h_omega_constant = h_omega_norm(g, w, &pts)?;
    Ok(ProductReport { verdict, max_norm, rows, h_omega_constant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orlicz::Domain;
    use approx::assert_relative_eq;

    fn p(x: f64) -> GrowthFunction {
        GrowthFunction::power(x)
    }

    #[test]
    fn omega_examples() {
        let w = OmegaWindow::hardy(&p(2.0), &p(4.0), 0.0).unwrap();
        assert_relative_eq!(omega_eval(&w, 7.0).unwrap(), 1.0, max_relative = 1e-14);
        let w = OmegaWindow::hardy(&p(2.0), &p(2.0), 0.0).unwrap();
        assert_relative_eq!(omega_eval(&w, 4.0).unwrap(), 0.5, max_relative = 1e-14);
        assert!(matches!(omega_eval(&w, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn regime_examples() {
        let g = ScanGrid::new(1e-8, 1e8, 512).unwrap();
        let c = RegimeConfig::default();
        let r = regime_classify(&OmegaWindow::hardy(&p(2.0), &p(4.0), 0.0).unwrap(), &g, &c).unwrap();
        assert_eq!(r.regime, Regime::HInfinity);
        let r = regime_classify(&OmegaWindow::hardy(&p(0.5), &p(2.0), 0.0).unwrap(), &g, &c).unwrap();
        assert_eq!(r.regime, Regime::ZeroOnly);
        assert!(r.diagnostics.index_gap);
        // Bergman source: ω(t) = t^{-2/4}/t^{-2/2} = t^{1/2}, which vanishes at 0.
        let r = regime_classify(&OmegaWindow::bergman(&p(2.0), &p(4.0), 0.0, 0.0).unwrap(), &g, &c).unwrap();
        assert_eq!(r.regime, Regime::ZeroOnly);
        let r = regime_classify(&OmegaWindow::bergman(&p(2.0), &p(4.0), 0.0, 2.0).unwrap(), &g, &c).unwrap();
        assert_eq!(r.regime, Regime::HInfinity);
        let r = regime_classify(&OmegaWindow::hardy(&p(1.0), &p(4.0), 1.0).unwrap(), &g, &c).unwrap();
        assert_eq!(r.regime, Regime::HOmegaInfinity);
    }

    #[test]
    fn h_omega_examples() {
        let one = SampledFunction::new("1", Domain::HalfPlane, |_, _| 1.0);
        let w = OmegaWindow::hardy(&p(2.0), &p(4.0), 0.0).unwrap();
        let pts: Vec<(f64, f64)> = (-10..=10).map(|k| (0.3 * k as f64, 2f64.powi(k))).collect();
        assert_relative_eq!(h_omega_norm(&one, &w, &pts).unwrap().value, 1.0, max_relative = 1e-14);
        let w2 = OmegaWindow::hardy(&p(2.0), &p(2.0), 0.0).unwrap();
        let f = SampledFunction::new("1/(z+i)", Domain::HalfPlane, |x, y| 1.0 / x.hypot(y + 1.0));
        let n = h_omega_norm(&f, &w2, &pts).unwrap();
        assert!(n.value <= 0.5 + 1e-12);
        let n3 = h_omega_norm(&f.scaled(-3.0), &w2, &pts).unwrap();
        assert_relative_eq!(n3.value, 3.0 * n.value, max_relative = 1e-15);
    }

    #[test]
    fn product_examples() {
        let cfg = QuadratureConfig::default();
        let one = SampledFunction::new("1", Domain::HalfPlane, |_, _| 1.0);
        let fam = |phi: &GrowthFunction| -> Vec<WitnessFunction> {
            (-6..=2).step_by(2).map(|k| WitnessFunction::hardy_test((0.0, 2f64.powi(k)), phi).unwrap()).collect()
        };
        let w = OmegaWindow::hardy(&p(2.0), &p(4.0), 0.0).unwrap();
        let r = multiplier_product_test(&one, &fam(&p(2.0)), &w, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Bounded, "{r:?}");
        let w = OmegaWindow::hardy(&p(0.5), &p(2.0), 0.0).unwrap();
        let r = multiplier_product_test(&one, &fam(&p(0.5)), &w, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::UnboundedTrend, "{r:?}");
        let zero = SampledFunction::new("0", Domain::HalfPlane, |_, _| 0.0);
        let r = multiplier_product_test(&zero, &fam(&p(2.0)), &w, &cfg).unwrap();
        assert_eq!(r.max_norm, 0.0);
    }
}
