//! Certification of Carleson-type conditions on finite probe families: the box condition,
//! the Berezin-type integral condition, witness injections, and the power-function
//! embedding criteria.

use crate::error::{Error, Result};
use crate::grid::{trend, ScanGrid, Verdict};
use crate::growth::{quotient_monotone, GrowthFunction};
use crate::halfplane::{measure_of_square, CarlesonSquare, Density, Envelope, Interval, Measure, QuadratureConfig};
use crate::orlicz::{modular, Domain, SampledFunction, Space};
use crate::quadrature::{integrate_1d, Tolerance};
use crate::witness::{hardy_line_heights, rho_for, witness_norm, BoundContext, BoundaryData, WitnessFunction};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Box,
    Berezin,
    WitnessModular,
    WitnessWeak,
}

/// One probe: an interval (`param` = length) or a point (`param` = height).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub id: String,
    pub x: f64,
    pub param: f64,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub phi1: GrowthFunction,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi2: Option<GrowthFunction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
}

/// A hypothesis checked before running a condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub condition: Condition,
    pub parameters: Parameters,
    pub hypotheses: Vec<Hypothesis>,
    pub probes: Vec<Probe>,
    pub sup_estimate: f64,
    pub verdict: Verdict,
    /// Conditions quantified over all functions are only sampled on witnesses.
    pub witness_restricted: bool,
    pub flags: Vec<String>,
}

/// Intervals with lengths `2^k`, `k_min ≤ k ≤ k_max`, at each centre.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeFamily {
    pub centers: Vec<f64>,
    pub k_min: i32,
    pub k_max: i32,
}

impl Default for ProbeFamily {
    fn default() -> Self {
        ProbeFamily { centers: vec![-10.0, -1.0, 0.0, 1.0, 10.0], k_min: -20, k_max: 10 }
    }
}

/// Points `x + i·2^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZGrid {
    pub xs: Vec<f64>,
    pub k_min: i32,
    pub k_max: i32,
    pub k_step: usize,
}

impl Default for ZGrid {
    fn default() -> Self {
        ZGrid { xs: vec![-5.0, 0.0, 5.0], k_min: -15, k_max: 15, k_step: 1 }
    }
}

impl ZGrid {
    pub fn heights(&self) -> Vec<f64> {
        (self.k_min..=self.k_max).step_by(self.k_step.max(1)).map(|k| 2f64.powi(k)).collect()
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        self.heights().into_iter().flat_map(|y| self.xs.iter().map(move |&x| (x, y))).collect()
    }
}

/// Grid steps covering two decades when successive parameters differ by `ratio`.
fn two_decade_span(ratio: f64) -> usize {
    ((100f64).ln() / ratio.ln()).round().max(1.0) as usize
}

/// Trend verdict over the per-parameter suprema of `probes`, sorted by parameter.
fn verdict_of(probes: &[Probe], ratio: f64) -> (f64, Verdict) {
    let mut params: Vec<f64> = probes.iter().map(|p| p.param).collect();
    params.sort_by(f64::total_cmp);
    params.dedup();
    let per: Vec<f64> = params
        .iter()
        .filter_map(|&t| {
            probes
                .iter()
                .filter(|p| p.param == t && p.error.is_none())
                .map(|p| p.value)
                .reduce(f64::max)
        })
        .collect();
    if per.is_empty() {
        return (f64::NAN, Verdict::Inconclusive);
    }
    let sup = per.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (sup, trend(&per, two_decade_span(ratio)))
}

fn failure_flags(probes: &[Probe]) -> Vec<String> {
    let n = probes.iter().filter(|p| p.error.is_some()).count();
    if n == 0 {
        Vec::new()
    } else {
        vec![format!("{n} probe(s) failed and were excluded from the supremum")]
    }
}

/// `μ(Q_I)·Φ(1/|I|^s)` over the probe family.
///
/// ```
/// use carleson::carleson::{box_condition, ProbeFamily};
/// use carleson::grid::Verdict;
/// use carleson::growth::GrowthFunction;
/// use carleson::halfplane::{Measure, QuadratureConfig};
/// let r = box_condition(&Measure::LebesgueAlpha { alpha: 0.0 }, &GrowthFunction::power(2.0), 1.0,
///     &ProbeFamily::default(), &QuadratureConfig::default()).unwrap();
/// assert_eq!(r.verdict, Verdict::Bounded);
/// assert!((r.sup_estimate - 1.0).abs() < 1e-12);
/// ```
pub fn box_condition(mu: &Measure, phi: &GrowthFunction, s: f64, family: &ProbeFamily, cfg: &QuadratureConfig) -> Result<CertificationReport> {
    mu.validate()?;
    phi.validate()?;
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(format!("s = {s} must be positive")));
    }
    if family.k_min > family.k_max || family.centers.is_empty() {
        return Err(Error::InvalidInput("empty probe family".into()));
    }
    let specs: Vec<(f64, i32)> = (family.k_min..=family.k_max).flat_map(|k| family.centers.iter().map(move |&c| (c, k))).collect();
    let probes: Vec<Probe> = specs
        .par_iter()
        .map(|&(c, k)| {
            let len = 2f64.powi(k);
            let id = format!("c={c},len=2^{k}");
            let q = Interval::new(c, len).map(CarlesonSquare::new);
            match q.and_then(|q| measure_of_square(mu, &q, cfg)) {
                Ok(m) => {
                    let value = if m == 0.0 { 0.0 } else { m * phi.ln_value(-s * len.ln()).exp() };
                    Probe { id, x: c, param: len, value, error: None }
                }
                Err(Error::Divergent(_)) => Probe { id, x: c, param: len, value: f64::INFINITY, error: None },
                Err(e) => Probe { id, x: c, param: len, value: f64::NAN, error: Some(e.to_string()) },
            }
        })
        .collect();
    let (sup_estimate, verdict) = verdict_of(&probes, 2.0);
    Ok(CertificationReport {
        condition: Condition::Box,
        parameters: Parameters { s, alpha: None, phi1: phi.clone(), phi2: None, rho: None },
        hypotheses: Vec::new(),
        flags: failure_flags(&probes),
        probes,
        sup_estimate,
        verdict,
        witness_restricted: false,
    })
}

/// `|ω| ↦ A·(y/|ω − z̄|)^κ` as a sampled function with its exact envelope.
fn kernel_power(x: f64, y: f64, amp: f64, kappa: f64) -> SampledFunction {
    SampledFunction::new(format!("kernel({x},{y})"), Domain::HalfPlane, move |a, b| amp * (y / (a - x).hypot(b + y)).powf(kappa))
        .with_envelope(Envelope { x0: x, y0: y, amp, kappa, kappa_low: Some(kappa) })
}

fn berezin_hypotheses(phi1: &GrowthFunction, phi2: &GrowthFunction) -> Result<Vec<Hypothesis>> {
    let idx = phi1.estimate_indices(&ScanGrid::default())?;
    let class = if idx.lower >= 1.0 || idx.upper <= 1.0 { Verdict::Pass } else { Verdict::Fail };
    Ok(vec![
        Hypothesis { name: "Φ₂/Φ₁ non-decreasing".into(), verdict: quotient_monotone(phi1, phi2, &ScanGrid::default()) },
        Hypothesis { name: "Φ₁ convex (a_Φ₁ ≥ 1) or in ℒ (b_Φ₁ ≤ 1)".into(), verdict: class },
    ])
}

fn require(h: &[Hypothesis]) -> Result<()> {
    if let Some(bad) = h.iter().find(|h| h.verdict != Verdict::Pass) {
        return Err(Error::PreconditionViolation(format!("hypothesis failed: {}", bad.name)));
    }
    Ok(())
}

/// `sup_z ∫ Φ₂(Φ₁⁻¹(1/y^s)·(y/|ω − z̄|)^{2s/ρ}) dμ(ω)` over the z-grid.
pub fn berezin_condition(
    mu: &Measure,
    phi1: &GrowthFunction,
    phi2: &GrowthFunction,
    s: f64,
    zs: &ZGrid,
    cfg: &QuadratureConfig,
) -> Result<CertificationReport> {
    mu.validate()?;
    phi1.validate()?;
    phi2.validate()?;
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(format!("s = {s} must be positive")));
    }
    let hypotheses = berezin_hypotheses(phi1, phi2)?;
    require(&hypotheses)?;
    let rho = rho_for(phi1)?;
    let kappa = 2.0 * s / rho;
    let space = Space::HalfPlane(mu.clone());
    let probes: Vec<Probe> = zs
        .points()
        .par_iter()
        .map(|&(x, y)| {
            let amp = phi1.inverse_ln(-s * y.ln()).exp();
            let id = format!("x={x},y={y:e}");
            match modular(&kernel_power(x, y, amp, kappa), phi2, &space, cfg) {
                Ok(v) => Probe { id, x, param: y, value: v, error: None },
                Err(Error::NotInSpace(_)) | Err(Error::Divergent(_)) => {
                    Probe { id, x, param: y, value: f64::INFINITY, error: None }
                }
                Err(e) => Probe { id, x, param: y, value: f64::NAN, error: Some(e.to_string()) },
            }
        })
        .collect();
    let (sup_estimate, verdict) = verdict_of(&probes, 2f64.powi(zs.k_step as i32));
    Ok(CertificationReport {
        condition: Condition::Berezin,
        parameters: Parameters { s, alpha: None, phi1: phi1.clone(), phi2: Some(phi2.clone()), rho: Some(rho) },
        hypotheses,
        flags: failure_flags(&probes),
        probes,
        sup_estimate,
        verdict,
        witness_restricted: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingResult {
    pub verdict: Verdict,
    /// `sup_t Φ₂(Φ₁⁻¹(t^s))/t^{2+α}` on the grid.
    pub constant: f64,
    pub at: f64,
    pub ratios: Vec<(f64, f64)>,
}

/// `Φ₁⁻¹(t^s) ≤ Φ₂⁻¹(C·t^{2+α})`, i.e. `Φ₂(Φ₁⁻¹(t^s)) ≤ C·t^{2+α}`, on a log grid.
pub fn embedding_criterion(phi1: &GrowthFunction, phi2: &GrowthFunction, s: f64, alpha: f64, grid: &ScanGrid) -> Result<EmbeddingResult> {
    grid.validate()?;
    phi1.validate()?;
    phi2.validate()?;
    if !(s > 0.0) || !(alpha > -1.0) {
        return Err(Error::InvalidParameter(format!("need s > 0 and alpha > -1, got s = {s}, alpha = {alpha}")));
    }
    let us = grid.log_points();
    let ratios: Vec<(f64, f64)> = us
        .iter()
        .map(|&u| (u.exp(), (phi2.ln_value(phi1.inverse_ln(s * u)) - (2.0 + alpha) * u).exp()))
        .collect();
    let vals: Vec<f64> = ratios.iter().map(|r| r.1).collect();
    let sup = crate::grid::SupEstimate::from_samples(&grid.values(), &vals, grid.steps_per(2.0));
    let verdict = match sup.verdict {
        Verdict::Bounded => Verdict::Pass,
        Verdict::UnboundedTrend => Verdict::Fail,
        v => v,
    };
    Ok(EmbeddingResult { verdict, constant: sup.sup, at: sup.at, ratios })
}

/// `dμ = dx dy/(y²·Φ(1/y^s))`, for `Φ ∈ 𝒰 ∩ ∇₂` and `s ≥ 1`.
pub fn canonical_measure(phi: &GrowthFunction, s: f64) -> Result<Measure> {
    if !(s >= 1.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!("s = {s} must be at least 1")));
    }
    let class = phi.classify(&ScanGrid::default())?;
    if class.in_u.is_none() {
        return Err(Error::PreconditionViolation(format!("Φ is not in 𝒰: a_Φ = {}", class.indices.lower)));
    }
    if class.nabla2.verdict != Verdict::Bounded {
        return Err(Error::PreconditionViolation(format!("Φ fails ∇₂ (verdict {:?})", class.nabla2.verdict)));
    }
    Ok(Measure::Density(Density::Canonical { phi: phi.clone(), s }))
}

/// Which space the witnesses are normalised in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "snake_case")]
pub enum InjectionContext {
    /// `F_z` in `H^{Φ₁}`, with `s = 1`.
    Hardy,
    /// `G_z` in `A^{Φ₁}_α`, with `s = 2 + α`.
    Bergman { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectionReport {
    pub modular: CertificationReport,
    pub weak: CertificationReport,
}

/// `μ({ω ∈ ℂ₊ : |ω − z̄₀| < R})`.
fn disc_measure(mu: &Measure, x0: f64, y0: f64, r: f64) -> Result<f64> {
    if r <= y0 {
        return Ok(0.0);
    }
    let top = r - y0;
    let half = |y: f64| (r * r - (y + y0) * (y + y0)).max(0.0).sqrt();
    let tol = Tolerance { abs: 0.0, rel: 1e-10, max_cells: 4000 };
    match mu {
        Measure::Atomic(atoms) => Ok(atoms.iter().filter(|a| a.y > 0.0 && (a.x - x0).hypot(a.y + y0) < r).map(|a| a.mass).sum()),
        Measure::LebesgueAlpha { alpha } => Ok(integrate_1d(|y| 2.0 * half(y) * y.powf(*alpha), 0.0, top, tol)?.value),
        Measure::Density(_) => {
            let outer = |y: f64| {
                let w = half(y);
                if w == 0.0 {
                    return 0.0;
                }
                integrate_1d(|x| mu.weight(x, y).unwrap_or(0.0), x0 - w, x0 + w, tol).map_or(f64::NAN, |e| e.value)
            };
            let v = integrate_1d(outer, 0.0, top, tol)?.value;
            if v.is_nan() {
                return Err(Error::AccuracyFailure { partial: v, error: f64::INFINITY });
            }
            Ok(v)
        }
    }
}

/// Conditions (iii) and (iv) restricted to witnesses: `∫ Φ₂(|F|/‖F‖) dμ` and
/// `sup_λ Φ₂(λ)·μ({|F| > λ‖F‖})` for `F = F_z` or `G_z` over the z-grid, plus, in the Hardy
/// context, Poisson extensions of unit-interval indicators (modular only).
pub fn witness_injection_test(
    mu: &Measure,
    phi1: &GrowthFunction,
    phi2: &GrowthFunction,
    ctx: InjectionContext,
    zs: &ZGrid,
    cfg: &QuadratureConfig,
) -> Result<InjectionReport> {
    mu.validate()?;
    let hypotheses = berezin_hypotheses(phi1, phi2)?;
    let rho = rho_for(phi1)?;
    let (s, alpha, bctx) = match ctx {
        InjectionContext::Hardy => (1.0, None, BoundContext::Hardy),
        InjectionContext::Bergman { alpha } => (2.0 + alpha, Some(alpha), BoundContext::Bergman { alpha }),
    };
    let space = Space::HalfPlane(mu.clone());
    let rows: Vec<(Probe, Probe)> = zs
        .points()
        .par_iter()
        .map(|&(x, y)| {
            let id = format!("x={x},y={y:e}");
            let fail = |e: Error| {
                let p = Probe { id: id.clone(), x, param: y, value: f64::NAN, error: Some(e.to_string()) };
                (p.clone(), p)
            };
            let w = match ctx {
                InjectionContext::Hardy => WitnessFunction::hardy_test((x, y), phi1),
                InjectionContext::Bergman { alpha } => WitnessFunction::bergman_test((x, y), phi1, alpha),
            };
            let w = match w {
                Ok(w) => w,
                Err(e) => return fail(e),
            };
            let f = w.to_sampled();
            let norm = match witness_norm(&f, phi1, bctx, &hardy_line_heights(y), cfg) {
                Ok(n) => n,
                Err(e) => return fail(e),
            };
            let m = match modular(&f.scaled(1.0 / norm), phi2, &space, cfg) {
                Ok(v) => Probe { id: id.clone(), x, param: y, value: v, error: None },
                Err(Error::NotInSpace(_)) => Probe { id: id.clone(), x, param: y, value: f64::INFINITY, error: None },
                Err(e) => Probe { id: id.clone(), x, param: y, value: f64::NAN, error: Some(e.to_string()) },
            };
            // |F| > λ·norm on the disc |ω − z̄| < y·(amp/(λ·norm))^{1/κ}.
            let e = f.envelope.expect("closed-form witnesses carry an envelope");
            let top = e.amp / norm;
            let mut best = 0.0f64;
            let mut err = None;
            for k in 1..=80 {
                let lambda = top * 2f64.powf(-(k as f64) / 2.0);
                let r = y * (top / lambda).powf(1.0 / e.kappa);
                match disc_measure(mu, x, y, r) {
                    Ok(meas) => best = best.max(phi2.value(lambda) * meas),
                    Err(er) => {
                        err = Some(er.to_string());
                        break;
                    }
                }
            }
            let weak = Probe { id, x, param: y, value: if err.is_some() { f64::NAN } else { best }, error: err };
            (m, weak)
        })
        .collect();
    let (mut mod_probes, weak_probes): (Vec<Probe>, Vec<Probe>) = rows.into_iter().unzip();
    let mut flags = Vec::new();
    if matches!(ctx, InjectionContext::Hardy) {
        for c in [-1.0, 0.0, 1.0] {
            let data = BoundaryData::Indicator { a: c - 0.5, b: c + 0.5, height: 1.0 };
            let id = format!("poisson chi[{},{}]", c - 0.5, c + 0.5);
            let w = WitnessFunction::poisson(data).to_sampled();
            let res = witness_norm(&w, phi1, BoundContext::Hardy, &hardy_line_heights(1.0), cfg)
                .and_then(|n| modular(&w.scaled(1.0 / n), phi2, &space, cfg));
            match res {
                Ok(v) => flags.push(format!("{id}: modular {v:e}")),
                Err(e) => flags.push(format!("{id}: {e}")),
            }
        }
    }
    let ratio = 2f64.powi(zs.k_step as i32);
    let (sup_m, v_m) = verdict_of(&mod_probes, ratio);
    let (sup_w, v_w) = verdict_of(&weak_probes, ratio);
    let params = Parameters { s, alpha, phi1: phi1.clone(), phi2: Some(phi2.clone()), rho: Some(rho) };
    let mut fm = failure_flags(&mod_probes);
    fm.extend(flags);
    mod_probes.sort_by(|a, b| a.param.total_cmp(&b.param).then(a.x.total_cmp(&b.x)));
    Ok(InjectionReport {
        modular: CertificationReport {
            condition: Condition::WitnessModular,
            parameters: params.clone(),
            hypotheses: hypotheses.clone(),
            probes: mod_probes,
            sup_estimate: sup_m,
            verdict: v_m,
            witness_restricted: true,
            flags: fm,
        },
        weak: CertificationReport {
            condition: Condition::WitnessWeak,
            parameters: params,
            hypotheses,
            flags: failure_flags(&weak_probes),
            probes: weak_probes,
            sup_estimate: sup_w,
            verdict: v_w,
            witness_restricted: true,
        },
    })
}

/// `5π/96`: the Berezin value for `V₀`, `Φ₁ = t²`, `Φ₂ = t⁴`, `s = 1`.
pub const BEREZIN_P2_Q4: f64 = 5.0 * PI / 96.0;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfplane::Atom;
    use approx::assert_relative_eq;

    fn v0() -> Measure {
        Measure::LebesgueAlpha { alpha: 0.0 }
    }

    #[test]
    fn box_examples() {
        let cfg = QuadratureConfig::default();
        let fam = ProbeFamily::default();
        let r = box_condition(&v0(), &GrowthFunction::power(2.0), 1.0, &fam, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Bounded);
        for p in &r.probes {
            assert_relative_eq!(p.value, 1.0, max_relative = 1e-13);
        }
        let r = box_condition(&v0(), &GrowthFunction::power(3.0), 1.0, &fam, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::UnboundedTrend);
        let atom = Measure::Atomic(vec![Atom { x: 0.0, y: 1.0, mass: 1.0 }]);
        let r = box_condition(&atom, &GrowthFunction::power(1.0), 1.0, &fam, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Bounded);
        assert!(r.sup_estimate <= 1.0);
    }

    #[test]
    fn berezin_examples() {
        let cfg = QuadratureConfig::default();
        let zs = ZGrid { k_min: -6, k_max: 6, ..ZGrid::default() };
        let p2 = GrowthFunction::power(2.0);
        let r = berezin_condition(&v0(), &p2, &GrowthFunction::power(4.0), 1.0, &zs, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Bounded);
        for p in &r.probes {
            assert_relative_eq!(p.value, BEREZIN_P2_Q4, max_relative = 1e-6);
        }
        let r = berezin_condition(&v0(), &p2, &GrowthFunction::power(3.0), 1.0, &zs, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::UnboundedTrend);
        let atom = Measure::Atomic(vec![Atom { x: 0.0, y: 1.0, mass: 1.0 }]);
        let r = berezin_condition(&atom, &p2, &p2, 1.0, &zs, &cfg).unwrap();
        assert!(r.sup_estimate.is_finite());
        let e = berezin_condition(&v0(), &p2, &GrowthFunction::power(1.0), 1.0, &zs, &cfg);
        assert!(matches!(e, Err(Error::PreconditionViolation(_))));
    }

    #[test]
    fn embedding_examples() {
        let g = ScanGrid::default();
        let p2 = GrowthFunction::power(2.0);
        let r = embedding_criterion(&p2, &GrowthFunction::power(4.0), 1.0, 0.0, &g).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_relative_eq!(r.constant, 1.0, max_relative = 1e-12);
        let r = embedding_criterion(&p2, &GrowthFunction::power(3.0), 1.0, 0.0, &g).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let r = embedding_criterion(&p2, &p2, 2.0, 0.0, &g).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn canonical_examples() {
        let cfg = QuadratureConfig::default();
        let fam = ProbeFamily { centers: vec![0.0, 3.0], k_min: -10, k_max: 10 };
        let p2 = GrowthFunction::power(2.0);
        let mu = canonical_measure(&p2, 1.0).unwrap();
        let r = box_condition(&mu, &p2, 1.0, &fam, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Bounded);
        assert_relative_eq!(r.sup_estimate, 1.0, max_relative = 1e-8);
        let mu = canonical_measure(&p2, 2.0).unwrap();
        let r = box_condition(&mu, &p2, 2.0, &fam, &cfg).unwrap();
        assert_relative_eq!(r.sup_estimate, 1.0 / 3.0, max_relative = 1e-8);
        assert!(matches!(canonical_measure(&GrowthFunction::power(1.0), 1.0), Err(Error::PreconditionViolation(_))));
    }

    #[test]
    fn disc_measure_matches_half_disc_area() {
        // Centre −i, radius 2: the part above the axis is a circular segment.
        let r: f64 = 2.0;
        let h = 1.0;
        let seg = r * r * ((r - h) / r).acos() - (r - h) * (2.0 * r * h - h * h).sqrt();
        assert_relative_eq!(disc_measure(&v0(), 0.0, 1.0, 2.0).unwrap(), seg, max_relative = 1e-9);
    }

    #[test]
    fn injection_with_scale_invariance() {
        let cfg = QuadratureConfig::default();
        let zs = ZGrid { xs: vec![0.0], k_min: -4, k_max: 4, k_step: 2 };
        let r = witness_injection_test(&v0(), &GrowthFunction::power(2.0), &GrowthFunction::power(4.0), InjectionContext::Hardy, &zs, &cfg).unwrap();
        assert_eq!(r.modular.verdict, Verdict::Bounded);
        let first = r.modular.probes[0].value;
        for p in &r.modular.probes {
            assert_relative_eq!(p.value, first, max_relative = 1e-6);
        }
        // ‖F_z‖ = 1/√2 and Φ₁⁻¹(1/(πy)) = (πy)^{-1/2}, so the modular is 4·(5π/96)/π².
        assert_relative_eq!(first, 4.0 * BEREZIN_P2_Q4 / (PI * PI), max_relative = 1e-6);
        assert_eq!(r.weak.verdict, Verdict::Bounded);
        assert!(r.weak.sup_estimate.is_finite());
    }
}
