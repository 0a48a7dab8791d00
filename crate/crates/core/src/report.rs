//! Run configurations, command dispatch and versioned JSON reports.
//!
//! A run is a command name plus a JSON configuration document. [`run`] always yields a
//! [`Report`]; its `exit_code` is 0 when the computation completed (whatever the verdict),
//! 2 on a precondition violation, 3 on an accuracy failure and 64 on a usage error.

use crate::carleson::{
    berezin_condition, box_condition, canonical_measure, embedding_criterion, witness_injection_test, Hypothesis,
    InjectionContext, ProbeFamily, ZGrid, BEREZIN_P2_Q4,
};
use crate::error::{Error, Result};
use crate::expr::{parse_expression, VarContext};
use crate::grid::{ScanGrid, Verdict};
use crate::growth::GrowthFunction;
use crate::halfplane::{integrate, Atom, Density, Envelope, FnIntegrand, Measure, QuadratureConfig};
use crate::multiplier::{regime_classify, OmegaWindow, RegimeConfig};
use crate::special::oracle_kernel_integral;
use crate::witness::{bergman_constant, rho_for, verify_unit_ball, WitnessFunction, WitnessSpec};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub const SCHEMA: &str = "report_v1";

pub const SEMANTICS: &str = "grid-certified: every supremum, infimum and verdict refers to the finite grids \
echoed under inputs; no claim is made for parameters outside them";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Indices,
    Classify,
    CertifyBox,
    CertifyBerezin,
    EmbedCheck,
    Canonical,
    WitnessTest,
    Multiplier,
    OracleValidate,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Indices,
        Command::Classify,
        Command::CertifyBox,
        Command::CertifyBerezin,
        Command::EmbedCheck,
        Command::Canonical,
        Command::WitnessTest,
        Command::Multiplier,
        Command::OracleValidate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Indices => "indices",
            Command::Classify => "classify",
            Command::CertifyBox => "certify-box",
            Command::CertifyBerezin => "certify-berezin",
            Command::EmbedCheck => "embed-check",
            Command::Canonical => "canonical",
            Command::WitnessTest => "witness-test",
            Command::Multiplier => "multiplier",
            Command::OracleValidate => "oracle-validate",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown command `{s}`")))
    }
}

/// A measure on the upper half-plane as written in a configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    /// `y^α dx dy`.
    LebesgueAlpha { alpha: f64 },
    /// Density given as an expression in `x` and `y`.
    Density { expr: String },
    /// `dx dy/(y² Φ(1/y^s))`.
    Canonical { phi: GrowthFunction, s: f64 },
    Atomic { atoms: Vec<Atom> },
}

impl MeasureSpec {
    pub fn build(&self) -> Result<Measure> {
        let mu = match self {
            MeasureSpec::LebesgueAlpha { alpha } => Measure::LebesgueAlpha { alpha: *alpha },
            MeasureSpec::Density { expr } => Measure::Density(Density::Expression {
                expr: Arc::new(parse_expression(expr, VarContext::Plane)?),
                source: expr.clone(),
            }),
            MeasureSpec::Canonical { phi, s } => Measure::Density(Density::Canonical { phi: phi.clone(), s: *s }),
            MeasureSpec::Atomic { atoms } => Measure::Atomic(atoms.clone()),
        };
        mu.validate()?;
        Ok(mu)
    }
}

/// Source and target spaces of a multiplier problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum WindowSpec {
    /// `H^{Φ₁}` into `A^{Φ₂}_α`.
    Hardy { alpha: f64 },
    /// `A^{Φ₁}_α` into `A^{Φ₂}_β`.
    Bergman { alpha: f64, beta: f64 },
}

/// One run. Which fields are read depends on the command; unread fields are echoed but
/// otherwise ignored, and missing optional fields take documented defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<GrowthFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi1: Option<GrowthFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi2: Option<GrowthFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<WitnessSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<InjectionContext>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<ScanGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<ProbeFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zgrid: Option<ZGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<RegimeConfig>,
    /// `(α, β, y)` for `oracle-validate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triples: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Report path; a command-line `--out` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl RunConfig {
    pub fn from_json(src: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(src).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for phi in [&self.phi, &self.phi1, &self.phi2].into_iter().flatten() {
            phi.validate()?;
        }
        if let Some(q) = &self.quadrature {
            q.validate()?;
        }
        if let Some(g) = &self.grid {
            g.validate()?;
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return Err(Error::InvalidParameter(format!("tolerance = {t} must be positive")));
            }
        }
        if let Some(r) = &self.regime {
            if !(r.c > 0.0 && r.c <= 1.0 && r.ratio > 0.0 && r.ratio < 1.0) {
                return Err(Error::InvalidParameter(format!("regime thresholds {r:?}")));
            }
        }
        Ok(())
    }

    fn need<'a, T>(field: &'a Option<T>, name: &str) -> Result<&'a T> {
        field.as_ref().ok_or_else(|| Error::InvalidInput(format!("missing field `{name}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Completed,
    PreconditionViolation,
    AccuracyFailure,
    UsageError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Completed => 0,
            Status::PreconditionViolation => 2,
            Status::AccuracyFailure => 3,
            Status::UsageError => 64,
        }
    }

    pub fn of_error(e: &Error) -> Status {
        match e {
            Error::PreconditionViolation(_) | Error::Divergent(_) | Error::NotInSpace(_) => Status::PreconditionViolation,
            Error::AccuracyFailure { .. } | Error::Range { .. } => Status::AccuracyFailure,
            Error::InvalidInput(_) | Error::InvalidParameter(_) | Error::Domain(_) | Error::Syntax { .. } => {
                Status::UsageError
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Exact formula evaluated directly.
    ClosedForm,
    /// Beta-function oracle.
    Oracle,
    /// Adaptive quadrature.
    Quadrature,
    /// Supremum or infimum over a finite grid.
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constant {
    pub name: String,
    /// `null` when not finite.
    pub value: Value,
    pub provenance: Provenance,
}

impl Constant {
    fn new(name: impl Into<String>, value: f64, provenance: Provenance) -> Self {
        Constant { name: name.into(), value: json!(value), provenance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub status: Status,
    pub exit_code: i32,
    pub semantics: String,
    pub inputs: Value,
    pub rho: Option<f64>,
    pub hypotheses: Vec<Hypothesis>,
    pub constants: Vec<Constant>,
    pub verdict: Option<String>,
    pub result: Value,
    pub error: Option<String>,
}

impl Report {
    fn failure(command: &str, inputs: Value, e: &Error) -> Self {
        let status = Status::of_error(e);
        Report {
            schema: SCHEMA.into(),
            command: command.into(),
            status,
            exit_code: status.exit_code(),
            semantics: SEMANTICS.into(),
            inputs,
            rho: None,
            hypotheses: Vec::new(),
            constants: Vec::new(),
            verdict: None,
            result: Value::Null,
            error: Some(e.to_string()),
        }
    }

    /// Pretty JSON with a trailing newline; keys appear in a fixed order.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let r: Report = serde_json::from_str(src).map_err(|e| Error::InvalidInput(format!("report: {e}")))?;
        r.validate()?;
        Ok(r)
    }

    /// Structural checks beyond what deserialization enforces.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if self.schema != SCHEMA {
            return bad(format!("schema `{}`", self.schema));
        }
        if self.exit_code != self.status.exit_code() {
            return bad(format!("exit code {} does not match status {:?}", self.exit_code, self.status));
        }
        let completed = self.status == Status::Completed;
        if completed != self.error.is_none() || completed == self.result.is_null() {
            return bad("a completed report carries a result and no error, otherwise the reverse".into());
        }
        if completed && self.command.parse::<Command>().is_err() {
            return bad(format!("unknown command `{}`", self.command));
        }
        if !self.semantics.starts_with("grid-certified") {
            return bad("missing grid-certified semantics".into());
        }
        if self.rho.is_some_and(|r| !(r > 0.0 && r <= 1.0)) {
            return bad(format!("rho = {:?} outside (0, 1]", self.rho));
        }
        Ok(())
    }
}

/// What a command handler produces.
struct Outcome {
    rho: Option<f64>,
    hypotheses: Vec<Hypothesis>,
    constants: Vec<Constant>,
    verdict: Option<Verdict>,
    verdict_label: Option<String>,
    result: Value,
}

impl Outcome {
    fn new(result: Value) -> Self {
        Outcome { rho: None, hypotheses: Vec::new(), constants: Vec::new(), verdict: None, verdict_label: None, result }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn label(v: Verdict) -> String {
    to_value(&v).as_str().expect("verdicts are strings").to_owned()
}

/// Runs `command` on a JSON configuration text.
///
/// ```
/// use carleson::report::run;
/// let r = run("indices", r#"{"phi": {"family": "power", "p": 2.0}}"#);
/// assert_eq!(r.exit_code, 0);
/// assert_eq!(r.result["lower"], 2.0);
/// assert_eq!(r.result["upper"], 2.0);
/// assert_eq!(run("frobnicate", "{}").exit_code, 64);
/// ```
pub fn run(command: &str, config: &str) -> Report {
    let cmd = match command.parse::<Command>() {
        Ok(c) => c,
        Err(e) => return Report::failure(command, Value::Null, &e),
    };
    let cfg = match RunConfig::from_json(config) {
        Ok(c) => c,
        Err(e) => return Report::failure(command, Value::Null, &e),
    };
    run_config(cmd, &cfg)
}

/// Runs a parsed configuration. The echoed inputs include the defaults that were applied.
pub fn run_config(cmd: Command, cfg: &RunConfig) -> Report {
    let mut eff = cfg.clone();
    if let Some(c) = cfg.command {
        if c != cmd {
            let e = Error::InvalidInput(format!("config is for `{c}`, invoked as `{cmd}`"));
            return Report::failure(cmd.name(), to_value(cfg), &e);
        }
    }
    eff.command = Some(cmd);
    let outcome = match cmd {
        Command::Indices => indices(&mut eff),
        Command::Classify => classify(&mut eff),
        Command::CertifyBox => certify_box(&mut eff),
        Command::CertifyBerezin => certify_berezin(&mut eff),
        Command::EmbedCheck => embed_check(&mut eff),
        Command::Canonical => canonical(&mut eff),
        Command::WitnessTest => witness_test(&mut eff),
        Command::Multiplier => multiplier(&mut eff),
        Command::OracleValidate => oracle_validate(&mut eff),
    };
    match outcome {
        Err(e) => Report::failure(cmd.name(), to_value(&eff), &e),
        Ok(o) => Report {
            schema: SCHEMA.into(),
            command: cmd.name().into(),
            status: Status::Completed,
            exit_code: 0,
            semantics: SEMANTICS.into(),
            inputs: to_value(&eff),
            rho: o.rho,
            hypotheses: o.hypotheses,
            constants: o.constants,
            verdict: o.verdict_label.or(o.verdict.map(label)),
            result: o.result,
            error: None,
        },
    }
}

fn grid_or_default(eff: &mut RunConfig, default: ScanGrid) -> ScanGrid {
    *eff.grid.get_or_insert(default)
}

fn quadrature(eff: &mut RunConfig) -> QuadratureConfig {
    *eff.quadrature.get_or_insert_with(QuadratureConfig::default)
}

fn indices(eff: &mut RunConfig) -> Result<Outcome> {
    let phi = RunConfig::need(&eff.phi, "phi")?.clone();
    let grid = grid_or_default(eff, ScanGrid::default());
    let ix = phi.estimate_indices(&grid)?;
    let mut o = Outcome::new(to_value(&ix));
    o.rho = Some(rho_for(&phi)?);
    o.constants = vec![Constant::new("lower", ix.lower, Provenance::Grid), Constant::new("upper", ix.upper, Provenance::Grid)];
    Ok(o)
}

fn classify(eff: &mut RunConfig) -> Result<Outcome> {
    let phi = RunConfig::need(&eff.phi, "phi")?.clone();
    let grid = grid_or_default(eff, ScanGrid::default());
    let c = phi.classify(&grid)?;
    let mut o = Outcome::new(to_value(&c));
    o.rho = Some(rho_for(&phi)?);
    o.constants = vec![
        Constant::new("delta2", c.delta2.constant, Provenance::Grid),
        Constant::new("nabla2", c.nabla2.constant, Provenance::Grid),
        Constant::new("submultiplicative", c.tilde.submultiplicative.constant, Provenance::Grid),
    ];
    Ok(o)
}

fn mass_provenance(mu: &MeasureSpec) -> Provenance {
    match mu {
        MeasureSpec::LebesgueAlpha { .. } | MeasureSpec::Atomic { .. } => Provenance::ClosedForm,
        _ => Provenance::Quadrature,
    }
}

fn certify_box(eff: &mut RunConfig) -> Result<Outcome> {
    let spec = RunConfig::need(&eff.measure, "measure")?.clone();
    let phi = RunConfig::need(&eff.phi, "phi")?.clone();
    let s = *eff.s.get_or_insert(1.0);
    let family = eff.probes.get_or_insert_with(ProbeFamily::default).clone();
    let cfg = quadrature(eff);
    let r = box_condition(&spec.build()?, &phi, s, &family, &cfg)?;
    let mut o = Outcome::new(to_value(&r));
    o.hypotheses = r.hypotheses.clone();
    o.constants = vec![Constant::new("sup_estimate", r.sup_estimate, mass_provenance(&spec))];
    o.verdict = Some(r.verdict);
    Ok(o)
}

fn certify_berezin(eff: &mut RunConfig) -> Result<Outcome> {
    let spec = RunConfig::need(&eff.measure, "measure")?.clone();
    let phi1 = RunConfig::need(&eff.phi1, "phi1")?.clone();
    let phi2 = RunConfig::need(&eff.phi2, "phi2")?.clone();
    let s = *eff.s.get_or_insert(1.0);
    let zs = eff.zgrid.get_or_insert_with(ZGrid::default).clone();
    let cfg = quadrature(eff);
    let r = berezin_condition(&spec.build()?, &phi1, &phi2, s, &zs, &cfg)?;
    let mut o = Outcome::new(to_value(&r));
    o.rho = r.parameters.rho;
    o.hypotheses = r.hypotheses.clone();
    o.constants = vec![Constant::new("sup_estimate", r.sup_estimate, Provenance::Quadrature)];
    let reference = spec == MeasureSpec::LebesgueAlpha { alpha: 0.0 }
        && phi1 == GrowthFunction::power(2.0)
        && phi2 == GrowthFunction::power(4.0)
        && s == 1.0;
    if reference {
        o.constants.push(Constant::new("berezin_value_exact", BEREZIN_P2_Q4, Provenance::Oracle));
    }
    o.verdict = Some(r.verdict);
    Ok(o)
}

fn embed_check(eff: &mut RunConfig) -> Result<Outcome> {
    let phi1 = RunConfig::need(&eff.phi1, "phi1")?.clone();
    let phi2 = RunConfig::need(&eff.phi2, "phi2")?.clone();
    let s = *eff.s.get_or_insert(1.0);
    let alpha = *eff.alpha.get_or_insert(0.0);
    let grid = grid_or_default(eff, ScanGrid::default());
    let r = embedding_criterion(&phi1, &phi2, s, alpha, &grid)?;
    let mut o = Outcome::new(to_value(&r));
    o.rho = Some(rho_for(&phi1)?);
    o.constants = vec![Constant::new("embedding_constant", r.constant, Provenance::Grid)];
    o.verdict = Some(r.verdict);
    Ok(o)
}

fn canonical(eff: &mut RunConfig) -> Result<Outcome> {
    let phi = RunConfig::need(&eff.phi, "phi")?.clone();
    let s = *eff.s.get_or_insert(1.0);
    let family = eff.probes.get_or_insert_with(ProbeFamily::default).clone();
    let cfg = quadrature(eff);
    let mu = canonical_measure(&phi, s)?;
    let r = box_condition(&mu, &phi, s, &family, &cfg)?;
    let mut o = Outcome::new(to_value(&r));
    o.hypotheses = vec![
        Hypothesis { name: "phi in U".into(), verdict: Verdict::Pass },
        Hypothesis { name: "phi in nabla2".into(), verdict: Verdict::Pass },
    ];
    o.hypotheses.extend(r.hypotheses.iter().cloned());
    o.constants = vec![Constant::new("sup_estimate", r.sup_estimate, Provenance::Quadrature)];
    if let GrowthFunction::Power { p } = phi {
        // μ(Q_I) = |I|^{ps}/(ps − 1) for the density y^{ps−2}.
        o.constants.push(Constant::new("sup_exact", 1.0 / (p * s - 1.0), Provenance::ClosedForm));
    }
    o.verdict = Some(r.verdict);
    Ok(o)
}

fn witness_test(eff: &mut RunConfig) -> Result<Outcome> {
    let phi1 = eff.phi1.clone().or_else(|| eff.phi.clone()).ok_or_else(|| Error::InvalidInput("missing field `phi1`".into()))?;
    if eff.witnesses.is_empty() {
        eff.witnesses.push(WitnessSpec::HardyTest { z: [0.0, 1.0] });
    }
    let cfg = quadrature(eff);
    let mut constants = Vec::new();
    let mut rows = Vec::new();
    let mut all_pass = true;
    for spec in &eff.witnesses {
        let w = WitnessFunction::from_spec(spec, Some(&phi1))?;
        if let WitnessSpec::BergmanTest { alpha, .. } = spec {
            constants.push(Constant::new(format!("bergman_constant(alpha={alpha})"), bergman_constant(*alpha)?, Provenance::Oracle));
        }
        let check = verify_unit_ball(&w, &cfg)?;
        all_pass &= check.pass;
        rows.push(json!({ "witness": spec, "check": check }));
    }
    let mut result = json!({ "unit_ball": rows });
    let mut hypotheses = Vec::new();
    if let (Some(spec), Some(phi2)) = (eff.measure.clone(), eff.phi2.clone()) {
        let ctx = *eff.context.get_or_insert(InjectionContext::Hardy);
        let zs = eff.zgrid.get_or_insert_with(ZGrid::default).clone();
        let inj = witness_injection_test(&spec.build()?, &phi1, &phi2, ctx, &zs, &cfg)?;
        hypotheses = inj.modular.hypotheses.clone();
        constants.push(Constant::new("injection_modular_sup", inj.modular.sup_estimate, Provenance::Quadrature));
        constants.push(Constant::new("injection_weak_sup", inj.weak.sup_estimate, Provenance::Quadrature));
        result["injection"] = to_value(&inj);
    }
    let mut o = Outcome::new(result);
    o.rho = Some(rho_for(&phi1)?);
    o.hypotheses = hypotheses;
    o.constants = constants;
    o.verdict = Some(if all_pass { Verdict::Pass } else { Verdict::Fail });
    Ok(o)
}

/// Default `t`-grid for window classification.
pub fn multiplier_grid() -> ScanGrid {
    ScanGrid { t_min: 1e-8, t_max: 1e8, points: 512 }
}

fn multiplier(eff: &mut RunConfig) -> Result<Outcome> {
    let phi1 = RunConfig::need(&eff.phi1, "phi1")?.clone();
    let phi2 = RunConfig::need(&eff.phi2, "phi2")?.clone();
    let window = *RunConfig::need(&eff.window, "window")?;
    let grid = grid_or_default(eff, multiplier_grid());
    let rc = *eff.regime.get_or_insert_with(RegimeConfig::default);
    let w = match window {
        WindowSpec::Hardy { alpha } => OmegaWindow::hardy(&phi1, &phi2, alpha)?,
        WindowSpec::Bergman { alpha, beta } => OmegaWindow::bergman(&phi1, &phi2, alpha, beta)?,
    };
    let r = regime_classify(&w, &grid, &rc)?;
    let mut o = Outcome::new(to_value(&r));
    o.hypotheses = vec![Hypothesis { name: "quotient_monotone".into(), verdict: r.diagnostics.quotient_monotone }];
    o.constants = vec![
        Constant::new("omega_min", r.diagnostics.omega_min, Provenance::Grid),
        Constant::new("omega_max", r.diagnostics.omega_max, Provenance::Grid),
    ];
    o.verdict_label = to_value(&r.regime).as_str().map(str::to_owned);
    Ok(o)
}

/// Twenty `(α, β, y)` triples with `β > α + 1`, spread over five decades of `y`.
pub fn default_triples() -> Vec<[f64; 3]> {
    let alphas = [-0.5, 0.0, 0.5, 1.0, 2.0];
    let gaps = [1.5, 2.5, 4.0, 6.0];
    let ys = [1e-3, 0.1, 1.0, 10.0, 1e3];
    (0..20).map(|i| [alphas[i % 5], alphas[i % 5] + gaps[i / 5], ys[(3 * i + i / 5) % 5]]).collect()
}

/// `∫ |ω − z̄|^{-(β+1)} dV_α(ω)` with `z = i·y`, by quadrature and by the Beta oracles.
pub fn oracle_kernel_check(alpha: f64, beta: f64, y: f64, cfg: &QuadratureConfig) -> Result<(f64, f64, f64)> {
    let a = beta + 1.0;
    let exact = oracle_kernel_integral(a, alpha, y)?;
    let f = FnIntegrand::new(move |u: f64, v: f64| (u * u + (v + y) * (v + y)).powf(-a / 2.0))
        .with_envelope(Envelope { x0: 0.0, y0: y, amp: y.powf(-a), kappa: a, kappa_low: Some(a) });
    let q = integrate(&Measure::LebesgueAlpha { alpha }, &f, cfg)?;
    Ok((exact, q.value, q.error_estimate))
}

fn oracle_validate(eff: &mut RunConfig) -> Result<Outcome> {
    let triples = eff.triples.get_or_insert_with(default_triples).clone();
    let tol = *eff.tolerance.get_or_insert(1e-6);
    let cfg = *eff.quadrature.get_or_insert(QuadratureConfig { abs_tol: 0.0, ..QuadratureConfig::default() });
    let mut rows = Vec::new();
    let mut constants = Vec::new();
    let mut worst = 0f64;
    for (i, &[alpha, beta, y]) in triples.iter().enumerate() {
        let (exact, value, err) = oracle_kernel_check(alpha, beta, y, &cfg)?;
        let rel = ((value - exact) / exact).abs();
        worst = worst.max(rel);
        constants.push(Constant::new(format!("oracle[{i}]"), exact, Provenance::Oracle));
        rows.push(json!({
            "alpha": alpha, "beta": beta, "y": y,
            "oracle": exact, "quadrature": value, "error_estimate": err,
            "relative_error": rel, "pass": rel <= tol,
        }));
    }
    let mut o = Outcome::new(json!({ "rows": rows, "max_relative_error": worst, "tolerance": tol }));
    o.constants = constants;
    o.verdict = Some(if worst <= tol { Verdict::Pass } else { Verdict::Fail });
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_names_round_trip() {
        for c in Command::ALL {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
            assert_eq!(to_value(&c), json!(c.name()));
        }
    }

    #[test]
    fn box_example() {
        let r = run(
            "certify-box",
            r#"{"measure": {"kind": "lebesgue_alpha", "alpha": 0.0}, "phi": {"family": "power", "p": 2.0}, "s": 1.0}"#,
        );
        assert_eq!(r.exit_code, 0, "{:?}", r.error);
        assert_eq!(r.verdict.as_deref(), Some("bounded"));
        assert!((r.result["sup_estimate"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn embed_mismatch_completes_with_fail() {
        let r = run("embed-check", r#"{"phi1": {"family": "power", "p": 2.0}, "phi2": {"family": "power", "p": 3.0}, "alpha": 0.0}"#);
        assert_eq!(r.exit_code, 0);
        assert_eq!(r.verdict.as_deref(), Some("fail"));
    }

    #[test]
    fn status_codes() {
        let q2 = r#"{"measure": {"kind": "lebesgue_alpha", "alpha": 0.0},
                     "phi1": {"family": "power", "p": 4.0}, "phi2": {"family": "power", "p": 2.0}}"#;
        assert_eq!(run("certify-berezin", q2).exit_code, 2);
        assert_eq!(run("indices", "{").exit_code, 64);
        assert_eq!(run("indices", r#"{"phi": {"family": "power", "p": 2.0}, "bogus": 1}"#).exit_code, 64);
        assert_eq!(run("indices", "{}").exit_code, 64);
        assert_eq!(run("indices", r#"{"command": "classify", "phi": {"family": "power", "p": 2.0}}"#).exit_code, 64);
        let cfg = QuadratureConfig { max_subdivisions: 1, ..Default::default() };
        let mut rc = RunConfig { quadrature: Some(cfg), triples: Some(vec![[0.0, 1.2, 1e-3]]), ..Default::default() };
        rc.command = None;
        assert_eq!(run_config(Command::OracleValidate, &rc).exit_code, 3);
    }

    #[test]
    fn failure_reports_validate() {
        let r = run("nope", "{}");
        assert_eq!(r.status, Status::UsageError);
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn default_triples_are_admissible() {
        let t = default_triples();
        assert_eq!(t.len(), 20);
        assert!(t.iter().all(|&[a, b, y]| b > a + 1.0 && y > 0.0));
        let mut ys: Vec<f64> = t.iter().map(|r| r[2]).collect();
        ys.sort_by(f64::total_cmp);
        ys.dedup();
        assert_eq!(ys.len(), 5);
    }
}
