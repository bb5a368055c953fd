//! Inequality checks: both sides of each statement on a case, dilation
//! sweeps, a coordinate-ascent search for large ratios, and suite reports.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bank::{builtin_bank, load_bank, Case};
use crate::constants::{theorem_constant, Form};
use crate::error::{Error, Result};
use crate::fields::{FieldSpec, PolarFunction, RadialPart};
use crate::geometry::{AngularBreaks, Quadrature, Window};
use crate::norms::{
    central_morrey_norm, cmo_norm, default_sup_radii, herz_norm, mixed_norm, weak_mixed_norm, Mixed, Scale,
};
use crate::operators::{CommutatorBase, OperatorKind, OperatorSpec, SplitPart};
use crate::theorems::TheoremId;

pub const DEFAULT_TOL: f64 = 1e-6;
/// Largest relative spread of the ratio across a dilation sweep for the
/// statements whose constant is only determined up to a factor.
pub const SWEEP_SPREAD: f64 = 2e-3;
pub const SWEEP_LAMBDAS: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// `lhs ≤ C · rhs` with the explicit constant.
    Bound,
    /// Ratio stable under dilation (constant known up to a factor).
    Stability,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub ratio: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub window: Window,
    pub radial_panels: usize,
    pub angular_nodes: usize,
    pub shell_panels: usize,
}

impl GridInfo {
    pub fn of(q: &Quadrature) -> Self {
        GridInfo {
            window: q.window,
            radial_panels: q.radial_panels,
            angular_nodes: q.angular_nodes,
            shell_panels: q.shell_panels,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub theorem: TheoremId,
    pub case: String,
    pub kind: CheckKind,
    pub lhs: f64,
    pub constant: f64,
    /// Product of the input norms (and the symbol norm).
    pub input_norm: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
    pub tol: f64,
    /// `|ratio − ratio at half resolution|`, when computed.
    pub err_est: Option<f64>,
    /// Constant produced by the argument when it differs in form.
    pub derived_constant: Option<f64>,
    pub derived_ratio: Option<f64>,
    /// Bound check with `ratio > 1 + tol`.
    pub anomaly: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepPoint>,
    pub spread: Option<f64>,
    pub grid: GridInfo,
}

/// Both sides of one statement before the constant is applied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sides {
    pub lhs: f64,
    pub input_norm: f64,
}

/// A function on `ℝⁿ` read off a function on `ℝ^{nm}` along `ℝⁿ × {0}`.
struct Restrict<'a> {
    inner: &'a dyn PolarFunction,
    dim: usize,
}

impl PolarFunction for Restrict<'_> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, r: f64, dir: &[f64]) -> Result<f64> {
        let mut v = vec![0.0; self.inner.dim()];
        v[..dir.len()].copy_from_slice(dir);
        self.inner.eval(r, &v)
    }

    fn is_radial(&self) -> bool {
        self.inner.is_radial()
    }

    fn radial_breaks(&self) -> Vec<f64> {
        self.inner.radial_breaks()
    }

    fn angular_breaks(&self) -> AngularBreaks {
        AngularBreaks::None
    }

    fn support(&self) -> (f64, f64) {
        self.inner.support()
    }
}

fn operator_for(case: &Case) -> Result<OperatorSpec> {
    let x = &case.exponents;
    let symbol = || case.symbol.clone().ok_or_else(|| Error::InvalidInput("missing symbol".into()));
    let (kind, dim) = match case.theorem {
        TheoremId::T1_1 | TheoremId::T5_3 => (OperatorKind::Hausdorff, case.dim),
        TheoremId::T1_2 => (OperatorKind::Rough, case.dim),
        TheoremId::T1_3 => (OperatorKind::Hausdorff, case.field_dim()?),
        TheoremId::T1_4 => (OperatorKind::Multilinear { m: x.arity()? }, case.dim),
        TheoremId::T1_5 | TheoremId::T5_1 => (OperatorKind::Adjoint, case.dim),
        TheoremId::T3_1a | TheoremId::T3_1b | TheoremId::T3_2 => {
            (OperatorKind::Fractional { beta: x.f("beta")? }, case.dim)
        }
        TheoremId::T4_1 | TheoremId::T4_2 => (OperatorKind::SPsi { m: x.arity()? }, case.dim),
        TheoremId::T5_2 => (
            OperatorKind::Commutator {
                base: CommutatorBase::Adjoint,
                symbol: symbol()?,
            },
            case.dim,
        ),
        TheoremId::T5_4 | TheoremId::T6_1c | TheoremId::T6_2c => (
            OperatorKind::Commutator {
                base: CommutatorBase::Hausdorff,
                symbol: symbol()?,
            },
            case.dim,
        ),
        TheoremId::T6_1a | TheoremId::T6_2a => (
            OperatorKind::SplitCommutator {
                part: SplitPart::Local,
                symbol: symbol()?,
            },
            case.dim,
        ),
        TheoremId::T6_1b | TheoremId::T6_2b => (
            OperatorKind::SplitCommutator {
                part: SplitPart::Global,
                symbol: symbol()?,
            },
            case.dim,
        ),
    };
    OperatorSpec::new(kind, case.kernel.clone(), dim)
}

fn herz_lambda(case: &Case) -> Result<Option<f64>> {
    match case.theorem {
        TheoremId::T6_2a | TheoremId::T6_2b | TheoremId::T6_2c => Ok(Some(case.exponents.f("lambda")?)),
        _ => Ok(None),
    }
}

/// Left-hand side and the product of input norms for one case.
pub fn evaluate_sides(case: &Case, q: &Quadrature) -> Result<Sides> {
    let x = &case.exponents;
    let radii = default_sup_radii();
    let op = operator_for(case)?;
    let image = op.image(&case.fields, q);
    let f0 = &case.fields[0];
    let mixed = |f: &dyn PolarFunction, p: &str, pa: &str| -> Result<f64> {
        mixed_norm(f, &Mixed::new(x.f(p)?, x.f(pa)?), q)
    };
    let phi = |f: &dyn PolarFunction, p: &str, pa: &str| -> Result<f64> {
        let g = case.growth.clone().ok_or_else(|| Error::InvalidInput("missing growth".into()))?;
        Ok(central_morrey_norm(f, x.f(p)?, x.f(pa)?, &Scale::Growth(g), &radii, q)?.value)
    };
    let symbol = || case.symbol.as_ref().ok_or_else(|| Error::InvalidInput("missing symbol".into()));
    let sides = match case.theorem {
        TheoremId::T1_1 | TheoremId::T1_2 => Sides {
            lhs: mixed(&image, "p", "pt1")?,
            input_norm: mixed(f0, "p", "pt2")?,
        },
        TheoremId::T1_3 => {
            let restricted = Restrict {
                inner: &image,
                dim: case.dim,
            };
            let beta = (case.dim * (x.arity()? - 1)) as f64;
            Sides {
                lhs: mixed_norm(&restricted, &Mixed::weighted(x.f("p")?, x.f("pt1")?, beta), q)?,
                input_norm: mixed(f0, "p", "pt2")?,
            }
        }
        TheoremId::T1_4 => {
            let ps = x.list_f("p_i")?;
            let pts = x.list_f("pt_i")?;
            let mut prod = 1.0;
            for ((f, p), pa) in case.fields.iter().zip(&ps).zip(&pts) {
                prod *= mixed_norm(f, &Mixed::new(*p, *pa), q)?;
            }
            Sides {
                lhs: mixed(&image, "p", "pt")?,
                input_norm: prod,
            }
        }
        TheoremId::T1_5 => {
            let (al, qq, p2) = (x.f("alpha")?, x.f("q")?, x.f("p2")?);
            Sides {
                lhs: herz_norm(&image, al, qq, p2, x.f("p1")?, None, q)?.value,
                input_norm: herz_norm(f0, al, qq, p2, x.f("pt1")?, None, q)?.value,
            }
        }
        TheoremId::T3_1a | TheoremId::T3_1b => {
            let out = Mixed::weighted(x.f("p2")?, x.f("q")?, x.f("gamma")?);
            let input = if case.theorem == TheoremId::T3_1a {
                Mixed::weighted(x.f("p1")?, 1.0, x.f("alpha")?).ang_outer()
            } else {
                Mixed::weighted(x.f("p1")?, x.f("q")?, x.f("alpha")?)
            };
            Sides {
                lhs: mixed_norm(&image, &out, q)?,
                input_norm: mixed_norm(f0, &input, q)?,
            }
        }
        TheoremId::T3_2 => Sides {
            lhs: weak_mixed_norm(&image, x.f("p2")?, x.f("q")?, x.f("gamma")?, q)?.value,
            input_norm: mixed_norm(f0, &Mixed::weighted(x.f("p1")?, 1.0, x.f("alpha")?), q)?,
        },
        TheoremId::T4_1 => {
            let (als, qs, ps, pts) = (x.list_f("alpha_i")?, x.list_f("q_i")?, x.list_f("p_i")?, x.list_f("pt_i")?);
            let mut prod = 1.0;
            for (i, f) in case.fields.iter().enumerate() {
                prod *= herz_norm(f, als[i], qs[i], ps[i], pts[i], None, q)?.value;
            }
            Sides {
                lhs: herz_norm(&image, x.f("alpha")?, x.f("q")?, x.f("p")?, x.f("pt")?, None, q)?.value,
                input_norm: prod,
            }
        }
        TheoremId::T4_2 => {
            let (lams, ps, pts) = (x.list_f("lambda_i")?, x.list_f("p_i")?, x.list_f("pt_i")?);
            let mut prod = 1.0;
            for (i, f) in case.fields.iter().enumerate() {
                prod *= central_morrey_norm(f, ps[i], pts[i], &Scale::Lambda(lams[i]), &radii, q)?.value;
            }
            let lam = Scale::Lambda(x.f("lambda")?);
            Sides {
                lhs: central_morrey_norm(&image, x.f("p")?, x.f("pt")?, &lam, &radii, q)?.value,
                input_norm: prod,
            }
        }
        TheoremId::T5_1 | TheoremId::T5_3 => Sides {
            lhs: phi(&image, "p", "pt")?,
            input_norm: phi(f0, "p", "pt")?,
        },
        TheoremId::T5_2 | TheoremId::T5_4 => {
            let b = cmo_norm(symbol()?, x.f("p2")?, x.f("pt2")?, &radii, q)?.value;
            Sides {
                lhs: phi(&image, "p", "pt")?,
                input_norm: b * phi(f0, "p1", "pt1")?,
            }
        }
        _ => {
            let lam = herz_lambda(case)?;
            let (al, qq, p) = (x.f("alpha")?, x.f("q")?, x.f("p")?);
            let b = cmo_norm(symbol()?, case.cmo_exponent()?.f(), x.f("pt1")?, &radii, q)?.value;
            Sides {
                lhs: herz_norm(&image, al, qq, p, x.f("pt")?, lam, q)?.value,
                input_norm: b * herz_norm(f0, al, qq, p, x.f("pt2")?, lam, q)?.value,
            }
        }
    };
    for (v, what) in [(sides.lhs, "left-hand side"), (sides.input_norm, "input norm")] {
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("{what} of case {}", case.id)));
        }
    }
    Ok(sides)
}

fn ratio_of(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else if rhs == 0.0 {
        f64::INFINITY
    } else {
        lhs / rhs
    }
}

/// Relative spread `(max − min)/max` of a set of ratios.
pub fn spread(ratios: &[f64]) -> f64 {
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    if hi == 0.0 {
        0.0
    } else {
        (hi - lo) / hi
    }
}

/// Options for a single check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckOptions {
    pub tol: f64,
    pub error_estimate: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            tol: DEFAULT_TOL,
            error_estimate: true,
        }
    }
}

fn ratio_at(case: &Case, constant: f64, q: &Quadrature) -> Result<f64> {
    let s = evaluate_sides(case, q)?;
    Ok(ratio_of(s.lhs, constant * s.input_norm))
}

/// Evaluate one case.
pub fn run_check(case: &Case, q: &Quadrature, opts: CheckOptions) -> Result<CheckResult> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    case.validate()?;
    let spec = case.constant_spec();
    let constant = theorem_constant(&spec, Form::Printed, q)?.expect("printed constants always exist");
    let derived_constant = theorem_constant(&spec, Form::Derived, q)?;
    let sides = evaluate_sides(case, q)?;
    let rhs = constant * sides.input_norm;
    let ratio = ratio_of(sides.lhs, rhs);
    let exact = case.theorem.is_exact();
    let derived_ratio = derived_constant.map(|c| ratio_of(sides.lhs, c * sides.input_norm));
    let mut sweep = Vec::new();
    let mut sweep_spread = None;
    let pass = if exact {
        ratio <= 1.0 + opts.tol
    } else {
        for &l in &SWEEP_LAMBDAS {
            let r = if l == 1.0 { ratio } else { ratio_at(&case.dilated(l), constant, q)? };
            sweep.push(SweepPoint { lambda: l, ratio: r });
        }
        let s = spread(&sweep.iter().map(|p| p.ratio).collect::<Vec<_>>());
        sweep_spread = Some(s);
        s.is_finite() && s < SWEEP_SPREAD
    };
    let err_est = if opts.error_estimate {
        Some((ratio - ratio_at(case, constant, &q.scaled(0.5)?)?).abs())
    } else {
        None
    };
    Ok(CheckResult {
        theorem: case.theorem,
        case: case.id.clone(),
        kind: if exact { CheckKind::Bound } else { CheckKind::Stability },
        lhs: sides.lhs,
        constant,
        input_norm: sides.input_norm,
        rhs,
        ratio,
        pass,
        tol: opts.tol,
        err_est,
        derived_constant,
        derived_ratio,
        anomaly: exact && ratio > 1.0 + opts.tol,
        sweep,
        spread: sweep_spread,
        grid: GridInfo::of(q),
    })
}

/// `run_check` on `f(λ·)` (and `b(λ·)`) for each `λ`.
pub fn dilation_sweep(case: &Case, lambdas: &[f64], q: &Quadrature, tol: f64) -> Result<Vec<CheckResult>> {
    let opts = CheckOptions {
        tol,
        error_estimate: false,
    };
    lambdas
        .iter()
        .map(|&l| {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidInput(format!("dilation factor must be positive, got {l}")));
            }
            let mut c = case.dilated(l);
            c.id = format!("{}@{l}", case.id);
            run_check(&c, q, opts)
        })
        .collect()
}

/// Outcome of a coordinate-ascent search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sharpness {
    pub seed_ratio: f64,
    pub best_ratio: f64,
    pub best_case: Case,
    pub best: CheckResult,
    pub evaluations: usize,
}

/// Tunable parameters of the first field's radial part: `(value, additive)`.
fn radial_params(f: &FieldSpec) -> Vec<(f64, bool)> {
    match f {
        FieldSpec::Separable { radial, .. } => match *radial {
            RadialPart::PowerGaussian { a, b, c } => vec![(a, true), (b, false), (c, false)],
            RadialPart::PowerCutoff { a, radius } => vec![(a, true), (radius, false)],
            RadialPart::Annulus { inner, outer } => vec![(inner, false), (outer, false)],
            RadialPart::ClippedLog { .. } => vec![],
        },
        _ => vec![],
    }
}

fn with_radial_params(f: &FieldSpec, v: &[f64]) -> FieldSpec {
    let mut g = f.clone();
    if let FieldSpec::Separable { radial, .. } = &mut g {
        *radial = match *radial {
            RadialPart::PowerGaussian { .. } => RadialPart::PowerGaussian { a: v[0], b: v[1], c: v[2] },
            RadialPart::PowerCutoff { .. } => RadialPart::PowerCutoff { a: v[0], radius: v[1] },
            RadialPart::Annulus { .. } => RadialPart::Annulus { inner: v[0], outer: v[1] },
            ref other => other.clone(),
        };
    }
    g
}

/// Coordinate ascent of the ratio over the radial parameters of the first
/// input field. Invalid or divergent members count as `−∞`. Uses at most
/// `budget` evaluations, the first being the seed.
pub fn sharpness_search(seed: &Case, budget: usize, q: &Quadrature) -> Result<Sharpness> {
    if budget == 0 {
        return Err(Error::InvalidInput("budget must be positive".into()));
    }
    let opts = CheckOptions {
        tol: DEFAULT_TOL,
        error_estimate: false,
    };
    let seed_result = run_check(seed, q, opts)?;
    let mut best = (seed.clone(), seed_result.clone());
    let mut evaluations = 1;
    let params = radial_params(&seed.fields[0]);
    let mut values: Vec<f64> = params.iter().map(|p| p.0).collect();
    let mut steps: Vec<f64> = params.iter().map(|p| if p.1 { 0.5 } else { 2f64.ln() }).collect();
    let try_values = |v: &[f64]| -> Option<(Case, CheckResult)> {
        let mut c = seed.clone();
        c.fields[0] = with_radial_params(&seed.fields[0], v);
        run_check(&c, q, opts).ok().filter(|r| r.ratio.is_finite()).map(|r| (c, r))
    };
    'outer: while evaluations < budget && !params.is_empty() && steps.iter().any(|s| *s > 1e-3) {
        let mut improved = false;
        for i in 0..params.len() {
            for dir in [1.0, -1.0] {
                if evaluations >= budget {
                    break 'outer;
                }
                let mut v = values.clone();
                v[i] = if params[i].1 { v[i] + dir * steps[i] } else { v[i] * (dir * steps[i]).exp() };
                evaluations += 1;
                if let Some((c, r)) = try_values(&v) {
                    if r.ratio > best.1.ratio {
                        best = (c, r);
                        values = v;
                        improved = true;
                        break;
                    }
                }
            }
        }
        if !improved {
            steps.iter_mut().for_each(|s| *s *= 0.5);
        }
    }
    Ok(Sharpness {
        seed_ratio: seed_result.ratio,
        best_ratio: best.1.ratio,
        best_case: best.0,
        best: best.1,
        evaluations,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum BankSource {
    Builtin,
    Toml(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub theorems: Vec<TheoremId>,
    pub bank: BankSource,
    /// Keep only cases in this dimension.
    pub dim: Option<usize>,
    pub radial_panels: usize,
    pub angular_nodes: usize,
    pub tol: f64,
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
    pub error_estimate: bool,
    pub json_out: Option<PathBuf>,
    pub csv_out: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            theorems: TheoremId::ALL.to_vec(),
            bank: BankSource::Builtin,
            dim: None,
            radial_panels: 64,
            angular_nodes: 32,
            tol: DEFAULT_TOL,
            threads: None,
            error_estimate: true,
            json_out: None,
            csv_out: None,
        }
    }
}

/// A case that could not be evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseError {
    pub theorem: TheoremId,
    pub case: String,
    pub error: String,
    pub divergent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub divergent: usize,
    pub errors: usize,
    pub anomalies: usize,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: SuiteSummary,
    pub grid: GridInfo,
    pub cases: Vec<CheckResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<CaseError>,
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_DIVERGENT: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.errors.is_empty() && self.cases.iter().all(|c| c.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.errors.iter().any(|e| e.divergent) {
            EXIT_DIVERGENT
        } else if self.all_pass() {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }

    /// One row per check; cases that errored get empty numeric fields.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["theorem", "case", "lhs", "constant", "rhs", "ratio", "pass", "err_est"]).map_err(io)?;
        let mut rows: Vec<(TheoremId, String, [String; 6])> = self
            .cases
            .iter()
            .map(|c| {
                let num = |v: f64| format!("{v:.12e}");
                (
                    c.theorem,
                    c.case.clone(),
                    [
                        num(c.lhs),
                        num(c.constant),
                        num(c.rhs),
                        num(c.ratio),
                        c.pass.to_string(),
                        c.err_est.map(num).unwrap_or_default(),
                    ],
                )
            })
            .collect();
        rows.extend(self.errors.iter().map(|e| {
            let blank = String::new;
            (e.theorem, e.case.clone(), [blank(), blank(), blank(), blank(), "false".into(), blank()])
        }));
        rows.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        for (t, c, rest) in rows {
            let mut rec = vec![t.to_string(), c];
            rec.extend(rest);
            w.write_record(&rec).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

/// Load, filter and validate the cases of a suite. Any invalid case aborts
/// before computation.
pub fn suite_cases(config: &SuiteConfig) -> Result<Vec<Case>> {
    if !(config.tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    if config.radial_panels == 0 || config.angular_nodes < 2 {
        return Err(Error::InvalidInput("grid resolutions must be positive".into()));
    }
    let mut cases = match &config.bank {
        BankSource::Builtin => builtin_bank(&config.theorems),
        BankSource::Toml(path) => load_bank(path)?
            .into_iter()
            .filter(|c| config.theorems.contains(&c.theorem))
            .collect(),
    };
    if let Some(n) = config.dim {
        cases.retain(|c| c.dim == n);
    }
    for c in &cases {
        c.validate()?;
    }
    let mut ids: Vec<(TheoremId, &str)> = cases.iter().map(|c| (c.theorem, c.id.as_str())).collect();
    ids.sort();
    if ids.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("case ids must be unique per statement".into()));
    }
    Ok(cases)
}

/// Run every selected check and write the requested reports.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let cases = suite_cases(config)?;
    let q = Quadrature::new(Window::default(), config.radial_panels, config.angular_nodes)?;
    let opts = CheckOptions {
        tol: config.tol,
        error_estimate: config.error_estimate,
    };
    let work = || -> Vec<std::result::Result<CheckResult, CaseError>> {
        cases
            .par_iter()
            .map(|c| {
                run_check(c, &q, opts).map_err(|e| CaseError {
                    theorem: c.theorem,
                    case: c.id.clone(),
                    divergent: e.is_divergence(),
                    error: e.to_string(),
                })
            })
            .collect()
    };
    let outcomes = match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::InvalidInput(e.to_string()))?
            .install(work),
        None => work(),
    };
    let mut results = Vec::new();
    let mut errors = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => results.push(r),
            Err(e) => errors.push(e),
        }
    }
    results.sort_by(|a, b| (a.theorem, &a.case).cmp(&(b.theorem, &b.case)));
    errors.sort_by(|a, b| (a.theorem, &a.case).cmp(&(b.theorem, &b.case)));
    let passed = results.iter().filter(|r| r.pass).count();
    let report = SuiteReport {
        suite: SuiteSummary {
            checks: results.len() + errors.len(),
            passed,
            failed: results.len() - passed,
            divergent: errors.iter().filter(|e| e.divergent).count(),
            errors: errors.len(),
            anomalies: results.iter().filter(|r| r.anomaly).count(),
            tol: config.tol,
        },
        grid: GridInfo::of(&q),
        cases: results,
        errors,
    };
    if let Some(path) = &config.json_out {
        let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(path, text)?;
    }
    if let Some(path) = &config.csv_out {
        std::fs::write(path, report.to_csv()?)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bank::default_bank;

    fn quick() -> CheckOptions {
        CheckOptions {
            tol: DEFAULT_TOL,
            error_estimate: false,
        }
    }

    #[test]
    fn gaussian_example_passes() {
        let q = Quadrature::default();
        let case = &default_bank(TheoremId::T1_1)[0];
        let r = run_check(case, &q, quick()).unwrap();
        assert!((r.constant - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!(r.pass && r.ratio < 1.0);
    }

    #[test]
    fn zero_field_gives_zero_ratio() {
        let q = Quadrature::default();
        let mut case = default_bank(TheoremId::T1_1)[0].clone();
        case.fields[0] = FieldSpec::zero(2);
        let r = run_check(&case, &q, quick()).unwrap();
        assert_eq!((r.lhs, r.ratio, r.pass), (0.0, 0.0, true));
    }

    #[test]
    fn restriction_embeds_along_first_axes() {
        let f = FieldSpec::separable(
            2,
            RadialPart::PowerGaussian { a: 0.0, b: 1.0, c: 2.0 },
            crate::fields::AngularPart::Harmonic { k: 1, offset: 2.0 },
            1.0,
        );
        let g = Restrict { inner: &f, dim: 1 };
        assert!((g.eval(1.0, &[1.0]).unwrap() - 3.0 * (-1f64).exp()).abs() < 1e-15);
        assert!((g.eval(1.0, &[-1.0]).unwrap() - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn spread_is_relative() {
        assert_eq!(spread(&[0.0, 0.0]), 0.0);
        assert!((spread(&[1.0, 0.5]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn empty_selection_is_empty_and_passes() {
        let cfg = SuiteConfig {
            theorems: vec![],
            ..SuiteConfig::default()
        };
        let rep = run_suite(&cfg).unwrap();
        assert!(rep.cases.is_empty());
        assert_eq!(rep.exit_code(), EXIT_PASS);
        assert_eq!(rep.to_csv().unwrap(), "theorem,case,lhs,constant,rhs,ratio,pass,err_est\n");
    }

    #[test]
    fn sharpness_budget() {
        let q = Quadrature::default();
        let seed = &default_bank(TheoremId::T1_1)[0];
        assert!(sharpness_search(seed, 0, &q).is_err());
        let s = sharpness_search(seed, 1, &q).unwrap();
        assert_eq!(s.evaluations, 1);
        assert_eq!(s.best_ratio, s.seed_ratio);
    }
}
