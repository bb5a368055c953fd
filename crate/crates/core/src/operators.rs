//! Hausdorff-type operators evaluated at a point `x = rθ` through their
//! polar reductions.
//!
//! With `F̄(ρ) = ∫_{S^{n-1}} f(ρθ') dσ(θ')`:
//!
//! * `H_Φ f(x)      = ∫ φ(t)/t · F̄(r/t) dt`
//! * `H_{Φ,Ω} f(x)  = ∫ φ(t)/t · ∫ f((r/t)θ')Ω(θ') dσ dt`
//! * `𝓗_Φ f(x)      = ω_{n-1} ∫ φ(s)/s · f((r/s)θ) ds`
//! * `H_{Φ,β} f(x)  = ∫ φ(r/t) t^β F̄(t) dt/t`
//!
//! The multilinear operator is reduced for radial inputs to an integral over
//! the positive orthant of `S^{m-1}`; `S_Ψ` is a nested tensor quadrature.

use std::borrow::Cow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{AngularPart, FieldSpec, KernelSpec, PolarFunction, Profile, SymbolSpec};
use crate::geometry::{omega, unit_e1, AngularBreaks, AngularGrid, GaussRule, Quadrature, Tails};

/// Points closer to the origin than this are evaluated at this radius.
const R_FLOOR: f64 = 1e-300;
/// Relative depth of the truncation applied to half-infinite t-ranges.
const DECADES_CUT: f64 = 1e10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommutatorBase {
    Hausdorff,
    Adjoint,
}

/// Domain split of `H_Φ^b`: `Local` is `|y| < |x|`, `Global` is `|y| ≥ |x|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitPart {
    Local,
    Global,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum OperatorKind {
    Hausdorff,
    Rough,
    Adjoint,
    Fractional { beta: f64 },
    Multilinear { m: usize },
    SPsi { m: usize },
    Commutator { base: CommutatorBase, symbol: SymbolSpec },
    SplitCommutator { part: SplitPart, symbol: SymbolSpec },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub kernel: KernelSpec,
    /// Dimension of the space the operator acts on (`nm` for the
    /// high-dimensional form).
    pub dim: usize,
}

impl OperatorSpec {
    pub fn new(kind: OperatorKind, kernel: KernelSpec, dim: usize) -> Result<Self> {
        let op = OperatorSpec { kind, kernel, dim };
        op.validate()?;
        Ok(op)
    }

    pub fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        if self.dim < 1 {
            return Err(Error::InvalidInput("operator dimension must be >= 1".into()));
        }
        match &self.kind {
            OperatorKind::Fractional { beta } => check_beta(*beta, self.dim),
            OperatorKind::Multilinear { m } if *m == 0 => {
                Err(Error::InvalidInput("multilinear arity must be >= 1".into()))
            }
            OperatorKind::SPsi { m } if *m != self.kernel.arity() || *m == 0 => {
                Err(Error::InvalidInput(format!(
                    "S_Ψ arity {m} does not match Ψ with {} factors",
                    self.kernel.arity()
                )))
            }
            OperatorKind::Commutator { symbol, .. } | OperatorKind::SplitCommutator { symbol, .. } => {
                symbol.validate()
            }
            _ => Ok(()),
        }
    }

    /// Number of input functions.
    pub fn arity(&self) -> usize {
        match self.kind {
            OperatorKind::Multilinear { m } | OperatorKind::SPsi { m } => m,
            _ => 1,
        }
    }

    /// `T(f_1,…,f_m)(rθ)`.
    pub fn apply(&self, inputs: &[&dyn PolarFunction], r: f64, dir: &[f64], q: &Quadrature) -> Result<f64> {
        if inputs.len() != self.arity() {
            return Err(Error::InvalidInput(format!(
                "operator takes {} inputs, got {}",
                self.arity(),
                inputs.len()
            )));
        }
        let f = inputs[0];
        match &self.kind {
            OperatorKind::Hausdorff => apply_hausdorff(&self.kernel, f, r, dir, q),
            OperatorKind::Rough => apply_rough(&self.kernel, f, r, dir, q),
            OperatorKind::Adjoint => apply_adjoint(&self.kernel, f, r, dir, q),
            OperatorKind::Fractional { beta } => apply_fractional(&self.kernel, *beta, f, r, dir, q),
            OperatorKind::Multilinear { .. } => apply_multilinear(&self.kernel, inputs, r, q),
            OperatorKind::SPsi { .. } => apply_s_psi(&self.kernel, inputs, r, q),
            OperatorKind::Commutator { base, symbol } => {
                apply_commutator(*base, &self.kernel, symbol, f, r, dir, q)
            }
            OperatorKind::SplitCommutator { part, symbol } => {
                apply_split_commutator(*part, &self.kernel, symbol, f, r, dir, q)
            }
        }
    }

    /// The function `x ↦ T(inputs)(x)`, evaluated lazily.
    pub fn image<'a>(&'a self, inputs: &'a [FieldSpec], q: &'a Quadrature) -> Image<'a> {
        Image { op: self, inputs, q }
    }
}

fn check_beta(beta: f64, n: usize) -> Result<()> {
    if !(0.0..n as f64).contains(&beta) {
        return Err(Error::InvalidInput(format!(
            "fractional order needs 0 <= β < n = {n}, got {beta}"
        )));
    }
    Ok(())
}

/// Lazily evaluated operator image.
pub struct Image<'a> {
    op: &'a OperatorSpec,
    inputs: &'a [FieldSpec],
    q: &'a Quadrature,
}

impl Image<'_> {
    fn profile_support(&self) -> (f64, f64) {
        match &self.op.kernel {
            KernelSpec::Psi { factors } => factors
                .iter()
                .map(Profile::support)
                .fold((0.0f64, f64::INFINITY), |a, s| (a.0.max(s.0), a.1.min(s.1))),
            k => k.profile().map_or((0.0, f64::INFINITY), Profile::support),
        }
    }

    fn profile_breaks(&self) -> Vec<f64> {
        match &self.op.kernel {
            KernelSpec::Psi { factors } => factors.iter().flat_map(Profile::breaks).collect(),
            k => k.profile().map(Profile::breaks).unwrap_or_default(),
        }
    }
}

impl PolarFunction for Image<'_> {
    fn dim(&self) -> usize {
        self.op.dim
    }

    fn eval(&self, r: f64, dir: &[f64]) -> Result<f64> {
        let inputs: Vec<&dyn PolarFunction> = self.inputs.iter().map(|f| f as &dyn PolarFunction).collect();
        self.op.apply(&inputs, r, dir, self.q)
    }

    fn is_radial(&self) -> bool {
        match &self.op.kind {
            OperatorKind::Adjoint => self.inputs[0].is_radial(),
            OperatorKind::Commutator { base, symbol } => {
                symbol.is_radial() && (*base == CommutatorBase::Hausdorff || self.inputs[0].is_radial())
            }
            OperatorKind::SplitCommutator { symbol, .. } => symbol.is_radial(),
            _ => true,
        }
    }

    fn radial_breaks(&self) -> Vec<f64> {
        let kb = self.profile_breaks();
        let mut fb: Vec<f64> = self.inputs.iter().flat_map(|f| f.radial_breaks()).collect();
        let mut out = Vec::new();
        match &self.op.kind {
            OperatorKind::Commutator { symbol, .. } | OperatorKind::SplitCommutator { symbol, .. } => {
                let sb = symbol.radial_breaks();
                out.extend(sb.iter().copied());
                fb.extend(sb);
            }
            _ => {}
        }
        for b in &fb {
            for t in &kb {
                out.push(b * t);
            }
        }
        out.retain(|b| *b > 0.0 && b.is_finite());
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn angular_breaks(&self) -> AngularBreaks {
        match &self.op.kind {
            OperatorKind::Adjoint => self.inputs[0].angular_breaks(),
            OperatorKind::Commutator { base, symbol } => {
                let b = symbol.angular_breaks();
                if *base == CommutatorBase::Adjoint {
                    b.merge(self.inputs[0].angular_breaks())
                } else {
                    b
                }
            }
            OperatorKind::SplitCommutator { symbol, .. } => symbol.angular_breaks(),
            _ => AngularBreaks::None,
        }
    }

    fn support(&self) -> (f64, f64) {
        let (t_lo, t_hi) = self.profile_support();
        let (f_lo, f_hi) = match &self.op.kind {
            OperatorKind::Multilinear { .. } => {
                let (lo, hi) = self.inputs.iter().map(|f| f.support()).fold((0.0, 0.0), |a, s| {
                    (a.0 + s.0 * s.0, a.1 + s.1 * s.1)
                });
                (lo.sqrt(), hi.sqrt())
            }
            OperatorKind::SPsi { .. } => self
                .inputs
                .iter()
                .map(|f| f.support())
                .fold((0.0f64, f64::INFINITY), |a, s| (a.0.max(s.0), a.1.min(s.1))),
            _ => self.inputs[0].support(),
        };
        (f_lo * t_lo, f_hi * t_hi)
    }
}

/// `∫_lo^hi g` on a log grid. A zero or infinite end is truncated ten
/// decades away from the other end and closed with a power-law tail.
pub(crate) fn integrate_log<G: Fn(f64) -> Result<f64>>(
    q: &Quadrature,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    g: G,
) -> Result<f64> {
    if !(hi > lo) {
        return Ok(0.0);
    }
    let (a, b, tails) = match (lo > 0.0, hi.is_finite()) {
        (true, true) => {
            let a = lo.max(hi / DECADES_CUT);
            (a, hi, Tails { lower: a > lo, upper: false })
        }
        (false, true) => (hi / DECADES_CUT, hi, Tails { lower: true, upper: false }),
        (true, false) => (lo, lo * DECADES_CUT, Tails { lower: false, upper: true }),
        (false, false) => (q.window.r_min, q.window.r_max, Tails::BOTH),
    };
    let v = q.integrate_radial_fn(g, a, b, breaks, tails)?;
    if !v.is_finite() {
        return Err(Error::NonFinite("operator integral".into()));
    }
    Ok(v)
}

/// Sphere integration context for one operator evaluation.
pub(crate) enum Sphere<'q> {
    /// Integrand is radial; the integral is `ω_{n-1}` times the value at `e₁`.
    Radial { n: usize, e1: Vec<f64> },
    Grid(Cow<'q, AngularGrid>),
}

impl<'q> Sphere<'q> {
    pub(crate) fn for_functions(
        q: &'q Quadrature,
        n: usize,
        radial: bool,
        breaks: AngularBreaks,
    ) -> Result<Self> {
        if radial {
            Ok(Sphere::Radial { n, e1: unit_e1(n) })
        } else {
            if n != 2 && n != 3 {
                return Err(Error::Unsupported(format!(
                    "non-radial functions need n in {{2, 3}}, got n = {n}"
                )));
            }
            Ok(Sphere::Grid(q.sphere_grid(n, &breaks)?))
        }
    }

    pub(crate) fn integrate<G: FnMut(&[f64]) -> Result<f64>>(&self, mut g: G) -> Result<f64> {
        match self {
            Sphere::Radial { n, e1 } => Ok(omega(*n) * g(e1)?),
            Sphere::Grid(grid) => {
                let mut s = 0.0;
                for (v, w) in grid.iter() {
                    s += w * g(v)?;
                }
                Ok(s)
            }
        }
    }
}

fn radial_profile<'k>(kernel: &'k KernelSpec, what: &str) -> Result<&'k Profile> {
    match kernel {
        KernelSpec::Radial { profile } | KernelSpec::General { profile } => Ok(profile),
        _ => Err(Error::Unsupported(format!("{what} needs a single radial profile Φ"))),
    }
}

fn check_point(f: &dyn PolarFunction, dir: &[f64]) -> Result<()> {
    if dir.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: dir.len(),
        });
    }
    Ok(())
}

fn intersect(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0.max(b.0), a.1.min(b.1))
}

/// `t`-range where `φ(t) F̄(r/t)` can be non-zero, and its breakpoints.
fn scaled_range(profile: &Profile, f: &dyn PolarFunction, r: f64) -> ((f64, f64), Vec<f64>) {
    let (f_lo, f_hi) = f.support();
    let from_f = (r / f_hi, if f_lo > 0.0 { r / f_lo } else { f64::INFINITY });
    let mut breaks = profile.breaks();
    breaks.extend(f.radial_breaks().iter().map(|b| r / b));
    (intersect(profile.support(), from_f), breaks)
}

fn hausdorff_core(
    profile: &Profile,
    f: &dyn PolarFunction,
    omega_weight: Option<&AngularPart>,
    r: f64,
    q: &Quadrature,
) -> Result<f64> {
    if profile.is_zero() {
        return Ok(0.0);
    }
    let n = f.dim();
    let r = r.max(R_FLOOR);
    let breaks = match omega_weight {
        Some(om) => f.angular_breaks().merge(om.breaks(n)),
        None => f.angular_breaks(),
    };
    let radial = f.is_radial() && omega_weight.is_none_or(AngularPart::is_constant);
    let sphere = Sphere::for_functions(q, n, radial, breaks)?;
    let ((lo, hi), breaks) = scaled_range(profile, f, r);
    integrate_log(q, lo, hi, &breaks, |t| {
        let phi = profile.value(t);
        if phi == 0.0 {
            return Ok(0.0);
        }
        let rho = r / t;
        let mean = sphere.integrate(|v| {
            let w = omega_weight.map_or(1.0, |om| om.value(v));
            if w == 0.0 {
                return Ok(0.0);
            }
            Ok(w * f.eval(rho, v)?)
        })?;
        Ok(phi / t * mean)
    })
}

/// `H_Φ f(rθ)` for a radial kernel. The value does not depend on `θ`.
pub fn apply_hausdorff(kernel: &KernelSpec, f: &dyn PolarFunction, r: f64, dir: &[f64], q: &Quadrature) -> Result<f64> {
    check_point(f, dir)?;
    let profile = radial_profile(kernel, "H_Φ")?;
    hausdorff_core(profile, f, None, r, q)
}

/// `H_{Φ,Ω} f(rθ)`.
pub fn apply_rough(kernel: &KernelSpec, f: &dyn PolarFunction, r: f64, dir: &[f64], q: &Quadrature) -> Result<f64> {
    check_point(f, dir)?;
    match kernel {
        KernelSpec::Rough { profile, omega } => {
            omega.validate_for(f.dim())?;
            hausdorff_core(profile, f, Some(omega), r, q)
        }
        KernelSpec::Radial { profile } | KernelSpec::General { profile } => {
            hausdorff_core(profile, f, None, r, q)
        }
        KernelSpec::Psi { .. } => Err(Error::Unsupported("H_{Φ,Ω} needs a profile and Ω".into())),
    }
}

/// `𝓗_Φ f(rθ)` for `Φ(y) = φ(|y|)`; acts along the ray through `x`.
pub fn apply_adjoint(kernel: &KernelSpec, f: &dyn PolarFunction, r: f64, dir: &[f64], q: &Quadrature) -> Result<f64> {
    check_point(f, dir)?;
    let profile = radial_profile(kernel, "𝓗_Φ")?;
    if profile.is_zero() {
        return Ok(0.0);
    }
    let r = r.max(R_FLOOR);
    let n = f.dim();
    let ((lo, hi), breaks) = scaled_range(profile, f, r);
    let v = integrate_log(q, lo, hi, &breaks, |s| {
        let phi = profile.value(s);
        if phi == 0.0 {
            return Ok(0.0);
        }
        Ok(phi / s * f.eval(r / s, dir)?)
    })?;
    Ok(omega(n) * v)
}

/// `H_{Φ,β} f(rθ)`, computed in the `t = |y|` variable.
pub fn apply_fractional(
    kernel: &KernelSpec,
    beta: f64,
    f: &dyn PolarFunction,
    r: f64,
    dir: &[f64],
    q: &Quadrature,
) -> Result<f64> {
    check_point(f, dir)?;
    let n = f.dim();
    check_beta(beta, n)?;
    let profile = radial_profile(kernel, "H_{Φ,β}")?;
    if profile.is_zero() {
        return Ok(0.0);
    }
    let r = r.max(R_FLOOR);
    let sphere = Sphere::for_functions(q, n, f.is_radial(), f.angular_breaks())?;
    let (p_lo, p_hi) = profile.support();
    let from_phi = (r / p_hi, if p_lo > 0.0 { r / p_lo } else { f64::INFINITY });
    let (lo, hi) = intersect(f.support(), from_phi);
    let mut breaks = f.radial_breaks();
    breaks.extend(profile.breaks().iter().map(|b| r / b));
    integrate_log(q, lo, hi, &breaks, |t| {
        let phi = profile.value(r / t);
        if phi == 0.0 {
            return Ok(0.0);
        }
        let mean = sphere.integrate(|v| f.eval(t, v))?;
        Ok(phi * t.powf(beta - 1.0) * mean)
    })
}

/// `∫_{S^{k-1} ∩ (0,∞)^k} Π f_i(R v_i) v_i^{n-1} dσ(v)` by recursive
/// hyperspherical coordinates `v_1 = cos α`, `v' = sin α · w`.
fn orthant_integral(fs: &[&dyn PolarFunction], e1: &[f64], n: usize, big_r: f64, rule: &GaussRule, panels: usize) -> Result<f64> {
    let (first, rest) = fs.split_first().expect("non-empty factor list");
    if rest.is_empty() {
        return first.eval(big_r, e1);
    }
    let k = fs.len();
    let nf = n as f64 - 1.0;
    let sin_pow = (k as f64 - 2.0) + nf * (k as f64 - 1.0);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut cuts = vec![0.0, half_pi];
    for b in first.radial_breaks() {
        if b < big_r {
            cuts.push((b / big_r).acos());
        }
    }
    for g in rest {
        for b in g.radial_breaks() {
            if b < big_r {
                cuts.push((b / big_r).asin());
            }
        }
    }
    for i in 1..panels {
        cuts.push(half_pi * i as f64 / panels as f64);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        for (alpha, wt) in rule.mapped(w[0], w[1]) {
            let (s, c) = alpha.sin_cos();
            let head = first.eval(big_r * c, e1)?;
            if head == 0.0 {
                continue;
            }
            let tail = orthant_integral(rest, e1, n, big_r * s, rule, panels)?;
            total += wt * head * c.powf(nf) * s.powf(sin_pow) * tail;
        }
    }
    Ok(total)
}

/// `H_Φ(f_1,…,f_m)(x)` for radial `f_i` on `ℝⁿ` and a radial profile `φ` on `ℝ^{nm}`.
pub fn apply_multilinear(kernel: &KernelSpec, fs: &[&dyn PolarFunction], r: f64, q: &Quadrature) -> Result<f64> {
    let profile = radial_profile(kernel, "H_Φ(f_1,…,f_m)")?;
    let Some(first) = fs.first() else {
        return Err(Error::InvalidInput("multilinear operator needs at least one input".into()));
    };
    let n = first.dim();
    for f in fs {
        if f.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: f.dim() });
        }
        if !f.is_radial() {
            return Err(Error::Unsupported(
                "the multilinear operator is evaluated for radial inputs only".into(),
            ));
        }
    }
    if profile.is_zero() {
        return Ok(0.0);
    }
    let m = fs.len();
    let r = r.max(R_FLOOR);
    let e1 = unit_e1(n);
    let (lo2, hi2) = fs.iter().map(|f| f.support()).fold((0.0f64, 0.0f64), |a, s| (a.0 + s.0 * s.0, a.1 + s.1 * s.1));
    let (g_lo, g_hi) = (lo2.sqrt(), hi2.sqrt());
    let from_f = (r / g_hi, if g_lo > 0.0 { r / g_lo } else { f64::INFINITY });
    let (lo, hi) = intersect(profile.support(), from_f);
    let mut breaks = profile.breaks();
    for f in fs {
        breaks.extend(f.radial_breaks().iter().map(|b| r / b));
    }
    let panels = (q.angular_nodes / 8).max(2);
    let v = integrate_log(q, lo, hi, &breaks, |t| {
        let phi = profile.value(t);
        if phi == 0.0 {
            return Ok(0.0);
        }
        Ok(phi / t * orthant_integral(fs, &e1, n, r / t, &q.rule, panels)?)
    })?;
    Ok(omega(n).powi(m as i32) * v)
}

/// `S_Ψ(f_1,…,f_m)(x)` for `Ψ = Π ψ_i`, by nested quadrature over `(r_1,…,r_m)`.
pub fn apply_s_psi(kernel: &KernelSpec, fs: &[&dyn PolarFunction], r: f64, q: &Quadrature) -> Result<f64> {
    let KernelSpec::Psi { factors } = kernel else {
        return Err(Error::Unsupported("S_Ψ needs a Ψ kernel".into()));
    };
    if factors.len() != fs.len() {
        return Err(Error::InvalidInput(format!(
            "Ψ has {} factors but {} inputs were given",
            factors.len(),
            fs.len()
        )));
    }
    if factors.iter().any(Profile::is_zero) {
        return Ok(0.0);
    }
    let r = r.max(R_FLOOR);
    // Per-axis nodes, weights and F̄_i(r/r_i).
    let mut axes: Vec<Vec<(f64, f64, f64)>> = Vec::with_capacity(fs.len());
    for (profile, f) in factors.iter().zip(fs) {
        let n = f.dim();
        let sphere = Sphere::for_functions(q, n, f.is_radial(), f.angular_breaks())?;
        let ((lo, hi), breaks) = scaled_range(profile, *f, r);
        let mut axis = Vec::new();
        if hi > lo {
            let a = if lo > 0.0 { lo } else { hi / DECADES_CUT };
            let b = if hi.is_finite() { hi } else { lo * DECADES_CUT };
            let grid = q.log_grid(a, b, &breaks)?;
            for (ri, wi) in grid.nodes.iter().zip(&grid.weights) {
                let mean = sphere.integrate(|v| f.eval(r / ri, v))?;
                axis.push((*ri, *wi, mean / ri));
            }
        }
        axes.push(axis);
    }
    let mut point = vec![0.0; fs.len()];
    let psi = |x: &[f64]| factors.iter().zip(x).map(|(p, t)| p.value(*t)).product::<f64>();
    fn nest(axes: &[Vec<(f64, f64, f64)>], depth: usize, point: &mut [f64], acc: f64, psi: &dyn Fn(&[f64]) -> f64) -> f64 {
        if depth == axes.len() {
            return acc * psi(point);
        }
        let mut s = 0.0;
        for (ri, wi, g) in &axes[depth] {
            if *g == 0.0 {
                continue;
            }
            point[depth] = *ri;
            s += nest(axes, depth + 1, point, acc * wi * g, psi);
        }
        s
    }
    let v = nest(&axes, 0, &mut point, 1.0, &psi);
    if !v.is_finite() {
        return Err(Error::NonFinite("S_Ψ integral".into()));
    }
    Ok(v)
}

/// Commutator in its direct kernel form, `∫ K(x,y) f(y)(b(x) − b(y)) dy`.
pub fn apply_commutator(
    base: CommutatorBase,
    kernel: &KernelSpec,
    b: &SymbolSpec,
    f: &dyn PolarFunction,
    r: f64,
    dir: &[f64],
    q: &Quadrature,
) -> Result<f64> {
    check_point(f, dir)?;
    if b.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: b.dim() });
    }
    let profile = radial_profile(kernel, "commutator")?;
    match base {
        CommutatorBase::Hausdorff => commutator_core(profile, b, f, r, dir, q, (0.0, f64::INFINITY)),
        CommutatorBase::Adjoint => {
            if profile.is_zero() {
                return Ok(0.0);
            }
            let r = r.max(R_FLOOR);
            let bx = b.value(r, dir);
            let ((lo, hi), mut breaks) = scaled_range(profile, f, r);
            breaks.extend(b.radial_breaks().iter().map(|c| r / c));
            let v = integrate_log(q, lo, hi, &breaks, |s| {
                let phi = profile.value(s);
                if phi == 0.0 {
                    return Ok(0.0);
                }
                let y = r / s;
                Ok(phi / s * f.eval(y, dir)? * (bx - b.value(y, dir)))
            })?;
            Ok(omega(f.dim()) * v)
        }
    }
}

/// `H^b_{Φ,1}` (`|y| < |x|`, i.e. `t > 1`) or `H^b_{Φ,2}` (`|y| ≥ |x|`, `t ≤ 1`).
pub fn apply_split_commutator(
    part: SplitPart,
    kernel: &KernelSpec,
    b: &SymbolSpec,
    f: &dyn PolarFunction,
    r: f64,
    dir: &[f64],
    q: &Quadrature,
) -> Result<f64> {
    check_point(f, dir)?;
    if b.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: b.dim() });
    }
    let profile = radial_profile(kernel, "split commutator")?;
    let range = match part {
        SplitPart::Local => (1.0, f64::INFINITY),
        SplitPart::Global => (0.0, 1.0),
    };
    commutator_core(profile, b, f, r, dir, q, range)
}

fn commutator_core(
    profile: &Profile,
    b: &SymbolSpec,
    f: &dyn PolarFunction,
    r: f64,
    dir: &[f64],
    q: &Quadrature,
    t_range: (f64, f64),
) -> Result<f64> {
    if profile.is_zero() {
        return Ok(0.0);
    }
    let n = f.dim();
    let r = r.max(R_FLOOR);
    let bx = b.value(r, dir);
    let radial = f.is_radial() && b.is_radial();
    let sphere = Sphere::for_functions(q, n, radial, f.angular_breaks().merge(b.angular_breaks()))?;
    let ((lo, hi), mut breaks) = scaled_range(profile, f, r);
    let (lo, hi) = intersect((lo, hi), t_range);
    breaks.extend(b.radial_breaks().iter().map(|c| r / c));
    breaks.push(1.0);
    integrate_log(q, lo, hi, &breaks, |t| {
        let phi = profile.value(t);
        if phi == 0.0 {
            return Ok(0.0);
        }
        let rho = r / t;
        let inner = sphere.integrate(|v| {
            let fv = f.eval(rho, v)?;
            if fv == 0.0 {
                return Ok(0.0);
            }
            Ok(fv * (bx - b.value(rho, v)))
        })?;
        Ok(phi / t * inner)
    })
}

/// `b(x)·T f(x) − T(b f)(x)`, the second route to the commutator.
pub fn commutator_two_path(
    base: CommutatorBase,
    kernel: &KernelSpec,
    b: &SymbolSpec,
    f: &FieldSpec,
    r: f64,
    dir: &[f64],
    q: &Quadrature,
) -> Result<f64> {
    let bf = b.times(f);
    let (tf, tbf) = match base {
        CommutatorBase::Hausdorff => (
            apply_hausdorff(kernel, f, r, dir, q)?,
            apply_hausdorff(kernel, &bf, r, dir, q)?,
        ),
        CommutatorBase::Adjoint => (
            apply_adjoint(kernel, f, r, dir, q)?,
            apply_adjoint(kernel, &bf, r, dir, q)?,
        ),
    };
    Ok(b.value(r.max(R_FLOOR), dir) * tf - tbf)
}

impl AngularPart {
    fn validate_for(&self, n: usize) -> Result<()> {
        match self {
            AngularPart::Constant => Ok(()),
            AngularPart::Harmonic { .. } if n == 2 => Ok(()),
            AngularPart::Zonal { .. } if n == 3 => Ok(()),
            AngularPart::Cap { .. } if n == 2 || n == 3 => Ok(()),
            _ => Err(Error::Unsupported(format!("Ω {self:?} is not defined on S^{}", n - 1))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::RadialPart;
    use std::f64::consts::{LN_2, PI};

    fn chi12() -> KernelSpec {
        KernelSpec::radial(Profile::indicator(1.0, 2.0))
    }

    fn q() -> Quadrature {
        Quadrature::default()
    }

    #[test]
    fn hausdorff_ball_closed_form() {
        let q = q();
        let f = FieldSpec::ball(2, 1.0);
        for r in [0.0, 0.5, 1.0, 1.5, 2.0, 3.0] {
            let v = apply_hausdorff(&chi12(), &f, r, &[1.0, 0.0], &q).unwrap();
            let exact = if r >= 2.0 { 0.0 } else { 2.0 * PI * (2.0 / r.max(1.0)).ln() };
            assert!((v - exact).abs() < 1e-12, "r = {r}: {v} vs {exact}");
        }
        let zero = KernelSpec::radial(Profile::indicator(1.0, 2.0).with_coef(0.0));
        assert_eq!(apply_hausdorff(&zero, &f, 1.0, &[1.0, 0.0], &q).unwrap(), 0.0);
        assert!(apply_hausdorff(&chi12(), &f, 1.0, &[1.0, 0.0, 0.0], &q).is_err());
    }

    #[test]
    fn rough_half_circle() {
        let q = q();
        let f = FieldSpec::ball(2, 1.0);
        let k = KernelSpec::Rough {
            profile: Profile::indicator(1.0, 2.0),
            omega: AngularPart::Cap { height: 0.0 },
        };
        let v = apply_rough(&k, &f, 1.0, &[0.0, 1.0], &q).unwrap();
        assert!((v - PI * LN_2).abs() < 1e-12, "{v}");
    }

    #[test]
    fn adjoint_and_fractional_examples() {
        let q = q();
        let f = FieldSpec::ball(2, 1.0);
        let v = apply_adjoint(&KernelSpec::general(Profile::indicator(1.0, 2.0)), &f, 1.0, &[1.0, 0.0], &q).unwrap();
        assert!((v - 2.0 * PI * LN_2).abs() < 1e-12);
        let v = apply_fractional(&chi12(), 1.0, &f, 1.0, &[1.0, 0.0], &q).unwrap();
        // 2π ∫_{1/2}^{1} dt
        assert!((v - PI).abs() < 1e-12, "{v}");
        assert!(apply_fractional(&chi12(), 2.0, &f, 1.0, &[1.0, 0.0], &q).is_err());
        assert!(apply_fractional(&chi12(), -0.1, &f, 1.0, &[1.0, 0.0], &q).is_err());
    }

    #[test]
    fn s_psi_separable_example() {
        let q = q();
        let f = FieldSpec::ball(2, 1.0);
        let k = KernelSpec::Psi {
            factors: vec![Profile::indicator(1.0, 2.0), Profile::indicator(1.0, 2.0)],
        };
        let v = apply_s_psi(&k, &[&f, &f], 1.0, &q).unwrap();
        let exact = (2.0 * PI * LN_2).powi(2);
        assert!((v - exact).abs() < 1e-10, "{v}");
        assert!((v - 18.967).abs() < 1e-3);
    }

    /// `E_1(x)` by its power series (small `x`).
    fn exp_integral_e1(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            sum += term / k as f64;
        }
        -0.577_215_664_901_532_9 - x.ln() - sum
    }

    #[test]
    fn multilinear_gaussian_closed_form() {
        // f_1 = f_2 = e^{-r²} on ℝ², |x| = 1: ω_3 ∫_1^2 e^{-1/t²} dt/t = π²(E₁(1/4) − E₁(1)).
        let q = q();
        let g = FieldSpec::gaussian(2);
        let v = apply_multilinear(&chi12(), &[&g, &g], 1.0, &q).unwrap();
        let exact = PI * PI * (exp_integral_e1(0.25) - exp_integral_e1(1.0));
        assert!((v - exact).abs() < 1e-10, "{v} vs {exact}");
    }

    #[test]
    fn multilinear_three_factor_gaussian() {
        // Product of Gaussians is e^{-|y|²} on ℝ^{nm}: the orthant integral
        // collapses to ω_{nm-1} e^{-R²}.
        let q = q();
        let g = FieldSpec::gaussian(2);
        let v = apply_multilinear(&chi12(), &[&g, &g, &g], 0.7, &q).unwrap();
        let w5 = crate::geometry::sphere_area(6).unwrap();
        let exact = q
            .integrate_radial_fn(|t| Ok((-(0.7f64 / t).powi(2)).exp() / t), 1.0, 2.0, &[], Tails::NONE)
            .unwrap()
            * w5;
        assert!((v - exact).abs() < 1e-10 * exact, "{v} vs {exact}");
    }

    #[test]
    fn commutator_log_symbol() {
        let q = q();
        let f = FieldSpec::ball(2, 1.0);
        let b = FieldSpec::radial(2, RadialPart::ClippedLog { offset: 0.0, lo: 0.25, hi: 4.0 });
        let v = apply_commutator(CommutatorBase::Hausdorff, &chi12(), &b, &f, 1.0, &[1.0, 0.0], &q).unwrap();
        assert!((v - PI * LN_2 * LN_2).abs() < 1e-12, "{v}");
        let two = commutator_two_path(CommutatorBase::Hausdorff, &chi12(), &b, &f, 1.0, &[1.0, 0.0], &q).unwrap();
        assert!((v - two).abs() < 1e-12);
        let c = FieldSpec::constant(2, 3.0);
        for base in [CommutatorBase::Hausdorff, CommutatorBase::Adjoint] {
            let v = apply_commutator(base, &chi12(), &c, &f, 0.7, &[1.0, 0.0], &q).unwrap();
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn split_parts() {
        let q = q();
        let k = KernelSpec::radial(Profile::indicator(0.25, 2.0));
        let b = FieldSpec::radial(2, RadialPart::ClippedLog { offset: 0.0, lo: 0.25, hi: 4.0 });
        let f = FieldSpec::gaussian(2);
        for r in [0.3, 1.0, 2.5] {
            let loc = apply_split_commutator(SplitPart::Local, &k, &b, &f, r, &[1.0, 0.0], &q).unwrap();
            let glo = apply_split_commutator(SplitPart::Global, &k, &b, &f, r, &[1.0, 0.0], &q).unwrap();
            let full = apply_commutator(CommutatorBase::Hausdorff, &k, &b, &f, r, &[1.0, 0.0], &q).unwrap();
            assert!((loc + glo - full).abs() < 1e-12);
            assert!(glo != 0.0 && loc != 0.0);
        }
        let far = FieldSpec::radial(2, RadialPart::Annulus { inner: 2.0, outer: 3.0 });
        let loc = apply_split_commutator(SplitPart::Local, &k, &b, &far, 1.0, &[1.0, 0.0], &q).unwrap();
        assert_eq!(loc, 0.0);
    }

    #[test]
    fn image_is_lazy_operator() {
        let q = q();
        let op = OperatorSpec::new(OperatorKind::Hausdorff, chi12(), 2).unwrap();
        let inputs = [FieldSpec::ball(2, 1.0)];
        let img = op.image(&inputs, &q);
        assert!(img.is_radial());
        assert_eq!(img.support(), (0.0, 2.0));
        let v = img.eval(1.5, &[0.0, 1.0]).unwrap();
        assert!((v - 2.0 * PI * (2.0f64 / 1.5).ln()).abs() < 1e-12);
        assert!(img.radial_breaks().contains(&1.0));
        assert!(OperatorSpec::new(OperatorKind::Fractional { beta: 3.0 }, chi12(), 2).is_err());
        assert!(OperatorSpec::new(OperatorKind::SPsi { m: 2 }, chi12(), 2).is_err());
    }
}
