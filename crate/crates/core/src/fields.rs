//! Analytic test functions, commutator symbols and kernels.
//!
//! Everything here is evaluated in closed form at arbitrary points, so the
//! operators never interpolate. Dilation is parameter rewriting.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::geometry::AngularBreaks;

/// A function on `ℝⁿ \ {0}` evaluated in polar coordinates `x = rθ`.
pub trait PolarFunction: Sync {
    fn dim(&self) -> usize;

    /// Value at `rθ`; `dir` is a unit vector of length `dim()`.
    fn eval(&self, r: f64, dir: &[f64]) -> Result<f64>;

    fn is_radial(&self) -> bool;

    /// Radii where the function or its derivative jumps.
    fn radial_breaks(&self) -> Vec<f64> {
        Vec::new()
    }

    fn angular_breaks(&self) -> AngularBreaks {
        AngularBreaks::None
    }

    /// Radial interval outside of which the function vanishes (or is below
    /// 1e-20 of its natural size).
    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
}

fn one() -> f64 {
    1.0
}

/// Radial factor of a separable field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RadialPart {
    /// `r^a e^{-b r^c}`.
    PowerGaussian { a: f64, b: f64, c: f64 },
    /// `r^a χ_{(0,R]}(r)`.
    PowerCutoff { a: f64, radius: f64 },
    /// `χ_{(R₁,R₂]}(r)`.
    Annulus { inner: f64, outer: f64 },
    /// `offset + ln(min(max(r, lo), hi))`; a bounded logarithm used as a
    /// commutator symbol.
    ClippedLog { offset: f64, lo: f64, hi: f64 },
}

impl RadialPart {
    pub fn value(&self, r: f64) -> f64 {
        match *self {
            RadialPart::PowerGaussian { a, b, c } => {
                let e = -b * r.powf(c);
                if a == 0.0 {
                    e.exp()
                } else {
                    (a * r.ln() + e).exp()
                }
            }
            RadialPart::PowerCutoff { a, radius } => {
                if r <= radius {
                    if a == 0.0 {
                        1.0
                    } else {
                        r.powf(a)
                    }
                } else {
                    0.0
                }
            }
            RadialPart::Annulus { inner, outer } => {
                if r > inner && r <= outer {
                    1.0
                } else {
                    0.0
                }
            }
            RadialPart::ClippedLog { offset, lo, hi } => offset + r.clamp(lo, hi).ln(),
        }
    }

    /// `(factor, part)` with `factor · part(r) = self(λr)`.
    pub fn dilate(&self, lambda: f64) -> (f64, RadialPart) {
        match *self {
            RadialPart::PowerGaussian { a, b, c } => (
                pow_or_one(lambda, a),
                RadialPart::PowerGaussian {
                    a,
                    b: b * pow_or_one(lambda, c),
                    c,
                },
            ),
            RadialPart::PowerCutoff { a, radius } => (
                pow_or_one(lambda, a),
                RadialPart::PowerCutoff {
                    a,
                    radius: radius / lambda,
                },
            ),
            RadialPart::Annulus { inner, outer } => (
                1.0,
                RadialPart::Annulus {
                    inner: inner / lambda,
                    outer: outer / lambda,
                },
            ),
            RadialPart::ClippedLog { offset, lo, hi } => (
                1.0,
                RadialPart::ClippedLog {
                    offset: offset + lambda.ln(),
                    lo: lo / lambda,
                    hi: hi / lambda,
                },
            ),
        }
    }

    pub fn breaks(&self) -> Vec<f64> {
        match *self {
            RadialPart::PowerGaussian { .. } => vec![],
            RadialPart::PowerCutoff { radius, .. } => vec![radius],
            RadialPart::Annulus { inner, outer } => vec![inner, outer],
            RadialPart::ClippedLog { lo, hi, .. } => vec![lo, hi],
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            RadialPart::PowerGaussian { a, b, c } => (0.0, gaussian_extent(a, b, c)),
            RadialPart::PowerCutoff { radius, .. } => (0.0, radius),
            RadialPart::Annulus { inner, outer } => (inner, outer),
            RadialPart::ClippedLog { .. } => (0.0, f64::INFINITY),
        }
    }

    pub(crate) fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        match *self {
            RadialPart::PowerGaussian { a, b, c } => {
                if !(b > 0.0 && c > 0.0) {
                    return bad(format!("power-gaussian needs b > 0 and c > 0, got b = {b}, c = {c}"));
                }
                if !(a > -(n as f64)) {
                    return bad(format!("power-gaussian exponent a = {a} is not locally integrable"));
                }
            }
            RadialPart::PowerCutoff { a, radius } => {
                if !(radius > 0.0 && radius.is_finite()) {
                    return bad(format!("power-cutoff needs 0 < R < inf, got {radius}"));
                }
                if !(a > -(n as f64)) {
                    return bad(format!("power-cutoff exponent a = {a} is not locally integrable"));
                }
            }
            RadialPart::Annulus { inner, outer } => {
                if !(inner >= 0.0 && outer > inner && outer.is_finite()) {
                    return bad(format!("annulus needs 0 <= R1 < R2 < inf, got ({inner}, {outer}]"));
                }
            }
            RadialPart::ClippedLog { lo, hi, .. } => {
                if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
                    return bad(format!("clipped log needs 0 < lo <= hi < inf, got [{lo}, {hi}]"));
                }
            }
        }
        Ok(())
    }
}

fn pow_or_one(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        x.powf(e)
    }
}

/// Radius beyond which `r^a e^{-b r^c}` is below 1e-20 of its size at the
/// natural scale `b^{-1/c}` (or at its peak, whichever is later).
fn gaussian_extent(a: f64, b: f64, c: f64) -> f64 {
    let log_g = |r: f64| a * r.ln() - b * r.powf(c);
    let scale = b.powf(-1.0 / c);
    let peak = if a > 0.0 { (a / (b * c)).powf(1.0 / c) } else { scale };
    let start = scale.max(peak);
    let target = log_g(start) - 20.0 * std::f64::consts::LN_10;
    let mut lo = start;
    let mut hi = start * 2.0;
    while log_g(hi) > target {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if log_g(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Angular factor of a separable field (or the rough kernel `Ω`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AngularPart {
    Constant,
    /// `cos(kφ) + offset` on the circle, `φ` the polar angle (n = 2).
    Harmonic { k: u32, offset: f64 },
    /// `Σ_j coeffs[j] (θ·e₃)^j` on `S²`.
    Zonal { coeffs: Vec<f64> },
    /// Indicator of `{θ : θ_n ≥ height}` (last coordinate), n ∈ {2, 3}.
    Cap { height: f64 },
}

impl AngularPart {
    pub fn is_constant(&self) -> bool {
        matches!(self, AngularPart::Constant)
    }

    pub fn value(&self, dir: &[f64]) -> f64 {
        match self {
            AngularPart::Constant => 1.0,
            AngularPart::Harmonic { k, offset } => {
                (*k as f64 * dir[1].atan2(dir[0])).cos() + offset
            }
            AngularPart::Zonal { coeffs } => {
                let z = dir[2];
                coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c)
            }
            AngularPart::Cap { height } => {
                if dir[dir.len() - 1] >= *height {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn breaks(&self, n: usize) -> AngularBreaks {
        match self {
            AngularPart::Cap { height } if height.abs() < 1.0 => {
                if n == 2 {
                    let a = height.asin();
                    AngularBreaks::Circle(vec![a, PI - a])
                } else {
                    AngularBreaks::Height(vec![*height])
                }
            }
            _ => AngularBreaks::None,
        }
    }

    /// `∫_{S^{n-1}} value dσ` in closed form.
    pub fn sphere_integral(&self, n: usize) -> f64 {
        match self {
            AngularPart::Constant => crate::geometry::omega(n),
            AngularPart::Harmonic { k, offset } => {
                2.0 * PI * (offset + if *k == 0 { 1.0 } else { 0.0 })
            }
            AngularPart::Zonal { coeffs } => coeffs
                .iter()
                .enumerate()
                .filter(|(j, _)| j % 2 == 0)
                .map(|(j, c)| c * 4.0 * PI / (j as f64 + 1.0))
                .sum(),
            AngularPart::Cap { height } => {
                let h = height.clamp(-1.0, 1.0);
                if n == 2 {
                    PI - 2.0 * h.asin()
                } else {
                    2.0 * PI * (1.0 - h)
                }
            }
        }
    }

    pub(crate) fn validate(&self, n: usize) -> Result<()> {
        let need = |dims: &[usize], what: &str| {
            if dims.contains(&n) {
                Ok(())
            } else {
                Err(Error::Unsupported(format!(
                    "{what} angular part needs n in {dims:?}, got n = {n}"
                )))
            }
        };
        match self {
            AngularPart::Constant => Ok(()),
            AngularPart::Harmonic { .. } => need(&[2], "harmonic"),
            AngularPart::Zonal { coeffs } => {
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidInput("zonal coefficients must be finite".into()));
                }
                need(&[3], "zonal")
            }
            AngularPart::Cap { .. } => need(&[2, 3], "cap"),
        }
    }
}

/// Analytic test function on `ℝⁿ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum FieldSpec {
    Separable {
        dim: usize,
        radial: RadialPart,
        #[serde(default = "constant_angular")]
        angular: AngularPart,
        #[serde(default = "one")]
        scale: f64,
    },
    Sum { terms: Vec<FieldSpec> },
    Product { factors: Vec<FieldSpec> },
}

fn constant_angular() -> AngularPart {
    AngularPart::Constant
}

/// Commutator symbols share the field representation.
pub type SymbolSpec = FieldSpec;

impl FieldSpec {
    pub fn separable(dim: usize, radial: RadialPart, angular: AngularPart, scale: f64) -> Self {
        FieldSpec::Separable {
            dim,
            radial,
            angular,
            scale,
        }
    }

    pub fn radial(dim: usize, radial: RadialPart) -> Self {
        FieldSpec::separable(dim, radial, AngularPart::Constant, 1.0)
    }

    /// `e^{-r²}` on `ℝⁿ`.
    pub fn gaussian(dim: usize) -> Self {
        FieldSpec::radial(dim, RadialPart::PowerGaussian { a: 0.0, b: 1.0, c: 2.0 })
    }

    /// `χ_{B(0,R)}`.
    pub fn ball(dim: usize, radius: f64) -> Self {
        FieldSpec::radial(dim, RadialPart::PowerCutoff { a: 0.0, radius })
    }

    pub fn zero(dim: usize) -> Self {
        FieldSpec::separable(dim, RadialPart::PowerCutoff { a: 0.0, radius: 1.0 }, AngularPart::Constant, 0.0)
    }

    /// Constant function `c` on `ℝⁿ`.
    pub fn constant(dim: usize, c: f64) -> Self {
        FieldSpec::separable(
            dim,
            RadialPart::ClippedLog { offset: 1.0, lo: 1.0, hi: 1.0 },
            AngularPart::Constant,
            c,
        )
    }

    pub fn dim(&self) -> usize {
        match self {
            FieldSpec::Separable { dim, .. } => *dim,
            FieldSpec::Sum { terms } => terms.first().map_or(0, FieldSpec::dim),
            FieldSpec::Product { factors } => factors.first().map_or(0, FieldSpec::dim),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FieldSpec::Separable {
                dim,
                radial,
                angular,
                scale,
            } => {
                if *dim < 1 {
                    return Err(Error::InvalidInput("field dimension must be >= 1".into()));
                }
                if !scale.is_finite() {
                    return Err(Error::InvalidInput("field scale must be finite".into()));
                }
                radial.validate(*dim)?;
                angular.validate(*dim)
            }
            FieldSpec::Sum { terms: parts } | FieldSpec::Product { factors: parts } => {
                let Some(first) = parts.first() else {
                    return Err(Error::InvalidInput("empty sum or product field".into()));
                };
                let n = first.dim();
                for p in parts {
                    if p.dim() != n {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            got: p.dim(),
                        });
                    }
                    p.validate()?;
                }
                Ok(())
            }
        }
    }

    /// Value at `rθ` without checking the direction's length.
    pub fn value(&self, r: f64, dir: &[f64]) -> f64 {
        match self {
            FieldSpec::Separable {
                radial,
                angular,
                scale,
                ..
            } => {
                if *scale == 0.0 {
                    return 0.0;
                }
                let rad = radial.value(r);
                if rad == 0.0 {
                    return 0.0;
                }
                scale * rad * angular.value(dir)
            }
            FieldSpec::Sum { terms } => terms.iter().map(|t| t.value(r, dir)).sum(),
            FieldSpec::Product { factors } => {
                let mut v = 1.0;
                for f in factors {
                    v *= f.value(r, dir);
                    if v == 0.0 {
                        break;
                    }
                }
                v
            }
        }
    }

    /// Spec evaluating to `x ↦ f(λx)`.
    pub fn dilate(&self, lambda: f64) -> FieldSpec {
        match self {
            FieldSpec::Separable {
                dim,
                radial,
                angular,
                scale,
            } => {
                let (factor, radial) = radial.dilate(lambda);
                FieldSpec::Separable {
                    dim: *dim,
                    radial,
                    angular: angular.clone(),
                    scale: scale * factor,
                }
            }
            FieldSpec::Sum { terms } => FieldSpec::Sum {
                terms: terms.iter().map(|t| t.dilate(lambda)).collect(),
            },
            FieldSpec::Product { factors } => FieldSpec::Product {
                factors: factors.iter().map(|t| t.dilate(lambda)).collect(),
            },
        }
    }

    /// `c · f`.
    pub fn scaled(&self, c: f64) -> FieldSpec {
        match self {
            FieldSpec::Separable {
                dim,
                radial,
                angular,
                scale,
            } => FieldSpec::Separable {
                dim: *dim,
                radial: radial.clone(),
                angular: angular.clone(),
                scale: scale * c,
            },
            FieldSpec::Sum { terms } => FieldSpec::Sum {
                terms: terms.iter().map(|t| t.scaled(c)).collect(),
            },
            FieldSpec::Product { factors } => {
                let mut factors = factors.clone();
                if let Some(first) = factors.first_mut() {
                    *first = first.scaled(c);
                }
                FieldSpec::Product { factors }
            }
        }
    }

    pub fn plus(&self, other: &FieldSpec) -> FieldSpec {
        FieldSpec::Sum {
            terms: vec![self.clone(), other.clone()],
        }
    }

    pub fn times(&self, other: &FieldSpec) -> FieldSpec {
        FieldSpec::Product {
            factors: vec![self.clone(), other.clone()],
        }
    }

    /// True when the spec is identically zero by construction.
    pub fn is_zero(&self) -> bool {
        match self {
            FieldSpec::Separable { scale, .. } => *scale == 0.0,
            FieldSpec::Sum { terms } => terms.iter().all(FieldSpec::is_zero),
            FieldSpec::Product { factors } => factors.iter().any(FieldSpec::is_zero),
        }
    }
}

impl PolarFunction for FieldSpec {
    fn dim(&self) -> usize {
        FieldSpec::dim(self)
    }

    fn eval(&self, r: f64, dir: &[f64]) -> Result<f64> {
        if dir.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: dir.len(),
            });
        }
        Ok(self.value(r, dir))
    }

    fn is_radial(&self) -> bool {
        match self {
            FieldSpec::Separable { angular, scale, .. } => angular.is_constant() || *scale == 0.0,
            FieldSpec::Sum { terms } => terms.iter().all(|t| t.is_radial()),
            FieldSpec::Product { factors } => {
                factors.iter().all(|t| t.is_radial()) || self.is_zero()
            }
        }
    }

    fn radial_breaks(&self) -> Vec<f64> {
        let mut out = match self {
            FieldSpec::Separable { radial, .. } => radial.breaks(),
            FieldSpec::Sum { terms: parts } | FieldSpec::Product { factors: parts } => {
                parts.iter().flat_map(|p| p.radial_breaks()).collect()
            }
        };
        out.retain(|b| *b > 0.0 && b.is_finite());
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn angular_breaks(&self) -> AngularBreaks {
        match self {
            FieldSpec::Separable { angular, dim, .. } => angular.breaks(*dim),
            FieldSpec::Sum { terms: parts } | FieldSpec::Product { factors: parts } => parts
                .iter()
                .fold(AngularBreaks::None, |acc, p| acc.merge(p.angular_breaks())),
        }
    }

    fn support(&self) -> (f64, f64) {
        match self {
            FieldSpec::Separable { radial, scale, .. } => {
                if *scale == 0.0 {
                    (1.0, 1.0)
                } else {
                    radial.support()
                }
            }
            FieldSpec::Sum { terms } => terms
                .iter()
                .filter(|t| !t.is_zero())
                .map(|t| t.support())
                .fold((f64::INFINITY, 0.0), |acc, s| (acc.0.min(s.0), acc.1.max(s.1))),
            FieldSpec::Product { factors } => factors
                .iter()
                .map(|t| t.support())
                .fold((0.0, f64::INFINITY), |acc, s| (acc.0.max(s.0), acc.1.min(s.1))),
        }
    }
}

/// Checked evaluation of a field at `rθ`.
pub fn eval_field(spec: &FieldSpec, r: f64, dir: &[f64]) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {r}")));
    }
    spec.eval(r, dir)
}

pub fn eval_symbol(spec: &SymbolSpec, r: f64, dir: &[f64]) -> Result<f64> {
    eval_field(spec, r, dir)
}

/// One-variable kernel profile on `(0, ∞)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Profile {
    /// `coef · t^s χ_{[t0,t1]}(t)`; a missing `t1` means `+∞`.
    PowerCutoff {
        #[serde(default = "one")]
        coef: f64,
        s: f64,
        t0: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t1: Option<f64>,
    },
    /// `coef · t^s e^{-bt}`.
    PowerExp {
        #[serde(default = "one")]
        coef: f64,
        s: f64,
        b: f64,
    },
}

impl Profile {
    /// `χ_{[t0,t1]}`.
    pub fn indicator(t0: f64, t1: f64) -> Self {
        Profile::PowerCutoff {
            coef: 1.0,
            s: 0.0,
            t0,
            t1: Some(t1),
        }
    }

    pub fn power_cutoff(s: f64, t0: f64, t1: Option<f64>) -> Self {
        Profile::PowerCutoff { coef: 1.0, s, t0, t1 }
    }

    pub fn power_exp(s: f64, b: f64) -> Self {
        Profile::PowerExp { coef: 1.0, s, b }
    }

    pub fn coef(&self) -> f64 {
        match self {
            Profile::PowerCutoff { coef, .. } | Profile::PowerExp { coef, .. } => *coef,
        }
    }

    pub fn with_coef(&self, c: f64) -> Self {
        let mut p = self.clone();
        match &mut p {
            Profile::PowerCutoff { coef, .. } | Profile::PowerExp { coef, .. } => *coef = c,
        }
        p
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Profile::PowerCutoff { coef, s, t0, t1 } => {
                if coef == 0.0 || t < t0 || t > t1.unwrap_or(f64::INFINITY) {
                    0.0
                } else {
                    coef * pow_or_one(t, s)
                }
            }
            Profile::PowerExp { coef, s, b } => {
                if coef == 0.0 {
                    0.0
                } else {
                    coef * (s * t.ln() - b * t).exp()
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coef() == 0.0
    }

    pub fn breaks(&self) -> Vec<f64> {
        match *self {
            Profile::PowerCutoff { t0, t1, .. } => {
                let mut v = Vec::new();
                if t0 > 0.0 {
                    v.push(t0);
                }
                if let Some(t1) = t1 {
                    v.push(t1);
                }
                v
            }
            Profile::PowerExp { .. } => vec![],
        }
    }

    /// Closed interval outside of which the profile vanishes (to 1e-20
    /// relative for the exponential family).
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Profile::PowerCutoff { t0, t1, .. } => (t0, t1.unwrap_or(f64::INFINITY)),
            Profile::PowerExp { s, b, .. } => (0.0, gaussian_extent(s, b, 1.0)),
        }
    }

    /// Closed form of `∫_0^∞ |φ(t)|^q t^{e-1} dt`.
    pub fn abs_moment(&self, q: f64, e: f64) -> Result<f64> {
        let c = self.coef().abs();
        if c == 0.0 {
            return Ok(0.0);
        }
        match *self {
            Profile::PowerCutoff { s, t0, t1, .. } => {
                let k = q * s + e;
                let prim = |t: f64| if k == 0.0 { t.ln() } else { t.powf(k) / k };
                let upper = match t1 {
                    Some(t1) => prim(t1),
                    None if k < 0.0 => 0.0,
                    None => {
                        return Err(Error::DivergentMoment(format!(
                            "∫ t^{k:.4} dt/t diverges at infinity"
                        )))
                    }
                };
                let lower = if t0 > 0.0 {
                    prim(t0)
                } else if k > 0.0 {
                    0.0
                } else {
                    return Err(Error::DivergentMoment(format!(
                        "∫ t^{k:.4} dt/t diverges at the origin"
                    )));
                };
                Ok(c.powf(q) * (upper - lower))
            }
            Profile::PowerExp { s, b, .. } => {
                let k = q * s + e;
                if k <= 0.0 {
                    return Err(Error::DivergentMoment(format!(
                        "∫ t^{k:.4} e^(-qbt) dt/t diverges at the origin"
                    )));
                }
                Ok(c.powf(q) * gamma(k) / (q * b).powf(k))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Profile::PowerCutoff { coef, t0, t1, .. } => {
                if !coef.is_finite() || !(t0 >= 0.0) || t1.is_some_and(|t1| !(t1 > t0 && t1.is_finite())) {
                    return Err(Error::InvalidInput(format!(
                        "power-cutoff profile needs 0 <= t0 < t1, got [{t0}, {t1:?}]"
                    )));
                }
            }
            Profile::PowerExp { coef, b, .. } => {
                if !coef.is_finite() || !(b > 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "power-exp profile needs b > 0, got {b}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Kernel of an operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum KernelSpec {
    /// `Φ(x) = φ(|x|)` in `H_Φ`, `H_{Φ,β}` and the commutators.
    Radial { profile: Profile },
    /// `Φ(y) = φ(|y|)` in the ray form `𝓗_Φ`.
    General { profile: Profile },
    /// `Φ` together with an angular weight `Ω`.
    Rough { profile: Profile, omega: AngularPart },
    /// `Ψ(r₁,…,r_m) = Π φ_i(r_i)`.
    Psi { factors: Vec<Profile> },
}

impl KernelSpec {
    pub fn radial(profile: Profile) -> Self {
        KernelSpec::Radial { profile }
    }

    pub fn general(profile: Profile) -> Self {
        KernelSpec::General { profile }
    }

    /// The single radial profile, for every variant but `Psi`.
    pub fn profile(&self) -> Option<&Profile> {
        match self {
            KernelSpec::Radial { profile }
            | KernelSpec::General { profile }
            | KernelSpec::Rough { profile, .. } => Some(profile),
            KernelSpec::Psi { .. } => None,
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            KernelSpec::Psi { factors } => factors.len(),
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::Radial { profile } | KernelSpec::General { profile } => profile.validate(),
            KernelSpec::Rough { profile, .. } => profile.validate(),
            KernelSpec::Psi { factors } => {
                if factors.is_empty() {
                    return Err(Error::InvalidInput("Ψ needs at least one factor".into()));
                }
                factors.iter().try_for_each(Profile::validate)
            }
        }
    }
}

/// Profile value `φ(t)` of a one-profile kernel.
pub fn eval_kernel_profile(spec: &KernelSpec, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("t must be positive, got {t}")));
    }
    match spec.profile() {
        Some(p) => Ok(p.value(t)),
        None => Err(Error::Unsupported(
            "Ψ has several profiles; evaluate them through KernelSpec::Psi".into(),
        )),
    }
}

/// Growth function `φ` of the generalized central Morrey space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Growth {
    /// `r^δ`.
    Power { delta: f64 },
    /// `r^{small}` on `(0,1]`, `r^{large}` on `(1,∞)`.
    BrokenPower { small: f64, large: f64 },
}

impl Growth {
    pub fn value(&self, r: f64) -> f64 {
        match *self {
            Growth::Power { delta } => pow_or_one(r, delta),
            Growth::BrokenPower { small, large } => {
                if r <= 1.0 {
                    pow_or_one(r, small)
                } else {
                    pow_or_one(r, large)
                }
            }
        }
    }

    /// True when `φ(r/t)/φ(r)` does not depend on `r`.
    pub fn is_power(&self) -> bool {
        match *self {
            Growth::Power { .. } => true,
            Growth::BrokenPower { small, large } => small == large,
        }
    }

    pub fn breaks(&self) -> Vec<f64> {
        match self {
            Growth::Power { .. } => vec![],
            Growth::BrokenPower { .. } => vec![1.0],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> [f64; 2] {
        [1.0, 0.0]
    }

    #[test]
    fn field_examples() {
        let g = FieldSpec::gaussian(2);
        assert_eq!(eval_field(&g, 1.0, &e1()).unwrap(), (-1f64).exp());
        let ball = FieldSpec::ball(2, 1.0);
        assert_eq!(eval_field(&ball, 2.0, &e1()).unwrap(), 0.0);
        assert_eq!(eval_field(&ball, 1.0, &e1()).unwrap(), 1.0);
        let f = FieldSpec::separable(
            2,
            RadialPart::PowerGaussian { a: 1.0, b: 2.0, c: 2.0 },
            AngularPart::Harmonic { k: 2, offset: 2.0 },
            1.0,
        );
        let v = eval_field(&f, 1.0, &e1()).unwrap();
        assert!((v - 3.0 * (-2f64).exp()).abs() < 1e-15);
        assert!(matches!(
            eval_field(&f, 1.0, &[1.0, 0.0, 0.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
        assert!(eval_field(&f, 0.0, &e1()).is_err());
    }

    #[test]
    fn kernel_examples() {
        let k = KernelSpec::radial(Profile::indicator(1.0, 2.0));
        assert_eq!(eval_kernel_profile(&k, 1.5).unwrap(), 1.0);
        assert_eq!(eval_kernel_profile(&k, 3.0).unwrap(), 0.0);
        let k = KernelSpec::radial(Profile::power_exp(-0.5, 1.0));
        let v = eval_kernel_profile(&k, 4.0).unwrap();
        // Second route: 1/(2e^4).
        let expected = 0.5 / 4f64.exp();
        assert!((v - expected).abs() < 1e-16, "{v}");
        assert!((v - 0.009158).abs() < 1e-6);
    }

    #[test]
    fn dilation_examples() {
        let ball = FieldSpec::ball(2, 1.0);
        assert_eq!(ball.dilate(2.0), FieldSpec::ball(2, 0.5));
        let g = FieldSpec::gaussian(3);
        for lambda in [0.3, 2.0, 5.0] {
            assert_eq!(
                g.dilate(lambda),
                FieldSpec::radial(3, RadialPart::PowerGaussian { a: 0.0, b: lambda * lambda, c: 2.0 })
            );
        }
        let f = FieldSpec::separable(
            2,
            RadialPart::PowerGaussian { a: 1.5, b: 0.7, c: 1.3 },
            AngularPart::Harmonic { k: 3, offset: 0.5 },
            -2.0,
        );
        assert_eq!(f.dilate(1.0), f);
    }

    #[test]
    fn dilation_matches_scaled_evaluation() {
        let fields = [
            FieldSpec::separable(
                2,
                RadialPart::PowerGaussian { a: 1.5, b: 0.7, c: 1.3 },
                AngularPart::Harmonic { k: 3, offset: 0.5 },
                -2.0,
            ),
            FieldSpec::radial(2, RadialPart::PowerCutoff { a: -0.5, radius: 2.0 }),
            FieldSpec::radial(2, RadialPart::Annulus { inner: 0.5, outer: 3.0 }),
            FieldSpec::radial(2, RadialPart::ClippedLog { offset: 0.2, lo: 0.25, hi: 4.0 }),
        ];
        for f in &fields {
            for (lambda, r) in [(0.37, 0.9), (2.5, 0.11), (1.7, 1.3), (0.8, 4.2)] {
                let dir = [0.6, 0.8];
                let a = f.dilate(lambda).value(r, &dir);
                let b = f.value(lambda * r, &dir);
                assert!((a - b).abs() <= 1e-13 * b.abs().max(1e-300), "{f:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn validation() {
        assert!(FieldSpec::separable(3, RadialPart::PowerCutoff { a: 0.0, radius: 1.0 }, AngularPart::Harmonic { k: 1, offset: 0.0 }, 1.0)
            .validate()
            .is_err());
        assert!(FieldSpec::radial(2, RadialPart::PowerGaussian { a: 0.0, b: -1.0, c: 2.0 })
            .validate()
            .is_err());
        assert!(FieldSpec::radial(2, RadialPart::PowerCutoff { a: -2.0, radius: 1.0 })
            .validate()
            .is_err());
        assert!(FieldSpec::gaussian(5).validate().is_ok());
        assert!(KernelSpec::Psi { factors: vec![] }.validate().is_err());
    }

    #[test]
    fn angular_sphere_integrals_match_quadrature() {
        use crate::geometry::{integrate_sphere, AngularGrid};
        let cases = [
            (2, AngularPart::Harmonic { k: 2, offset: 0.3 }),
            (2, AngularPart::Cap { height: 0.0 }),
            (2, AngularPart::Cap { height: 0.4 }),
            (3, AngularPart::Zonal { coeffs: vec![1.0, 0.5, 2.0, -1.0] }),
            (3, AngularPart::Cap { height: -0.2 }),
        ];
        for (n, part) in cases {
            let grid = AngularGrid::adapted(n, 31, &part.breaks(n)).unwrap();
            let s: Vec<f64> = grid.iter().map(|(v, _)| part.value(v)).collect();
            let q = integrate_sphere(&grid, &s).unwrap();
            assert!((q - part.sphere_integral(n)).abs() < 1e-12, "{part:?}: {q}");
        }
    }

    #[test]
    fn profile_moments_match_quadrature() {
        use crate::geometry::{Quadrature, Tails};
        let q = Quadrature::default();
        let profiles = [
            Profile::indicator(1.0, 2.0),
            Profile::power_cutoff(-0.5, 0.25, Some(3.0)),
            Profile::power_cutoff(-3.0, 1.0, None),
            Profile::power_exp(0.5, 1.0),
            Profile::power_exp(-0.5, 2.0).with_coef(-1.5),
        ];
        for p in &profiles {
            for (pow, e) in [(1.0, 1.0), (2.0, 1.5), (1.5, 2.0)] {
                let exact = p.abs_moment(pow, e).unwrap();
                let (lo, hi) = p.support();
                let lo = lo.max(1e-12);
                let hi = hi.min(1e6);
                let numeric = q
                    .integrate_radial_fn(
                        |t| Ok(p.value(t).abs().powf(pow) * t.powf(e - 1.0)),
                        lo,
                        hi,
                        &p.breaks(),
                        Tails { lower: lo <= 1e-12, upper: hi >= 1e6 },
                    )
                    .unwrap();
                assert!(((numeric - exact) / exact).abs() < 1e-10, "{p:?} {pow} {e}: {numeric} vs {exact}");
            }
        }
        assert!(Profile::power_cutoff(0.0, 1.0, None).abs_moment(1.0, 1.0).is_err());
        assert!(Profile::power_exp(-1.0, 1.0).abs_moment(1.0, 0.5).is_err());
        assert_eq!(Profile::indicator(1.0, 2.0).with_coef(0.0).abs_moment(1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_extent_is_conservative() {
        for (a, b, c) in [(0.0, 1.0, 2.0), (3.0, 0.5, 1.0), (-0.5, 4.0, 2.0), (1.0, 2.0, 2.0)] {
            let part = RadialPart::PowerGaussian { a, b, c };
            let (_, hi) = part.support();
            let scale: f64 = b.powf(-1.0 / c);
            assert!(part.value(hi) <= 1e-19 * part.value(scale).max(part.value(hi / 4.0)));
        }
    }

    #[test]
    fn toml_roundtrip() {
        let f = FieldSpec::separable(
            2,
            RadialPart::PowerGaussian { a: 1.0, b: 2.0, c: 2.0 },
            AngularPart::Harmonic { k: 2, offset: 2.0 },
            1.0,
        );
        let s = toml::to_string(&f).unwrap();
        let back: FieldSpec = toml::from_str(&s).unwrap();
        assert_eq!(back, f);
        let k = KernelSpec::radial(Profile::power_cutoff(-3.0, 1.0, None));
        let back: KernelSpec = toml::from_str(&toml::to_string(&k).unwrap()).unwrap();
        assert_eq!(back, k);
    }
}
