//! Mixed radial-angular norms and the Morrey, CMO, Herz and weak spaces
//! built from them.
//!
//! All norms are evaluated by nested quadrature of the function at its polar
//! nodes. Suprema over `r > 0` are sampled on a log grid and refined by
//! golden-section search around the best sample.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Growth, PolarFunction};
use crate::geometry::{nu, omega, DyadicAnnuli, Quadrature, Tails};
use crate::operators::Sphere;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Order {
    /// `(∫ ‖f(r·)‖_{L^p̃(S)}^p r^{n-1} w(r) dr)^{1/p}`.
    RadOuter,
    /// `(∫_S (∫ |f(rθ)|^p r^{n-1} w(r) dr)^{p̃/p} dσ)^{1/p̃}`.
    AngOuter,
}

/// `L^p_rad L^p̃_ang(ℝⁿ, r^γ)` (or the exchanged order).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mixed {
    pub p: f64,
    pub p_ang: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default = "rad_outer")]
    pub order: Order,
}

fn rad_outer() -> Order {
    Order::RadOuter
}

impl Mixed {
    pub fn new(p: f64, p_ang: f64) -> Self {
        Mixed {
            p,
            p_ang,
            gamma: 0.0,
            order: Order::RadOuter,
        }
    }

    pub fn weighted(p: f64, p_ang: f64, gamma: f64) -> Self {
        Mixed {
            gamma,
            ..Mixed::new(p, p_ang)
        }
    }

    pub fn ang_outer(self) -> Self {
        Mixed {
            order: Order::AngOuter,
            ..self
        }
    }

    fn validate(&self) -> Result<()> {
        check_exponent("p", self.p)?;
        check_exponent("p̃", self.p_ang)?;
        if !self.gamma.is_finite() {
            return Err(Error::InvalidInput("weight exponent must be finite".into()));
        }
        Ok(())
    }
}

fn check_exponent(name: &str, v: f64) -> Result<()> {
    if !(v >= 1.0 && v.is_finite()) {
        return Err(Error::InvalidInput(format!("{name} must satisfy 1 <= {name} < inf, got {v}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "kebab-case")]
pub enum Space {
    MixedRadAng(Mixed),
    CentralMorrey { p: f64, p_ang: f64 },
    /// Normalization `1/(ν_n r^{n+nλp})`.
    CentralMorreyLambda { p: f64, p_ang: f64, lambda: f64 },
    GeneralizedMorrey { p: f64, p_ang: f64, phi: Growth },
    Cmo { p: f64, p_ang: f64 },
    Herz { alpha: f64, q: f64, p: f64, p_ang: f64 },
    MorreyHerz { alpha: f64, q: f64, lambda: f64, p: f64, p_ang: f64 },
    WeakMixed { p: f64, q: f64, gamma: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub space: Space,
    pub dim: usize,
    /// Radii sampled for the suprema over `r > 0`.
    #[serde(default = "default_sup_radii")]
    pub sup_radii: Vec<f64>,
}

/// 71 log-spaced radii on `[1e-4, 1e3]`.
pub fn default_sup_radii() -> Vec<f64> {
    log_spaced(1e-4, 1e3, 71)
}

fn log_spaced(a: f64, b: f64, count: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..count)
        .map(|i| (la + (lb - la) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

impl NormSpec {
    pub fn new(space: Space, dim: usize) -> Self {
        NormSpec {
            space,
            dim,
            sup_radii: default_sup_radii(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidInput("norm dimension must be >= 1".into()));
        }
        if self.sup_radii.is_empty() || self.sup_radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(Error::InvalidInput("sup sampling needs positive finite radii".into()));
        }
        match &self.space {
            Space::MixedRadAng(m) => m.validate(),
            Space::CentralMorrey { p, p_ang } | Space::Cmo { p, p_ang } => {
                check_exponent("p", *p)?;
                check_exponent("p̃", *p_ang)
            }
            Space::CentralMorreyLambda { p, p_ang, lambda } => {
                check_exponent("p", *p)?;
                check_exponent("p̃", *p_ang)?;
                if !lambda.is_finite() {
                    return Err(Error::InvalidInput("λ must be finite".into()));
                }
                Ok(())
            }
            Space::GeneralizedMorrey { p, p_ang, .. } => {
                check_exponent("p", *p)?;
                check_exponent("p̃", *p_ang)
            }
            Space::Herz { alpha, q, p, p_ang } => {
                check_exponent("p", *p)?;
                check_exponent("p̃", *p_ang)?;
                check_positive("q", *q)?;
                check_finite("α", *alpha)
            }
            Space::MorreyHerz {
                alpha,
                q,
                lambda,
                p,
                p_ang,
            } => {
                check_exponent("p", *p)?;
                check_exponent("p̃", *p_ang)?;
                check_positive("q", *q)?;
                check_finite("α", *alpha)?;
                if !(*lambda >= 0.0 && lambda.is_finite()) {
                    return Err(Error::InvalidInput(format!("Morrey-Herz needs λ >= 0, got {lambda}")));
                }
                Ok(())
            }
            Space::WeakMixed { p, q, gamma } => {
                check_exponent("p", *p)?;
                check_exponent("q", *q)?;
                if !(self.dim as f64 + gamma > 0.0) {
                    return Err(Error::InvalidInput(format!("weak norm needs n + γ > 0, got γ = {gamma}")));
                }
                Ok(())
            }
        }
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidInput(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::InvalidInput(format!("{name} must be finite")));
    }
    Ok(())
}

/// A norm value; `at` is the maximizing radius (or shell edge, or level)
/// for supremum-type norms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub value: f64,
    pub at: Option<f64>,
}

impl NormValue {
    fn plain(value: f64) -> Self {
        NormValue { value, at: None }
    }
}

/// Evaluate any supported norm.
pub fn norm(f: &dyn PolarFunction, spec: &NormSpec, q: &Quadrature) -> Result<NormValue> {
    spec.validate()?;
    if f.dim() != spec.dim {
        return Err(Error::DimensionMismatch {
            expected: spec.dim,
            got: f.dim(),
        });
    }
    let radii = &spec.sup_radii;
    match &spec.space {
        Space::MixedRadAng(m) => mixed_norm(f, m, q).map(NormValue::plain),
        Space::CentralMorrey { p, p_ang } => central_morrey_norm(f, *p, *p_ang, &Scale::Plain, radii, q),
        Space::CentralMorreyLambda { p, p_ang, lambda } => {
            central_morrey_norm(f, *p, *p_ang, &Scale::Lambda(*lambda), radii, q)
        }
        Space::GeneralizedMorrey { p, p_ang, phi } => {
            central_morrey_norm(f, *p, *p_ang, &Scale::Growth(phi.clone()), radii, q)
        }
        Space::Cmo { p, p_ang } => cmo_norm(f, *p, *p_ang, radii, q),
        Space::Herz { alpha, q: qq, p, p_ang } => herz_norm(f, *alpha, *qq, *p, *p_ang, None, q),
        Space::MorreyHerz {
            alpha,
            q: qq,
            lambda,
            p,
            p_ang,
        } => herz_norm(f, *alpha, *qq, *p, *p_ang, Some(*lambda), q),
        Space::WeakMixed { p, q: qa, gamma } => weak_mixed_norm(f, *p, *qa, *gamma, q),
    }
}

/// `(∫_S |f(ρθ) − c|^p̃ dσ)^{1/p̃}` evaluator for one function.
struct Angular<'q> {
    sphere: Sphere<'q>,
    p_ang: f64,
}

impl<'q> Angular<'q> {
    fn new(f: &dyn PolarFunction, p_ang: f64, q: &'q Quadrature) -> Result<Self> {
        Ok(Angular {
            sphere: Sphere::for_functions(q, f.dim(), f.is_radial(), f.angular_breaks())?,
            p_ang,
        })
    }

    fn norm(&self, f: &dyn PolarFunction, rho: f64, shift: f64) -> Result<f64> {
        let pa = self.p_ang;
        let s = self.sphere.integrate(|v| Ok((f.eval(rho, v)? - shift).abs().powf(pa)))?;
        Ok(s.powf(1.0 / pa))
    }
}

/// Radial integration range for `f`: its support clipped to the window,
/// with tails where the support runs past the window.
fn radial_range(f: &dyn PolarFunction, q: &Quadrature) -> (f64, f64, Tails) {
    let (lo, hi) = f.support();
    let (a, lower) = if lo > 0.0 { (lo, false) } else { (q.window.r_min, true) };
    let (b, upper) = if hi.is_finite() { (hi, false) } else { (q.window.r_max, true) };
    (a, b, Tails { lower, upper })
}

fn checked(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(what.into()))
    }
}

/// Weighted mixed radial-angular norm.
pub fn mixed_norm(f: &dyn PolarFunction, m: &Mixed, q: &Quadrature) -> Result<f64> {
    m.validate()?;
    let n = f.dim() as f64;
    let (a, b, tails) = radial_range(f, q);
    if !(b > a) {
        return Ok(0.0);
    }
    let breaks = f.radial_breaks();
    let w_exp = n - 1.0 + m.gamma;
    if m.order == Order::AngOuter && !f.is_radial() {
        let sphere = Sphere::for_functions(q, f.dim(), false, f.angular_breaks())?;
        let total = sphere.integrate(|v| {
            let inner = q.integrate_radial_fn(
                |r| Ok(f.eval(r, v)?.abs().powf(m.p) * r.powf(w_exp)),
                a,
                b,
                &breaks,
                tails,
            )?;
            Ok(inner.max(0.0).powf(m.p_ang / m.p))
        })?;
        return checked(total.powf(1.0 / m.p_ang), "mixed norm");
    }
    let ang = Angular::new(f, m.p_ang, q)?;
    let total = q.integrate_radial_fn(
        |r| Ok(ang.norm(f, r, 0.0)?.powf(m.p) * r.powf(w_exp)),
        a,
        b,
        &breaks,
        tails,
    )?;
    checked(total.max(0.0).powf(1.0 / m.p), "mixed norm")
}

/// Normalization of the truncated norm in the central Morrey family.
#[derive(Clone, Debug, PartialEq)]
pub enum Scale {
    /// `(1/(ν_n rⁿ) ∫_0^r …)^{1/p}`.
    Plain,
    /// `(1/(ν_n r^{n+nλp}) ∫_0^r …)^{1/p}`.
    Lambda(f64),
    /// `φ(r)^{-1} (1/(ν_n rⁿ) ∫_0^r …)^{1/p}`.
    Growth(Growth),
}

impl Scale {
    fn apply(&self, n: usize, p: f64, r: f64, integral: f64) -> f64 {
        let nf = n as f64;
        match self {
            Scale::Plain => (integral / (nu(n) * r.powf(nf))).powf(1.0 / p),
            Scale::Lambda(lambda) => (integral / (nu(n) * r.powf(nf + nf * lambda * p))).powf(1.0 / p),
            Scale::Growth(phi) => (integral / (nu(n) * r.powf(nf))).powf(1.0 / p) / phi.value(r),
        }
    }
}

/// `∫_0^r g` for many `r`, from prefix sums over a fixed panel grid.
struct Cumulative<'a> {
    g: Box<dyn Fn(f64) -> Result<f64> + 'a>,
    edges: Vec<f64>,
    prefix: Vec<f64>,
    rule: &'a crate::geometry::GaussRule,
}

impl<'a> Cumulative<'a> {
    fn new(
        g: Box<dyn Fn(f64) -> Result<f64> + 'a>,
        a: f64,
        b: f64,
        breaks: &[f64],
        q: &'a Quadrature,
    ) -> Result<Self> {
        let grid = q.log_grid(a, b, breaks)?;
        let mut prefix = Vec::with_capacity(grid.edges.len());
        let scale_probe: Vec<f64> = grid.nodes.iter().map(|r| g(*r)).collect::<Result<_>>()?;
        let mut acc = 0.0;
        let mut panel_sums = Vec::with_capacity(grid.panels());
        for p in 0..grid.panels() {
            let (s, e) = (grid.panel_start[p], grid.panel_start[p + 1]);
            let sum: f64 = (s..e).map(|i| grid.weights[i] * scale_probe[i]).sum();
            panel_sums.push(sum);
            acc += sum;
        }
        let tail = crate::geometry::lower_tail(&g, a, acc.abs())?;
        let mut run = tail;
        prefix.push(run);
        for s in panel_sums {
            run += s;
            prefix.push(run);
        }
        Ok(Cumulative {
            g,
            edges: grid.edges,
            prefix,
            rule: &q.rule,
        })
    }

    fn up_to(&self, r: f64) -> Result<f64> {
        let last = *self.edges.last().expect("grid has edges");
        if r >= last {
            return Ok(*self.prefix.last().expect("grid has edges"));
        }
        if r <= self.edges[0] {
            // Power-law tail below the grid.
            return crate::geometry::lower_tail(&self.g, r, 0.0);
        }
        let i = self.edges.partition_point(|e| *e <= r) - 1;
        let base = self.prefix[i];
        if r == self.edges[i] {
            return Ok(base);
        }
        let (la, lb) = (self.edges[i].ln(), r.ln());
        let mut part = 0.0;
        for (u, w) in self.rule.mapped(la, lb) {
            let x = u.exp();
            part += w * x * (self.g)(x)?;
        }
        Ok(base + part)
    }
}

const GOLDEN_ITERS: usize = 60;

/// Maximize `h` over the log-spaced samples, then refine by golden-section
/// search in `ln r` on the bracket around the best sample.
pub(crate) fn sup_refined<H: Fn(f64) -> Result<f64>>(h: H, radii: &[f64]) -> Result<NormValue> {
    let mut sorted = radii.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let values: Vec<f64> = sorted.iter().map(|r| h(*r)).collect::<Result<_>>()?;
    let (best, &vbest) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty sampling");
    if !vbest.is_finite() {
        return Err(Error::DivergentNorm("supremum is not finite".into()));
    }
    if vbest == 0.0 || sorted.len() < 3 {
        return Ok(NormValue {
            value: vbest,
            at: Some(sorted[best]),
        });
    }
    let last = sorted.len() - 1;
    // A maximum pinned to the sampled edge that is still growing means the
    // sup lies outside the window.
    if best == last || best == 0 {
        let nb = if best == 0 { 1 } else { last - 1 };
        let growth = (vbest / values[nb]).ln() / (sorted[best] / sorted[nb]).ln().abs();
        if growth > 1e-3 {
            return Err(Error::DivergentNorm(format!(
                "supremum keeps growing at the sampling edge r = {:e}",
                sorted[best]
            )));
        }
        return Ok(NormValue {
            value: vbest,
            at: Some(sorted[best]),
        });
    }
    let (mut a, mut b) = (sorted[best - 1].ln(), sorted[best + 1].ln());
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = h(c.exp())?;
    let mut fd = h(d.exp())?;
    for _ in 0..GOLDEN_ITERS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = h(c.exp())?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = h(d.exp())?;
        }
    }
    let (v, at) = [(vbest, sorted[best]), (fc, c.exp()), (fd, d.exp())]
        .into_iter()
        .max_by(|x, y| x.0.total_cmp(&y.0))
        .expect("three candidates");
    Ok(NormValue { value: v, at: Some(at) })
}

fn cumulative_range(f: &dyn PolarFunction, radii: &[f64], q: &Quadrature) -> (f64, f64) {
    let r_lo = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let r_hi = radii.iter().copied().fold(0.0, f64::max);
    let (_, hi) = f.support();
    let a = q.window.r_min.min(r_lo * 1e-2);
    let b = if hi.is_finite() { hi.min(r_hi).max(a * 2.0) } else { r_hi };
    (a, b)
}

/// Central Morrey norm in its plain, `λ` and generalized `φ` forms.
pub fn central_morrey_norm(
    f: &dyn PolarFunction,
    p: f64,
    p_ang: f64,
    scale: &Scale,
    radii: &[f64],
    q: &Quadrature,
) -> Result<NormValue> {
    check_exponent("p", p)?;
    check_exponent("p̃", p_ang)?;
    if radii.is_empty() {
        return Err(Error::InvalidInput("sup sampling is empty".into()));
    }
    let n = f.dim();
    let ang = Angular::new(f, p_ang, q)?;
    let w = n as f64 - 1.0;
    let (a, b) = cumulative_range(f, radii, q);
    let mut breaks = f.radial_breaks();
    breaks.extend(radii.iter().copied());
    let cum = Cumulative::new(
        Box::new(|r| Ok(ang.norm(f, r, 0.0)?.powf(p) * r.powf(w))),
        a,
        b,
        &breaks,
        q,
    )?;
    sup_refined(|r| Ok(scale.apply(n, p, r, cum.up_to(r)?.max(0.0))), radii)
}

/// CMO norm with `b_B` the solid-ball average of `b` over `B(0, r)`.
pub fn cmo_norm(b: &dyn PolarFunction, p: f64, p_ang: f64, radii: &[f64], q: &Quadrature) -> Result<NormValue> {
    check_exponent("p", p)?;
    check_exponent("p̃", p_ang)?;
    if radii.is_empty() {
        return Err(Error::InvalidInput("sup sampling is empty".into()));
    }
    let n = b.dim();
    let nf = n as f64;
    let w = nf - 1.0;
    let sphere = Sphere::for_functions(q, n, b.is_radial(), b.angular_breaks())?;
    let ang = Angular::new(b, p_ang, q)?;
    let breaks = b.radial_breaks();
    let (lo, _) = b.support();
    let h = |r: f64| -> Result<f64> {
        // The symbol need not vanish anywhere, so integrate from deep below r.
        let a = if lo > 0.0 { lo.min(r) } else { r * 1e-8 };
        let tails = Tails {
            lower: lo <= 0.0,
            upper: false,
        };
        let mass = q.integrate_radial_fn(|rho| Ok(sphere.integrate(|v| b.eval(rho, v))? * rho.powf(w)), a, r, &breaks, tails)?;
        let avg = mass / (nu(n) * r.powf(nf));
        let osc = q.integrate_radial_fn(|rho| Ok(ang.norm(b, rho, avg)?.powf(p) * rho.powf(w)), a, r, &breaks, tails)?;
        let v = (osc.max(0.0) / (nu(n) * r.powf(nf))).powf(1.0 / p);
        // Oscillation at rounding level: b is constant on the ball.
        if v <= 1e-10 * avg.abs() {
            return Ok(0.0);
        }
        Ok(v)
    };
    sup_refined(h, radii)
}

/// Shell norm `‖f χ_k‖` for `E_k = (2^{k-1}, 2^k]`.
fn shell_norm(f: &dyn PolarFunction, ang: &Angular, p: f64, k: i32, breaks: &[f64], q: &Quadrature) -> Result<f64> {
    let (a, b) = DyadicAnnuli::shell(k);
    let w = f.dim() as f64 - 1.0;
    let mut total = 0.0;
    let mut edges: Vec<f64> = (0..=q.shell_panels)
        .map(|i| a * 2f64.powf(i as f64 / q.shell_panels as f64))
        .collect();
    edges[q.shell_panels] = b;
    edges.extend(breaks.iter().copied().filter(|x| *x > a && *x < b));
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    for e in edges.windows(2) {
        for (u, wt) in q.rule.mapped(e[0].ln(), e[1].ln()) {
            let r = u.exp();
            let v = ang.norm(f, r, 0.0)?;
            if v != 0.0 {
                total += wt * r * v.powf(p) * r.powf(w);
            }
        }
    }
    Ok(total.max(0.0).powf(1.0 / p))
}

/// Relative size below which the extrapolated remainder of a shell sum is ignored.
const SHELL_NEGLIGIBLE: f64 = 1e-12;

/// Homogeneous Herz norm; with `lambda` set, the Morrey-Herz norm
/// `sup_{k₀} 2^{-k₀λ} (Σ_{k≤k₀} 2^{kαq} ‖fχ_k‖^q)^{1/q}`.
pub fn herz_norm(
    f: &dyn PolarFunction,
    alpha: f64,
    q_exp: f64,
    p: f64,
    p_ang: f64,
    lambda: Option<f64>,
    q: &Quadrature,
) -> Result<NormValue> {
    check_exponent("p", p)?;
    check_exponent("p̃", p_ang)?;
    check_positive("q", q_exp)?;
    let ang = Angular::new(f, p_ang, q)?;
    let breaks = f.radial_breaks();
    let (lo, hi) = f.support();
    let k_lo_window = DyadicAnnuli::shell_index(q.window.r_min);
    let k_hi_window = DyadicAnnuli::shell_index(q.window.r_max);
    let k_min = if lo > 0.0 { DyadicAnnuli::shell_index(lo).max(k_lo_window) } else { k_lo_window };
    let k_max = if hi.is_finite() { DyadicAnnuli::shell_index(hi).min(k_hi_window) } else { k_hi_window };
    if k_min > k_max {
        return Ok(NormValue::plain(0.0));
    }
    let annuli = DyadicAnnuli::new(k_min, k_max, q.shell_panels)?;
    let terms: Vec<f64> = annuli
        .shells()
        .map(|k| Ok(2f64.powf(k as f64 * alpha * q_exp) * shell_norm(f, &ang, p, k, &breaks, q)?.powf(q_exp)))
        .collect::<Result<_>>()?;
    let total: f64 = terms.iter().sum();
    if total == 0.0 {
        return Ok(NormValue::plain(0.0));
    }
    // Geometric remainders beyond the dyadic window.
    let remainder = |edge: f64, inner: f64, open: bool| -> Result<f64> {
        if !open || edge <= SHELL_NEGLIGIBLE * total {
            return Ok(0.0);
        }
        let ratio = edge / inner;
        if !(ratio < 1.0) || inner == 0.0 {
            return Err(Error::WindowInsufficient(format!(
                "shell terms do not decay past the dyadic window (ratio {ratio:.4})"
            )));
        }
        Ok(edge * ratio / (1.0 - ratio))
    };
    let len = terms.len();
    let below = if len >= 2 {
        remainder(terms[0], terms[1], lo <= 0.0 || k_min == k_lo_window && lo < q.window.r_min)?
    } else {
        0.0
    };
    let above = if len >= 2 {
        remainder(terms[len - 1], terms[len - 2], !hi.is_finite() || k_max == k_hi_window && hi > q.window.r_max)?
    } else {
        0.0
    };
    match lambda {
        None => Ok(NormValue::plain(checked((total + below + above).powf(1.0 / q_exp), "Herz norm")?)),
        Some(lam) => {
            let mut best = (0.0f64, k_min);
            let mut partial = below;
            for (i, t) in terms.iter().enumerate() {
                partial += t;
                let k0 = k_min + i as i32;
                let v = 2f64.powf(-(k0 as f64) * lam) * partial.powf(1.0 / q_exp);
                if v > best.0 {
                    best = (v, k0);
                }
            }
            // Past the support the partial sum is constant and 2^{-k₀λ} only shrinks;
            // below the window the trend must not increase toward k₀ → −∞.
            if best.1 == k_min && below > 0.0 && len >= 2 {
                let v0 = 2f64.powf(-(k_min as f64) * lam) * (below + terms[0]).powf(1.0 / q_exp);
                let v1 = 2f64.powf(-((k_min + 1) as f64) * lam) * (below + terms[0] + terms[1]).powf(1.0 / q_exp);
                if v0 > v1 * (1.0 + 1e-9) {
                    return Err(Error::DivergentNorm("Morrey-Herz supremum is attained as k₀ → −∞".into()));
                }
            }
            if lam == 0.0 {
                best.0 = best.0.max((total + below + above).powf(1.0 / q_exp));
            }
            Ok(NormValue {
                value: checked(best.0, "Morrey-Herz norm")?,
                at: Some(2f64.powi(best.1)),
            })
        }
    }
}

const WEAK_LEVELS: usize = 64;
const BISECT_ITERS: usize = 60;

/// `sup_λ λ ‖χ_{|g|>λ}‖_{L^p_rad L^q_ang(r^γ)}` for radial `g`.
pub fn weak_mixed_norm(g: &dyn PolarFunction, p: f64, q_ang: f64, gamma: f64, q: &Quadrature) -> Result<NormValue> {
    check_exponent("p", p)?;
    check_exponent("q", q_ang)?;
    if !g.is_radial() {
        return Err(Error::Unsupported("the weak mixed norm is evaluated for radial functions only".into()));
    }
    let n = g.dim();
    let e = n as f64 + gamma;
    if !(e > 0.0) {
        return Err(Error::InvalidInput(format!("weak norm needs n + γ > 0, got {e}")));
    }
    let e1 = crate::geometry::unit_e1(n);
    let val = |r: f64| -> Result<f64> { Ok(g.eval(r, &e1)?.abs()) };
    let (a, b, tails) = radial_range(g, q);
    if !(b > a) {
        return Ok(NormValue::plain(0.0));
    }
    let grid = q.log_grid(a, b, &g.radial_breaks())?;
    let mut pts: Vec<f64> = Vec::with_capacity(grid.edges.len() + grid.nodes.len());
    pts.extend(grid.edges.iter().copied());
    pts.extend(grid.nodes.iter().copied());
    for br in g.radial_breaks() {
        if br > a && br < b {
            pts.push(br * (1.0 - 1e-12));
            pts.push(br * (1.0 + 1e-12));
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let samples: Vec<f64> = pts.iter().map(|r| val(*r)).collect::<Result<_>>()?;
    let gmax = samples.iter().copied().fold(0.0, f64::max);
    if gmax == 0.0 {
        return Ok(NormValue::plain(0.0));
    }
    let measure = |level: f64| -> Result<f64> {
        // ∫_{|g|>level} r^{n+γ-1} dr, with crossings refined by bisection.
        let above: Vec<bool> = samples.iter().map(|s| *s > level).collect();
        let mut total = 0.0;
        let mut start = if above[0] {
            if tails.lower {
                Some(0.0)
            } else {
                Some(pts[0])
            }
        } else {
            None
        };
        for i in 1..pts.len() {
            if above[i] != above[i - 1] {
                let (mut lo, mut hi) = (pts[i - 1], pts[i]);
                for _ in 0..BISECT_ITERS {
                    let mid = 0.5 * (lo + hi);
                    if (val(mid)? > level) == above[i - 1] {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let x = 0.5 * (lo + hi);
                if above[i] {
                    start = Some(x);
                } else if let Some(s) = start.take() {
                    total += (x.powf(e) - s.powf(e)) / e;
                }
            }
        }
        if let Some(s) = start {
            if tails.upper {
                return Err(Error::DivergentNorm("level set is unbounded".into()));
            }
            total += (pts[pts.len() - 1].powf(e) - s.powf(e)) / e;
        }
        Ok(total)
    };
    let w = omega(n).powf(1.0 / q_ang);
    let h = |level: f64| -> Result<f64> { Ok(level * w * measure(level)?.powf(1.0 / p)) };
    let levels = log_spaced(1e-6 * gmax, 1.1 * gmax, WEAK_LEVELS);
    let mut out = sup_refined(h, &levels)?;
    out.value = checked(out.value, "weak norm")?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{AngularPart, FieldSpec, RadialPart};
    use std::f64::consts::PI;

    fn q() -> Quadrature {
        Quadrature::default()
    }

    #[test]
    fn mixed_norm_closed_forms() {
        let q = q();
        let v = mixed_norm(&FieldSpec::gaussian(2), &Mixed::new(2.0, 2.0), &q).unwrap();
        assert!((v - (PI / 2.0).sqrt()).abs() < 1e-12, "{v}");
        let v = mixed_norm(&FieldSpec::ball(2, 1.0), &Mixed::new(3.0, 5.0), &q).unwrap();
        let exact = ((2.0 * PI).powf(3.0 / 5.0) / 2.0).powf(1.0 / 3.0);
        assert!((v - exact).abs() < 1e-12 && (v - 1.1463).abs() < 1e-4, "{v}");
        assert_eq!(mixed_norm(&FieldSpec::zero(2), &Mixed::new(2.0, 2.0), &q).unwrap(), 0.0);
        assert!(mixed_norm(&FieldSpec::gaussian(2), &Mixed::new(0.5, 2.0), &q).is_err());
    }

    #[test]
    fn weighted_and_divergent() {
        let q = q();
        // ∫ e^{-2r²} r^{1+γ} dr with γ = 1: 2π · Γ(3/2)/(2·2^{3/2}).
        let v = mixed_norm(&FieldSpec::gaussian(2), &Mixed::weighted(2.0, 2.0, 1.0), &q).unwrap();
        let exact = (2.0 * PI * (PI.sqrt() / 2.0) / (2.0 * 2f64.powf(1.5))).sqrt();
        assert!((v - exact).abs() < 1e-11, "{v} vs {exact}");
        let err = mixed_norm(&FieldSpec::gaussian(2), &Mixed::weighted(2.0, 2.0, -2.5), &q).unwrap_err();
        assert!(err.is_divergence(), "{err}");
    }

    #[test]
    fn orders_differ_for_non_separable_field() {
        let q = q();
        let a = FieldSpec::separable(2, RadialPart::PowerGaussian { a: 0.0, b: 1.0, c: 2.0 }, AngularPart::Harmonic { k: 1, offset: 1.5 }, 1.0);
        let b = FieldSpec::separable(2, RadialPart::Annulus { inner: 1.0, outer: 2.0 }, AngularPart::Harmonic { k: 2, offset: 1.2 }, 1.0);
        let f = a.plus(&b);
        let m = Mixed::new(1.5, 3.0);
        let r = mixed_norm(&f, &m, &q).unwrap();
        let s = mixed_norm(&f, &m.ang_outer(), &q).unwrap();
        assert!((r - s).abs() > 1e-3, "{r} {s}");
        // Radial functions: both orders agree.
        let g = FieldSpec::gaussian(2);
        let r = mixed_norm(&g, &m, &q).unwrap();
        let s = mixed_norm(&g, &m.ang_outer(), &q).unwrap();
        assert!((r - s).abs() < 1e-14 * r);
    }

    #[test]
    fn central_morrey_constant_and_lambda() {
        let q = q();
        let c = FieldSpec::constant(2, 1.0);
        // Constant is only clipped-log-constant: value 1 everywhere.
        let v = central_morrey_norm(&c, 2.0, 2.0, &Scale::Plain, &default_sup_radii(), &q).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12, "{v:?}");
        let f = FieldSpec::gaussian(2);
        let lam = -0.2;
        let a = central_morrey_norm(&f, 2.0, 1.5, &Scale::Lambda(lam), &default_sup_radii(), &q).unwrap();
        let b = central_morrey_norm(&f, 2.0, 1.5, &Scale::Growth(Growth::Power { delta: 2.0 * lam }), &default_sup_radii(), &q).unwrap();
        assert!((a.value - b.value).abs() < 1e-10 * a.value);
        let z = central_morrey_norm(&FieldSpec::zero(2), 2.0, 2.0, &Scale::Plain, &default_sup_radii(), &q).unwrap();
        assert_eq!(z.value, 0.0);
    }

    #[test]
    fn cmo_ball_indicator() {
        let q = q();
        let b = FieldSpec::ball(2, 1.0);
        let v = cmo_norm(&b, 2.0, 2.0, &default_sup_radii(), &q).unwrap();
        // One-dimensional oracle: h(r)² = (1 − 1/r²)²/r² + (r² − 1)/r⁶ on r > 1.
        let h = |r: f64| (((1.0 - 1.0 / (r * r)).powi(2) / (r * r)) + (r * r - 1.0) / r.powi(6)).sqrt();
        let best = (1..200000).map(|i| h(1.0 + i as f64 * 1e-5)).fold(0.0, f64::max);
        assert!((v.value - best).abs() < 1e-9, "{v:?} vs {best}");
        assert!((v.value - 0.5).abs() < 1e-9);
        assert!((v.at.unwrap() - 2f64.sqrt()).abs() < 1e-4);
        let c = cmo_norm(&FieldSpec::constant(2, 3.0), 2.0, 2.0, &default_sup_radii(), &q).unwrap();
        assert!(c.value < 1e-13, "{c:?}");
        let s = cmo_norm(&b.scaled(-2.0), 2.0, 2.0, &default_sup_radii(), &q).unwrap();
        assert!((s.value - 2.0 * v.value).abs() < 1e-12);
    }

    #[test]
    fn herz_anchors() {
        let q = q();
        let v = herz_norm(&FieldSpec::ball(2, 1.0), 0.0, 2.0, 2.0, 2.0, None, &q).unwrap();
        assert!((v.value - PI.sqrt()).abs() < 1e-10, "{v:?}");
        let shell = FieldSpec::radial(2, RadialPart::Annulus { inner: 0.5, outer: 1.0 });
        let v = herz_norm(&shell, 0.7, 1.5, 2.0, 2.0, None, &q).unwrap();
        assert!((v.value - (3.0 * PI).sqrt() / 2.0).abs() < 1e-12);
        let z = herz_norm(&FieldSpec::zero(2), 0.7, 1.5, 2.0, 2.0, None, &q).unwrap();
        assert_eq!(z.value, 0.0);
        // Gaussian collapse to L^p.
        let g = FieldSpec::gaussian(2);
        let h = herz_norm(&g, 0.0, 3.0, 3.0, 3.0, None, &q).unwrap().value;
        let l = mixed_norm(&g, &Mixed::new(3.0, 3.0), &q).unwrap();
        assert!((h - l).abs() < 1e-9 * l, "{h} {l}");
        let mh = herz_norm(&g, 0.0, 3.0, 3.0, 3.0, Some(0.0), &q).unwrap().value;
        assert!((mh - l).abs() < 1e-9 * l);
        // Divergent weight: α + n/p < 0.
        assert!(herz_norm(&g, -1.5, 2.0, 2.0, 2.0, None, &q).unwrap_err().is_divergence());
    }

    struct PowerLaw(f64);

    impl PolarFunction for PowerLaw {
        fn dim(&self) -> usize {
            2
        }
        fn eval(&self, r: f64, _dir: &[f64]) -> Result<f64> {
            Ok(r.powf(self.0))
        }
        fn is_radial(&self) -> bool {
            true
        }
    }

    #[test]
    fn weak_norm_power_law() {
        let q = q();
        let v = weak_mixed_norm(&PowerLaw(-1.0), 2.0, 2.0, 0.0, &q).unwrap();
        assert!((v.value - PI.sqrt()).abs() < 1e-9, "{v:?}");
        let z = weak_mixed_norm(&FieldSpec::zero(2), 2.0, 2.0, 0.0, &q).unwrap();
        assert_eq!(z.value, 0.0);
        // Ball indicator: sup over λ < 1 of λ (2π)^{1/2} (1/2)^{1/2}.
        let b = weak_mixed_norm(&FieldSpec::ball(2, 1.0), 2.0, 2.0, 0.0, &q).unwrap();
        assert!((b.value - PI.sqrt()).abs() < 1e-9, "{b:?}");
        let nr = FieldSpec::separable(2, RadialPart::Annulus { inner: 0.0, outer: 1.0 }, AngularPart::Harmonic { k: 1, offset: 2.0 }, 1.0);
        assert!(weak_mixed_norm(&nr, 2.0, 2.0, 0.0, &q).is_err());
    }

    #[test]
    fn homogeneity_and_dilation() {
        let q = q();
        let f = FieldSpec::separable(2, RadialPart::PowerGaussian { a: 0.5, b: 1.0, c: 2.0 }, AngularPart::Harmonic { k: 2, offset: 1.5 }, 1.0);
        let m = Mixed::new(2.5, 1.5);
        let base = mixed_norm(&f, &m, &q).unwrap();
        let scaled = mixed_norm(&f.scaled(-3.0), &m, &q).unwrap();
        assert!((scaled - 3.0 * base).abs() < 1e-12 * scaled);
        for lam in [0.25, 2.0, 7.0] {
            let d = mixed_norm(&f.dilate(lam), &m, &q).unwrap();
            let expect = lam.powf(-2.0 / 2.5) * base;
            assert!((d - expect).abs() < 1e-10 * expect, "λ = {lam}: {d} vs {expect}");
        }
    }
}
