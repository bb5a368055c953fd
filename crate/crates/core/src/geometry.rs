//! Quadrature grids for the radial half-line, the unit sphere and dyadic
//! annuli, together with the dimensional constants `ω_{n-1}` (surface area of
//! the unit sphere) and `ν_n` (volume of the unit ball).
//!
//! Every improper radial integral is truncated to a [`Window`]. Power-law
//! behaviour beyond the window edges is folded back in analytically by
//! [`Quadrature::integrate_radial_fn`], which is also where divergent tails are
//! detected.

use std::borrow::Cow;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped linearly onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    /// Integrate `f` over `[a, b]` with a single panel.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let (p, pm1) = if n == 0 { (1.0, 0.0) } else { (p1, p0) };
    let d = n as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, d)
}

/// `Γ(k/2)` for a positive integer `k`, by the half-integer recursion.
fn gamma_half_integer(k: u32) -> f64 {
    let mut value = if k % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut x = if k % 2 == 0 { 1.0 } else { 0.5 };
    while x < 0.5 * k as f64 - 1e-12 {
        value *= x;
        x += 1.0;
    }
    value
}

/// Surface area `ω_{n-1} = 2π^{n/2}/Γ(n/2)` of the unit sphere in `ℝⁿ`.
pub fn sphere_area(n: i64) -> Result<f64> {
    if n <= 0 {
        return Err(Error::InvalidInput(format!(
            "sphere_area needs n >= 1, got {n}"
        )));
    }
    Ok(2.0 * PI.powf(0.5 * n as f64) / gamma_half_integer(n as u32))
}

/// Volume `ν_n = π^{n/2}/Γ(n/2+1)` of the unit ball in `ℝⁿ`.
pub fn ball_volume(n: i64) -> Result<f64> {
    Ok(sphere_area(n)? / n as f64)
}

/// Infallible `ω_{n-1}` for dimensions already validated elsewhere.
pub(crate) fn omega(n: usize) -> f64 {
    sphere_area(n as i64).expect("dimension validated upstream")
}

pub(crate) fn nu(n: usize) -> f64 {
    ball_volume(n as i64).expect("dimension validated upstream")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadialScheme {
    /// Panel edges uniform in `ln r`; Gauss nodes placed in the `ln r` variable.
    LogUniformCompositeGauss,
    /// Panel edges uniform in `r`.
    UniformCompositeGauss,
}

/// Composite Gauss-Legendre grid on `[r_min, r_max]`.
#[derive(Clone, Debug)]
pub struct RadialGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub r_min: f64,
    pub r_max: f64,
    pub scheme: RadialScheme,
    /// Panel edges, including both ends; breakpoints are always edges.
    pub edges: Vec<f64>,
    /// Index of the first node of each panel; has `edges.len()` entries.
    pub panel_start: Vec<usize>,
}

impl RadialGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn panels(&self) -> usize {
        self.edges.len().saturating_sub(1)
    }

    /// Build a grid whose panel edges include every breakpoint in `(r_min, r_max)`.
    pub fn with_breaks(
        r_min: f64,
        r_max: f64,
        panels: usize,
        scheme: RadialScheme,
        breaks: &[f64],
        rule: &GaussRule,
    ) -> Result<Self> {
        if !(r_min > 0.0) || !r_min.is_finite() {
            return Err(Error::InvalidInput(format!(
                "radial grid needs r_min > 0, got {r_min}"
            )));
        }
        if !(r_max > r_min) || !r_max.is_finite() {
            return Err(Error::InvalidInput(format!(
                "radial grid needs r_min < r_max < inf, got [{r_min}, {r_max}]"
            )));
        }
        if panels == 0 {
            return Err(Error::InvalidInput("radial grid needs at least one panel".into()));
        }
        let mut edges: Vec<f64> = (0..=panels)
            .map(|i| {
                let s = i as f64 / panels as f64;
                match scheme {
                    RadialScheme::LogUniformCompositeGauss => {
                        (r_min.ln() + s * (r_max / r_min).ln()).exp()
                    }
                    RadialScheme::UniformCompositeGauss => r_min + s * (r_max - r_min),
                }
            })
            .collect();
        edges[0] = r_min;
        edges[panels] = r_max;
        edges.extend(breaks.iter().copied().filter(|b| *b > r_min && *b < r_max));
        edges.sort_by(f64::total_cmp);
        edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * b.abs());
        // Keep exact breakpoints when a uniform edge collides with one.
        for b in breaks {
            if let Some(e) = edges
                .iter_mut()
                .find(|e| (**e - *b).abs() <= 1e-13 * b.abs())
            {
                *e = *b;
            }
        }
        let mut nodes = Vec::with_capacity((edges.len() - 1) * rule.order());
        let mut weights = Vec::with_capacity(nodes.capacity());
        let mut panel_start = Vec::with_capacity(edges.len());
        for w in edges.windows(2) {
            panel_start.push(nodes.len());
            push_panel(&mut nodes, &mut weights, w[0], w[1], scheme, rule);
        }
        panel_start.push(nodes.len());
        Ok(RadialGrid {
            nodes,
            weights,
            r_min,
            r_max,
            scheme,
            edges,
            panel_start,
        })
    }
}

fn push_panel(
    nodes: &mut Vec<f64>,
    weights: &mut Vec<f64>,
    a: f64,
    b: f64,
    scheme: RadialScheme,
    rule: &GaussRule,
) {
    match scheme {
        RadialScheme::LogUniformCompositeGauss => {
            for (u, w) in rule.mapped(a.ln(), b.ln()) {
                let r = u.exp();
                nodes.push(r);
                weights.push(w * r);
            }
        }
        RadialScheme::UniformCompositeGauss => {
            for (r, w) in rule.mapped(a, b) {
                nodes.push(r);
                weights.push(w);
            }
        }
    }
}

/// Composite 12-point Gauss-Legendre grid on `[r_min, r_max]`.
pub fn make_radial_grid(
    r_min: f64,
    r_max: f64,
    panels: usize,
    scheme: RadialScheme,
) -> Result<RadialGrid> {
    RadialGrid::with_breaks(r_min, r_max, panels, scheme, &[], &GaussRule::new(12))
}

pub fn integrate_radial(grid: &RadialGrid, samples: &[f64]) -> Result<f64> {
    weighted_sum(&grid.weights, samples)
}

fn weighted_sum(weights: &[f64], samples: &[f64]) -> Result<f64> {
    if weights.len() != samples.len() {
        return Err(Error::LengthMismatch {
            nodes: weights.len(),
            samples: samples.len(),
        });
    }
    Ok(weights.iter().zip(samples).map(|(w, s)| w * s).sum())
}

/// Locations where an angular integrand may be discontinuous.
///
/// On the circle these are polar angles in `[0, 2π)`; on `S²` they are values
/// of the height `z = θ·e₃`.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum AngularBreaks {
    #[default]
    None,
    Circle(Vec<f64>),
    Height(Vec<f64>),
}

impl AngularBreaks {
    pub fn is_none(&self) -> bool {
        match self {
            AngularBreaks::None => true,
            AngularBreaks::Circle(v) | AngularBreaks::Height(v) => v.is_empty(),
        }
    }

    pub fn merge(self, other: AngularBreaks) -> AngularBreaks {
        use AngularBreaks::*;
        match (self, other) {
            (None, x) | (x, None) => x,
            (Circle(mut a), Circle(b)) => {
                a.extend(b);
                Circle(a)
            }
            (Height(mut a), Height(b)) => {
                a.extend(b);
                Height(a)
            }
            // Mixed kinds only arise from inconsistent dimensions.
            (a, _) => a,
        }
    }
}

/// Quadrature rule on `S^{n-1}` for `n ∈ {2, 3}`.
#[derive(Clone, Debug)]
pub struct AngularGrid {
    pub dim: usize,
    /// Flattened unit vectors, `dim` entries per node.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl AngularGrid {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.nodes
            .chunks_exact(self.dim)
            .zip(self.weights.iter().copied())
    }

    /// Grid whose panels are split at the given discontinuities.
    pub fn adapted(dim: usize, degree: usize, breaks: &AngularBreaks) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidInput("angular degree must be >= 1".into()));
        }
        match (dim, breaks) {
            (2, AngularBreaks::Circle(b)) if !b.is_empty() => Ok(circle_with_breaks(degree, b)),
            (3, AngularBreaks::Height(b)) if !b.is_empty() => Ok(sphere_product(degree, b)),
            _ => make_angular_grid(dim, degree),
        }
    }
}

/// Uniform circle grid (`degree + 1` nodes) for `n = 2`; product Gauss (height)
/// × uniform (azimuth) grid for `n = 3`.
pub fn make_angular_grid(n: usize, degree: usize) -> Result<AngularGrid> {
    if degree == 0 {
        return Err(Error::InvalidInput("angular degree must be >= 1".into()));
    }
    match n {
        2 => {
            let m = degree + 1;
            let w = 2.0 * PI / m as f64;
            let mut nodes = Vec::with_capacity(2 * m);
            for j in 0..m {
                let phi = 2.0 * PI * j as f64 / m as f64;
                nodes.push(phi.cos());
                nodes.push(phi.sin());
            }
            Ok(AngularGrid {
                dim: 2,
                nodes,
                weights: vec![w; m],
                degree,
            })
        }
        3 => Ok(sphere_product(degree, &[])),
        _ => Err(Error::Unsupported(format!(
            "angular quadrature is available for n in {{2, 3}}, got n = {n}"
        ))),
    }
}

fn circle_with_breaks(degree: usize, breaks: &[f64]) -> AngularGrid {
    let mut cuts: Vec<f64> = breaks.iter().map(|b| b.rem_euclid(2.0 * PI)).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let mut arcs = Vec::with_capacity(cuts.len());
    for i in 0..cuts.len() {
        let a = cuts[i];
        let b = if i + 1 < cuts.len() { cuts[i + 1] } else { cuts[0] + 2.0 * PI };
        if b - a > 1e-15 {
            arcs.push((a, b));
        }
    }
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for (a, b) in arcs {
        let k = ((degree + 1) as f64 * (b - a) / (2.0 * PI)).ceil() as usize + 8;
        let rule = GaussRule::new(k);
        for (phi, w) in rule.mapped(a, b) {
            nodes.push(phi.cos());
            nodes.push(phi.sin());
            weights.push(w);
        }
    }
    AngularGrid {
        dim: 2,
        nodes,
        weights,
        degree,
    }
}

fn sphere_product(degree: usize, height_breaks: &[f64]) -> AngularGrid {
    let mut cuts = vec![-1.0, 1.0];
    cuts.extend(height_breaks.iter().copied().filter(|z| z.abs() < 1.0));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let azimuth = degree + 1;
    let base = degree / 2 + 1;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let k = if cuts.len() == 2 {
            base
        } else {
            ((base as f64) * (b - a) / 2.0).ceil() as usize + 6
        };
        let rule = GaussRule::new(k);
        for (z, wz) in rule.mapped(a, b) {
            let s = (1.0 - z * z).max(0.0).sqrt();
            for j in 0..azimuth {
                let phi = 2.0 * PI * j as f64 / azimuth as f64;
                nodes.push(s * phi.cos());
                nodes.push(s * phi.sin());
                nodes.push(z);
                weights.push(wz * 2.0 * PI / azimuth as f64);
            }
        }
    }
    AngularGrid {
        dim: 3,
        nodes,
        weights,
        degree,
    }
}

pub fn integrate_sphere(grid: &AngularGrid, samples: &[f64]) -> Result<f64> {
    weighted_sum(&grid.weights, samples)
}

/// First coordinate vector of `ℝⁿ`.
pub fn unit_e1(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    if n > 0 {
        v[0] = 1.0;
    }
    v
}

/// Dyadic shells `E_k = {2^{k-1} < |x| ≤ 2^k}` for `k_min ≤ k ≤ k_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DyadicAnnuli {
    pub k_min: i32,
    pub k_max: i32,
    pub panels_per_shell: usize,
}

impl DyadicAnnuli {
    pub fn new(k_min: i32, k_max: i32, panels_per_shell: usize) -> Result<Self> {
        if k_min > k_max || panels_per_shell == 0 {
            return Err(Error::InvalidInput(format!(
                "bad dyadic window [{k_min}, {k_max}] with {panels_per_shell} panels per shell"
            )));
        }
        Ok(DyadicAnnuli {
            k_min,
            k_max,
            panels_per_shell,
        })
    }

    pub fn shell(k: i32) -> (f64, f64) {
        (2f64.powi(k - 1), 2f64.powi(k))
    }

    /// Index `k` of the shell containing radius `r > 0`.
    pub fn shell_index(r: f64) -> i32 {
        let mut k = r.log2().ceil() as i32;
        // Guard against rounding at exact powers of two.
        if 2f64.powi(k - 1) >= r {
            k -= 1;
        }
        if 2f64.powi(k) < r {
            k += 1;
        }
        k
    }

    pub fn shells(&self) -> impl Iterator<Item = i32> {
        self.k_min..=self.k_max
    }

    pub fn outer_radius(&self) -> f64 {
        2f64.powi(self.k_max)
    }

    pub fn inner_radius(&self) -> f64 {
        2f64.powi(self.k_min - 1)
    }
}

/// Truncation window for integrals over `(0, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub r_min: f64,
    pub r_max: f64,
}

impl Default for Window {
    fn default() -> Self {
        Window {
            r_min: 1e-6,
            r_max: 1e3,
        }
    }
}

/// Which ends of a radial integral continue beyond the sampled interval.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tails {
    pub lower: bool,
    pub upper: bool,
}

impl Tails {
    pub const NONE: Tails = Tails {
        lower: false,
        upper: false,
    };
    pub const BOTH: Tails = Tails {
        lower: true,
        upper: true,
    };
}

/// Shared quadrature context: truncation window, resolutions and the cached
/// Gauss rule and default sphere grids.
#[derive(Clone, Debug)]
pub struct Quadrature {
    pub window: Window,
    /// Panels across the full window; sub-intervals get a proportional share.
    pub radial_panels: usize,
    /// Nodes on the circle; the same degree is used on `S²`.
    pub angular_nodes: usize,
    /// Panels per dyadic shell in Herz-type norms.
    pub shell_panels: usize,
    pub rule: GaussRule,
    circle: AngularGrid,
    sphere: AngularGrid,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature::new(Window::default(), 64, 32).expect("default quadrature is valid")
    }
}

impl Quadrature {
    pub const GAUSS_ORDER: usize = 12;

    pub fn new(window: Window, radial_panels: usize, angular_nodes: usize) -> Result<Self> {
        if !(window.r_min > 0.0 && window.r_max > window.r_min) {
            return Err(Error::InvalidInput(format!(
                "invalid truncation window [{}, {}]",
                window.r_min, window.r_max
            )));
        }
        if radial_panels == 0 || angular_nodes < 2 {
            return Err(Error::InvalidInput(
                "resolutions must be positive (angular nodes >= 2)".into(),
            ));
        }
        let degree = angular_nodes - 1;
        Ok(Quadrature {
            window,
            radial_panels,
            angular_nodes,
            shell_panels: (radial_panels / 32).max(2),
            rule: GaussRule::new(Self::GAUSS_ORDER),
            circle: make_angular_grid(2, degree)?,
            sphere: make_angular_grid(3, degree)?,
        })
    }

    /// Same window, every resolution multiplied by `factor` (rounded, at least 1).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let mut q = Quadrature::new(
            self.window,
            ((self.radial_panels as f64 * factor).round() as usize).max(1),
            ((self.angular_nodes as f64 * factor).round() as usize).max(2),
        )?;
        q.shell_panels = ((self.shell_panels as f64 * factor).round() as usize).max(1);
        Ok(q)
    }

    pub fn angular_degree(&self) -> usize {
        self.angular_nodes - 1
    }

    fn panels_per_decade(&self) -> f64 {
        self.radial_panels as f64 / (self.window.r_max / self.window.r_min).log10()
    }

    /// Number of log panels allotted to `[a, b]`.
    pub fn panels_for(&self, a: f64, b: f64) -> usize {
        ((self.panels_per_decade() * (b / a).log10()).ceil() as usize).max(1)
    }

    pub fn log_grid(&self, a: f64, b: f64, breaks: &[f64]) -> Result<RadialGrid> {
        RadialGrid::with_breaks(
            a,
            b,
            self.panels_for(a, b),
            RadialScheme::LogUniformCompositeGauss,
            breaks,
            &self.rule,
        )
    }

    /// Sphere grid for `S^{n-1}`, adapted to the given discontinuities.
    pub fn sphere_grid(&self, n: usize, breaks: &AngularBreaks) -> Result<Cow<'_, AngularGrid>> {
        if breaks.is_none() {
            match n {
                2 => return Ok(Cow::Borrowed(&self.circle)),
                3 => return Ok(Cow::Borrowed(&self.sphere)),
                _ => {}
            }
        }
        AngularGrid::adapted(n, self.angular_degree(), breaks).map(Cow::Owned)
    }

    /// `∫_a^b g(r) dr` on a log grid snapped to `breaks`; open ends get a
    /// power-law tail estimate `∫_0^a` / `∫_b^∞`.
    pub fn integrate_radial_fn<G: Fn(f64) -> Result<f64>>(
        &self,
        g: G,
        a: f64,
        b: f64,
        breaks: &[f64],
        tails: Tails,
    ) -> Result<f64> {
        if !(b > a) {
            return Ok(0.0);
        }
        let grid = self.log_grid(a, b, breaks)?;
        let mut total = 0.0;
        for (r, w) in grid.nodes.iter().zip(&grid.weights) {
            let v = g(*r)?;
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("integrand at r = {r:e}")));
            }
            total += w * v;
        }
        let scale = total.abs();
        if tails.lower {
            total += lower_tail(&g, a, scale)?;
        }
        if tails.upper {
            total += upper_tail(&g, b, scale)?;
        }
        Ok(total)
    }
}

const TAIL_STEP: f64 = std::f64::consts::SQRT_2;

/// `∫_0^a g` assuming `g(r) ≈ c r^e e^{dr}` below `a`; `d` is fitted from
/// a third sample and dropped when the fit is not small.
pub(crate) fn lower_tail<G: Fn(f64) -> Result<f64>>(g: &G, a: f64, scale: f64) -> Result<f64> {
    let g0 = g(a)?;
    if g0 == 0.0 || (g0 * a).abs() <= 1e-300 {
        return Ok(0.0);
    }
    let g1 = g(a * TAIL_STEP)?;
    if g1 == 0.0 || g1.signum() != g0.signum() {
        return Ok(0.0);
    }
    let ls = TAIL_STEP.ln();
    let (d01, mut e) = ((g1 / g0).ln(), (g1 / g0).ln() / ls);
    let mut d = 0.0;
    let g2 = g(a * TAIL_STEP * TAIL_STEP)?;
    if g2 != 0.0 && g2.signum() == g0.signum() {
        let d12 = (g2 / g1).ln();
        let fit = (d12 - d01) / (a * (TAIL_STEP - 1.0).powi(2));
        if (fit * a).abs() < 1e-2 {
            d = fit;
            e = (d01 - d * a * (TAIL_STEP - 1.0)) / ls;
        }
    }
    if e <= -1.0 + 1e-9 {
        if (g0 * a).abs() <= 1e-15 * scale {
            return Ok(0.0);
        }
        return Err(Error::DivergentNorm(format!(
            "integrand ~ r^{e:.3} near r = {a:e} is not integrable at the origin"
        )));
    }
    Ok(g0 * (-d * a).exp() * a * (1.0 / (e + 1.0) + d * a / (e + 2.0)))
}

/// `∫_b^∞ g` assuming `g(r) ≈ c r^e` above `b`.
pub(crate) fn upper_tail<G: Fn(f64) -> Result<f64>>(g: &G, b: f64, scale: f64) -> Result<f64> {
    let g0 = g(b)?;
    if (g0 * b).abs() <= 1e-15 * scale.max(1e-300) {
        return Ok(0.0);
    }
    let gm = g(b / TAIL_STEP)?;
    if gm == 0.0 || gm.signum() != g0.signum() {
        return Ok(0.0);
    }
    let e = (g0 / gm).ln() / TAIL_STEP.ln();
    if e >= -1.0 - 1e-9 {
        return Err(Error::DivergentNorm(format!(
            "integrand ~ r^{e:.3} near r = {b:e} does not decay fast enough"
        )));
    }
    Ok(-g0 * b / (e + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn gauss_rule_integrates_polynomials_exactly() {
        let rule = GaussRule::new(12);
        let exact = |k: i32| (1.0 - (-1f64).powi(k + 1)) / (k as f64 + 1.0);
        for k in 0..24 {
            let v = rule.integrate(-1.0, 1.0, |x| x.powi(k));
            assert!((v - exact(k)).abs() < 1e-14, "degree {k}: {v}");
        }
        let rule = GaussRule::new(7);
        assert_eq!(rule.nodes[3], 0.0);
        assert!((rule.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_area_and_ball_volume() {
        assert!(close(sphere_area(2).unwrap(), 2.0 * PI, 1e-15));
        assert!(close(sphere_area(3).unwrap(), 4.0 * PI, 1e-15));
        assert!(close(ball_volume(2).unwrap(), PI, 1e-15));
        assert!(close(ball_volume(3).unwrap(), 4.0 * PI / 3.0, 1e-15));
        assert!(close(sphere_area(1).unwrap(), 2.0, 1e-15));
        for n in 1..12 {
            let (a, v) = (sphere_area(n).unwrap(), ball_volume(n).unwrap());
            assert!((a - n as f64 * v).abs() <= 4.0 * f64::EPSILON * a);
        }
        assert!(sphere_area(0).is_err());
        assert!(ball_volume(-3).is_err());
    }

    #[test]
    fn radial_grid_examples() {
        // Truncated Gamma integral: ∫_a^b r e^{-r} dr = (1+a)e^{-a} - (1+b)e^{-b}.
        let g = make_radial_grid(1e-4, 1e4, 64, RadialScheme::LogUniformCompositeGauss).unwrap();
        let s: Vec<f64> = g.nodes.iter().map(|r| (-r).exp() * r).collect();
        let v = integrate_radial(&g, &s).unwrap();
        let truncated = 1.0001 * (-1e-4f64).exp();
        assert!((v - truncated).abs() < 1e-10, "{v}");
        assert!((v - 1.0).abs() < 6e-9);

        let g = make_radial_grid(1.0, 2.0, 4, RadialScheme::LogUniformCompositeGauss).unwrap();
        let s: Vec<f64> = g.nodes.iter().map(|t| 1.0 / t).collect();
        assert!((integrate_radial(&g, &s).unwrap() - 2f64.ln()).abs() < 1e-12);

        let g = make_radial_grid(1e-6, 1e2, 96, RadialScheme::LogUniformCompositeGauss).unwrap();
        let s: Vec<f64> = g.nodes.iter().map(|r| r * (-2.0 * r * r).exp()).collect();
        assert!((integrate_radial(&g, &s).unwrap() - 0.25).abs() < 1e-10);
    }

    #[test]
    fn radial_grid_invariants() {
        for scheme in [
            RadialScheme::LogUniformCompositeGauss,
            RadialScheme::UniformCompositeGauss,
        ] {
            let g = make_radial_grid(0.5, 7.0, 8, scheme).unwrap();
            assert!(g.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(g.nodes.iter().all(|r| *r >= 0.5 && *r <= 7.0));
            let len: f64 = g.weights.iter().sum();
            assert!(((len - 6.5) / 6.5).abs() < 1e-12);
        }
        assert!(make_radial_grid(0.0, 1.0, 4, RadialScheme::LogUniformCompositeGauss).is_err());
        assert!(make_radial_grid(-1.0, 1.0, 4, RadialScheme::UniformCompositeGauss).is_err());
        assert!(make_radial_grid(1.0, 2.0, 0, RadialScheme::UniformCompositeGauss).is_err());
    }

    #[test]
    fn doubling_panels_reduces_error() {
        let exact = 1.001 * (-1e-3f64).exp() - (-50f64).exp() * 51.0;
        let mut last = f64::INFINITY;
        for panels in [2, 4, 8, 16] {
            let g = make_radial_grid(1e-3, 50.0, panels, RadialScheme::LogUniformCompositeGauss)
                .unwrap();
            let s: Vec<f64> = g.nodes.iter().map(|r| r * (-r).exp()).collect();
            let err = (integrate_radial(&g, &s).unwrap() - exact).abs();
            assert!(err < last || err < 1e-14, "panels {panels}: {err} vs {last}");
            last = err;
        }
    }

    #[test]
    fn breakpoints_become_edges() {
        let rule = GaussRule::new(12);
        let g = RadialGrid::with_breaks(
            0.1,
            10.0,
            3,
            RadialScheme::LogUniformCompositeGauss,
            &[1.5, 20.0, 0.05],
            &rule,
        )
        .unwrap();
        assert!(g.edges.contains(&1.5));
        assert_eq!(g.edges.len(), 5);
        // Indicator of (0, 1.5] integrates exactly once 1.5 is an edge.
        let s: Vec<f64> = g.nodes.iter().map(|r| if *r <= 1.5 { 1.0 } else { 0.0 }).collect();
        assert!((integrate_radial(&g, &s).unwrap() - 1.4).abs() < 1e-13);
    }

    #[test]
    fn angular_grid_examples() {
        let g = make_angular_grid(2, 15).unwrap();
        assert_eq!(g.len(), 16);
        let ones = vec![1.0; g.len()];
        assert!((integrate_sphere(&g, &ones).unwrap() - 2.0 * PI).abs() < 1e-14);
        let c2: Vec<f64> = g.iter().map(|(v, _)| v[0] * v[0]).collect();
        assert!((integrate_sphere(&g, &c2).unwrap() - PI).abs() < 1e-12);
        let zeros = vec![0.0; g.len()];
        assert_eq!(integrate_sphere(&g, &zeros).unwrap(), 0.0);

        let g = make_angular_grid(3, 8).unwrap();
        let z2: Vec<f64> = g.iter().map(|(v, _)| v[2] * v[2]).collect();
        assert!((integrate_sphere(&g, &z2).unwrap() - 4.0 * PI / 3.0).abs() < 1e-10);
        assert!(make_angular_grid(4, 8).is_err());
        assert!(make_angular_grid(2, 0).is_err());
        assert!(integrate_sphere(&g, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn angular_grid_invariants() {
        for (n, deg) in [(2, 7), (2, 31), (3, 4), (3, 16)] {
            let g = make_angular_grid(n, deg).unwrap();
            for (v, _) in g.iter() {
                let len: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!((len - 1.0).abs() < 1e-14);
            }
            let total: f64 = g.weights.iter().sum();
            let area = sphere_area(n as i64).unwrap();
            assert!(((total - area) / area).abs() < 1e-10);
        }
    }

    #[test]
    fn circle_grid_exact_for_trigonometric_polynomials() {
        let g = make_angular_grid(2, 9).unwrap();
        for k in 1..=9 {
            let s: Vec<f64> = g
                .iter()
                .map(|(v, _)| (k as f64 * v[1].atan2(v[0])).cos())
                .collect();
            assert!(integrate_sphere(&g, &s).unwrap().abs() < 1e-13, "k = {k}");
        }
    }

    #[test]
    fn sphere_grid_exact_for_low_degree_harmonics() {
        let g = make_angular_grid(3, 8).unwrap();
        // Monomials x^a y^b z^c with a+b+c <= 8; exact value from the Beta formula.
        let mono = |a: i32, b: i32, c: i32| -> f64 {
            if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
                return 0.0;
            }
            let g = |x: f64| statrs::function::gamma::gamma(x);
            let (ha, hb, hc) = ((a + 1) as f64 / 2.0, (b + 1) as f64 / 2.0, (c + 1) as f64 / 2.0);
            2.0 * g(ha) * g(hb) * g(hc) / g(ha + hb + hc)
        };
        for a in 0..=8 {
            for b in 0..=(8 - a) {
                for c in 0..=(8 - a - b) {
                    let s: Vec<f64> = g
                        .iter()
                        .map(|(v, _)| v[0].powi(a) * v[1].powi(b) * v[2].powi(c))
                        .collect();
                    let got = integrate_sphere(&g, &s).unwrap();
                    assert!((got - mono(a, b, c)).abs() < 1e-12, "{a} {b} {c}: {got}");
                }
            }
        }
    }

    #[test]
    fn adapted_grids_integrate_caps_exactly() {
        // Upper half circle {θ₂ ≥ 0} has length π.
        let breaks = AngularBreaks::Circle(vec![0.0, PI]);
        let g = AngularGrid::adapted(2, 15, &breaks).unwrap();
        let s: Vec<f64> = g.iter().map(|(v, _)| if v[1] >= 0.0 { 1.0 } else { 0.0 }).collect();
        // Nodes sit strictly inside arcs, so the indicator is exact.
        assert!((integrate_sphere(&g, &s).unwrap() - PI).abs() < 1e-13);

        let g = AngularGrid::adapted(3, 8, &AngularBreaks::Height(vec![0.3])).unwrap();
        let s: Vec<f64> = g.iter().map(|(v, _)| if v[2] >= 0.3 { 1.0 } else { 0.0 }).collect();
        assert!((integrate_sphere(&g, &s).unwrap() - 2.0 * PI * 0.7).abs() < 1e-13);
    }

    #[test]
    fn dyadic_shells() {
        assert_eq!(DyadicAnnuli::shell_index(1.0), 0);
        assert_eq!(DyadicAnnuli::shell_index(0.75), 0);
        assert_eq!(DyadicAnnuli::shell_index(0.5), -1);
        assert_eq!(DyadicAnnuli::shell_index(3.0), 2);
        let d = DyadicAnnuli::new(-3, 2, 2).unwrap();
        let shells: Vec<_> = d.shells().map(DyadicAnnuli::shell).collect();
        for w in shells.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
        assert_eq!(d.inner_radius(), 2f64.powi(-4));
        assert_eq!(d.outer_radius(), 4.0);
        assert!(DyadicAnnuli::new(2, 1, 2).is_err());
    }

    #[test]
    fn tails_recover_power_laws() {
        let q = Quadrature::default();
        // ∫_0^1 r^{-0.9} dr = 10, with the window starting at 1e-6.
        let v = q
            .integrate_radial_fn(|r| Ok(r.powf(-0.9)), 1e-6, 1.0, &[], Tails { lower: true, upper: false })
            .unwrap();
        assert!((v - 10.0).abs() < 1e-9, "{v}");
        // ∫_1^∞ r^{-3} dr = 1/2.
        let v = q
            .integrate_radial_fn(|r| Ok(r.powi(-3)), 1.0, 1e3, &[], Tails { lower: false, upper: true })
            .unwrap();
        assert!((v - 0.5).abs() < 1e-12, "{v}");
        let e = q.integrate_radial_fn(|r| Ok(1.0 / r), 1e-6, 1.0, &[], Tails::BOTH);
        assert!(matches!(e, Err(Error::DivergentNorm(_))));
    }
}
