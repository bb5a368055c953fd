//! Cartesian cross-checks for the polar reductions on `ℝ²`: tensor
//! Gauss-Legendre on a box, with panels refined geometrically toward the
//! origin.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{AngularPart, FieldSpec, KernelSpec, Profile, RadialPart};
use crate::geometry::{GaussRule, Quadrature};
use crate::norms::{mixed_norm, Mixed};
use crate::operators::apply_hausdorff;

/// Half-width of the Cartesian box.
pub const BOX: f64 = 8.0;

/// A smooth `ℝ²` instance of `H_Φ f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleCase {
    pub id: String,
    pub profile: Profile,
    pub field: FieldSpec,
}

fn smooth(id: usize, s: f64, b: f64, field: FieldSpec) -> OracleCase {
    OracleCase {
        id: format!("smooth-{id:02}"),
        profile: Profile::power_exp(s, b),
        field,
    }
}

fn gaussian_like(a: f64, b: f64) -> RadialPart {
    RadialPart::PowerGaussian { a, b, c: 2.0 }
}

/// Ten smooth cases: kernels `t^s e^{-bt}` and Gaussian-type fields with
/// positive trigonometric angular factors.
pub fn oracle_cases() -> Vec<OracleCase> {
    let h = |k, off| AngularPart::Harmonic { k, offset: off };
    vec![
        smooth(1, 1.0, 1.0, FieldSpec::gaussian(2)),
        smooth(2, 2.0, 1.0, FieldSpec::gaussian(2)),
        smooth(3, 1.0, 2.0, FieldSpec::radial(2, gaussian_like(2.0, 1.0))),
        smooth(4, 0.5, 1.0, FieldSpec::radial(2, gaussian_like(0.0, 0.5))),
        smooth(5, 1.0, 1.0, FieldSpec::separable(2, gaussian_like(0.0, 1.0), h(1, 2.0), 1.0)),
        smooth(6, 2.0, 1.5, FieldSpec::separable(2, gaussian_like(0.0, 1.0), h(2, 1.5), 1.0)),
        smooth(7, 1.0, 1.0, FieldSpec::separable(2, gaussian_like(2.0, 2.0), h(3, 1.2), 1.0)),
        smooth(8, 3.0, 2.0, FieldSpec::separable(2, gaussian_like(0.0, 0.75), h(1, 1.1), 2.0)),
        smooth(9, 1.5, 0.5, FieldSpec::radial(2, gaussian_like(4.0, 1.0))),
        smooth(10, 1.0, 1.0, FieldSpec::separable(2, gaussian_like(2.0, 1.0), h(2, 3.0), 0.5)),
    ]
}

pub fn oracle_case(id: &str) -> Result<OracleCase> {
    oracle_cases()
        .into_iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::InvalidInput(format!("unknown oracle case `{id}`")))
}

/// One-dimensional composite rule on `[-BOX, BOX]`, refined toward 0.
pub struct CartesianAxis {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CartesianAxis {
    pub fn new(sub: usize) -> Self {
        let rule = GaussRule::new(Quadrature::GAUSS_ORDER);
        let mut edges = vec![0.0];
        let mut e = 1.0 / 64.0;
        while e < 4.0 {
            edges.push(e);
            e *= 2.0;
        }
        edges.extend([4.0, 6.0, BOX]);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for w in edges.windows(2) {
            let h = (w[1] - w[0]) / sub as f64;
            for j in 0..sub {
                let a = w[0] + j as f64 * h;
                for (x, wt) in rule.mapped(a, a + h) {
                    nodes.push(x);
                    weights.push(wt);
                    nodes.push(-x);
                    weights.push(wt);
                }
            }
        }
        CartesianAxis { nodes, weights }
    }

    /// `∫∫_{[-BOX,BOX]²} g(y₁, y₂) dy`.
    pub fn integrate2<G: Fn(f64, f64) -> f64 + Sync>(&self, g: G) -> f64 {
        self.nodes
            .par_iter()
            .zip(&self.weights)
            .map(|(y1, w1)| {
                let mut s = 0.0;
                for (y2, w2) in self.nodes.iter().zip(&self.weights) {
                    s += w2 * g(*y1, *y2);
                }
                w1 * s
            })
            .sum()
    }
}

fn polar_of(y1: f64, y2: f64) -> (f64, [f64; 2]) {
    let r = y1.hypot(y2);
    (r, [y1 / r, y2 / r])
}

/// `∫ Φ(|x|/|y|) |y|^{-2} f(y) dy` on the Cartesian grid.
pub fn cartesian_hausdorff(profile: &Profile, f: &FieldSpec, x: [f64; 2], axis: &CartesianAxis) -> f64 {
    let rx = x[0].hypot(x[1]);
    axis.integrate2(|y1, y2| {
        let (r, dir) = polar_of(y1, y2);
        let phi = profile.value(rx / r);
        if phi == 0.0 {
            return 0.0;
        }
        phi / (r * r) * f.value(r, &dir)
    })
}

/// `‖f‖_{L^p(ℝ²)}` on the Cartesian grid.
pub fn cartesian_lp(f: &FieldSpec, p: f64, axis: &CartesianAxis) -> f64 {
    axis.integrate2(|y1, y2| {
        let (r, dir) = polar_of(y1, y2);
        f.value(r, &dir).abs().powf(p)
    })
    .powf(1.0 / p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OraclePoint {
    pub x: [f64; 2],
    pub polar: f64,
    pub cartesian: f64,
    /// `|polar − cartesian| / max(1, |cartesian|)`.
    pub err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub case: String,
    pub points: Vec<OraclePoint>,
    pub max_err: f64,
}

/// Compare the polar evaluation with the Cartesian one at `count` points
/// with `|x| ∈ [1/4, 3]`, drawn from a seeded generator.
pub fn run_oracle(case: &OracleCase, count: usize, seed: u64, q: &Quadrature) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let axis = CartesianAxis::new(3);
    let kernel = KernelSpec::radial(case.profile.clone());
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let rho: f64 = rng.gen_range(0.25..3.0);
        let ang: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let dir = [ang.cos(), ang.sin()];
        let x = [rho * dir[0], rho * dir[1]];
        let polar = apply_hausdorff(&kernel, &case.field, rho, &dir, q)?;
        let cartesian = cartesian_hausdorff(&case.profile, &case.field, x, &axis);
        let err = (polar - cartesian).abs() / cartesian.abs().max(1.0);
        points.push(OraclePoint { x, polar, cartesian, err });
    }
    let max_err = points.iter().map(|p| p.err).fold(0.0, f64::max);
    Ok(OracleReport {
        case: case.id.clone(),
        points,
        max_err,
    })
}

/// Relative difference between the `p = p̃` mixed norm and the Cartesian
/// `L^p` norm.
pub fn lp_collapse_error(f: &FieldSpec, p: f64, q: &Quadrature) -> Result<f64> {
    let polar = mixed_norm(f, &Mixed::new(p, p), q)?;
    let cart = cartesian_lp(f, p, &CartesianAxis::new(3));
    Ok((polar - cart).abs() / cart)
}
