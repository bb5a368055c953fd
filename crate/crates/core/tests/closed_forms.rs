use std::f64::consts::PI;

use hausdorff_mixed::fields::{FieldSpec, KernelSpec, Profile};
use hausdorff_mixed::geometry::Quadrature;
use hausdorff_mixed::norms::{herz_norm, mixed_norm, norm, Mixed, NormSpec, Space};
use hausdorff_mixed::operators::{apply_adjoint, apply_fractional};

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol * b.abs().max(1.0), "{a} vs {b}");
}

#[test]
fn mixed_norm_of_gaussian_with_unequal_exponents() {
    let q = Quadrature::default();
    let g = FieldSpec::gaussian(2);
    for (p, pt) in [(2.0f64, 3.0), (1.0, 4.0), (3.0, 1.5)] {
        let want = (2.0 * PI).powf(1.0 / pt) * (2.0 * p).powf(-1.0 / p);
        close(mixed_norm(&g, &Mixed::new(p, pt), &q).unwrap(), want, 1e-10);
    }
}

#[test]
fn herz_norm_of_unit_ball() {
    let q = Quadrature::default();
    let ball = FieldSpec::ball(2, 1.0);
    // Shell E_k ⊂ B(0,1) for k ≤ 0 has area 3π 4^k / 4.
    let want = (3.0 * PI / 4.0).sqrt() / (1.0 - 2f64.powf(-1.5));
    close(herz_norm(&ball, 0.5, 1.0, 2.0, 2.0, None, &q).unwrap().value, want, 1e-8);
}

#[test]
fn central_morrey_norm_of_unit_ball() {
    let q = Quadrature::default();
    let spec = NormSpec::new(Space::CentralMorrey { p: 2.0, p_ang: 2.0 }, 2);
    close(norm(&FieldSpec::ball(2, 1.0), &spec, &q).unwrap().value, 1.0, 1e-8);
}

#[test]
fn adjoint_of_gaussian_matches_exponential_integral() {
    let q = Quadrature::default();
    let kernel = KernelSpec::radial(Profile::indicator(1.0, 2.0));
    // π (E₁(r²/4) − E₁(r²)), values from an independent special-function library.
    for (r, want) in [(0.5, 3.8095809116417003), (1.0, 2.591495696027251), (2.0, 0.6773417708464842)] {
        close(apply_adjoint(&kernel, &FieldSpec::gaussian(2), r, &[0.0, 1.0], &q).unwrap(), want, 1e-10);
    }
}

#[test]
fn fractional_image_of_ball() {
    let q = Quadrature::default();
    let kernel = KernelSpec::radial(Profile::indicator(1.0, 2.0));
    let ball = FieldSpec::ball(2, 1.0);
    // 2π (min(1, r) − r/2) for β = 1.
    for r in [0.25, 0.5, 1.0, 1.5] {
        let want = 2.0 * PI * (f64::min(1.0, r) - r / 2.0);
        close(apply_fractional(&kernel, 1.0, &ball, r, &[1.0, 0.0], &q).unwrap(), want, 1e-10);
    }
    assert!(apply_fractional(&kernel, 2.0, &ball, 0.5, &[1.0, 0.0], &q).is_err());
}
