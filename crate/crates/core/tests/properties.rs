use proptest::prelude::*;

use hausdorff_mixed::fields::{AngularPart, FieldSpec, KernelSpec, Profile, RadialPart};
use hausdorff_mixed::geometry::Quadrature;
use hausdorff_mixed::norms::{mixed_norm, Mixed};
use hausdorff_mixed::operators::apply_hausdorff;

fn field(a: f64, b: f64, k: u32, offset: f64) -> FieldSpec {
    FieldSpec::separable(2, RadialPart::PowerGaussian { a, b, c: 2.0 }, AngularPart::Harmonic { k, offset }, 1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mixed_norm_scales_under_dilation(
        a in 0.0..2.0f64, b in 0.5..2.0f64, k in 0u32..4, offset in 1.2..3.0f64,
        p in 1.0..4.0f64, pt in 1.0..4.0f64, lambda in 0.2..5.0f64,
    ) {
        let q = Quadrature::default();
        let f = field(a, b, k, offset);
        let m = Mixed::new(p, pt);
        let base = mixed_norm(&f, &m, &q).unwrap();
        let d = mixed_norm(&f.dilate(lambda), &m, &q).unwrap();
        let want = lambda.powf(-2.0 / p) * base;
        prop_assert!((d - want).abs() <= 1e-9 * want);
    }

    #[test]
    fn hausdorff_image_is_linear_and_radial(
        a in 0.0..2.0f64, b in 0.5..2.0f64, t0 in 0.2..1.0f64, r in 0.05..5.0f64,
        ang in 0.0..std::f64::consts::TAU, c in -3.0..3.0f64,
    ) {
        let q = Quadrature::default();
        let kernel = KernelSpec::radial(Profile::indicator(t0, 2.0 * t0));
        let (f, g) = (field(a, b, 1, 1.5), field(0.0, 1.0, 2, 0.0));
        let dir = [ang.cos(), ang.sin()];
        let hf = apply_hausdorff(&kernel, &f, r, &dir, &q).unwrap();
        let hg = apply_hausdorff(&kernel, &g, r, &dir, &q).unwrap();
        let sum = apply_hausdorff(&kernel, &f.plus(&g.scaled(c)), r, &dir, &q).unwrap();
        prop_assert!((sum - (hf + c * hg)).abs() <= 1e-12 * (hf.abs() + (c * hg).abs()).max(1.0));
        let hf_e1 = apply_hausdorff(&kernel, &f, r, &[1.0, 0.0], &q).unwrap();
        prop_assert!((hf - hf_e1).abs() <= 1e-13 * hf.abs().max(1.0));
    }
}
