//! Right-hand-side constants of the inequalities.
//!
//! `Form::Printed` evaluates each constant exactly as stated. `Form::Derived`
//! evaluates the constant that the chain of estimates in the argument
//! actually yields; the two coincide except where a factor is lost along
//! the way.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::fields::{AngularPart, Growth, KernelSpec, Profile};
use crate::geometry::{omega, Quadrature, Tails};
use crate::norms::{default_sup_radii, sup_refined};
use crate::operators::Sphere;
use crate::theorems::{sum_recip, Exponents, TheoremId, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Form {
    Printed,
    Derived,
}

/// Everything a constant depends on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantSpec {
    pub theorem: TheoremId,
    pub dim: usize,
    pub kernel: KernelSpec,
    pub exponents: Exponents,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<Growth>,
}

/// `∫_0^∞ |φ(t)|^q t^{e-1} dt` (closed form).
pub fn moment(profile: &Profile, q: f64, e: f64) -> Result<f64> {
    profile.abs_moment(q, e)
}

/// `∫_lo^hi |φ(t)| w(t) dt` by quadrature over the profile support.
pub fn profile_integral<W: Fn(f64) -> f64>(
    profile: &Profile,
    w: W,
    range: (f64, f64),
    extra_breaks: &[f64],
    q: &Quadrature,
) -> Result<f64> {
    if profile.is_zero() {
        return Ok(0.0);
    }
    let (s_lo, s_hi) = profile.support();
    let lo = s_lo.max(range.0);
    let hi = s_hi.min(range.1);
    if !(hi > lo) {
        return Ok(0.0);
    }
    let tails = Tails {
        lower: lo == 0.0,
        upper: hi.is_infinite(),
    };
    let a = if lo > 0.0 { lo } else { q.window.r_min.min(hi / 10.0) };
    let b = if hi.is_finite() { hi } else { q.window.r_max.max(a * 10.0) };
    let mut breaks = profile.breaks();
    breaks.extend_from_slice(extra_breaks);
    let total = q
        .integrate_radial_fn(|t| Ok(profile.value(t).abs() * w(t)), a, b, &breaks, tails)
        .map_err(|e| match e {
            Error::DivergentNorm(m) => Error::DivergentMoment(m),
            other => other,
        })?;
    if !total.is_finite() {
        return Err(Error::DivergentMoment("kernel moment is not finite".into()));
    }
    Ok(total)
}

/// `‖Ω‖_{L^s(S^{n-1})}`; `s = None` means the sup norm.
pub fn omega_norm(omega_part: &AngularPart, n: usize, s: Option<f64>, q: &Quadrature) -> Result<f64> {
    omega_part.validate(n)?;
    let sphere = Sphere::for_functions(q, n, omega_part.is_constant(), omega_part.breaks(n))?;
    match s {
        Some(s) => {
            let v = sphere.integrate(|v| Ok(omega_part.value(v).abs().powf(s)))?;
            Ok(v.powf(1.0 / s))
        }
        None => {
            let mut best = 0.0f64;
            sphere.integrate(|v| {
                best = best.max(omega_part.value(v).abs());
                Ok(0.0)
            })?;
            Ok(best)
        }
    }
}

/// Members of the `sup_r φ(r)^{-1} ∫ … φ(r/t) dt` family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhiSup {
    /// `𝒦` with the printed `|y|^{n/p}` factor.
    K,
    /// `𝒦` without the `|y|^{n/p}` factor.
    KDerived,
    /// `𝒦₀`, the sum of the `|y| ≤ 1` and `|y| ≥ 1` logarithmic pieces.
    K0,
    /// `𝒦₁`.
    K1,
}

/// Evaluate a member of the `φ`-sup family for a radial profile.
pub fn phi_sup_constant(which: PhiSup, profile: &Profile, growth: &Growth, n: usize, p: f64, q: &Quadrature) -> Result<f64> {
    let w = omega(n);
    let full = (0.0, f64::INFINITY);
    match which {
        PhiSup::K => Ok(w * phi_sup(profile, growth, n as f64 / p, |_| 1.0, full, q)?),
        PhiSup::KDerived | PhiSup::K1 => Ok(w * phi_sup(profile, growth, 0.0, |_| 1.0, full, q)?),
        PhiSup::K0 => {
            let e = n as f64 / p;
            let small = phi_sup(profile, growth, e, |s| (2.0 / s).ln(), (0.0, 1.0), q)?;
            let large = phi_sup(profile, growth, e, |s| (2.0 * s).ln(), (1.0, f64::INFINITY), q)?;
            Ok(w * (small + large))
        }
    }
}

/// `sup_r φ(r)^{-1} ∫_range |ψ(s)| s^{e-1} φ(r/s) w(s) ds`.
fn phi_sup<W: Fn(f64) -> f64 + Copy>(
    profile: &Profile,
    growth: &Growth,
    e: f64,
    w: W,
    range: (f64, f64),
    q: &Quadrature,
) -> Result<f64> {
    if let Growth::Power { delta } = *growth {
        // φ(r/s)/φ(r) = s^{-δ}: the sup is attained at every r.
        let plain = range == (0.0, f64::INFINITY) && w(2.0) == 1.0 && w(0.5) == 1.0;
        if plain {
            return moment(profile, 1.0, e - delta);
        }
        return profile_integral(profile, |s| s.powf(e - delta - 1.0) * w(s), range, &[], q);
    }
    let h = |r: f64| -> Result<f64> {
        let v = profile_integral(profile, |s| s.powf(e - 1.0) * growth.value(r / s) * w(s), range, &[r], q)?;
        Ok(v / growth.value(r))
    };
    match sup_refined(h, &default_sup_radii()) {
        Err(Error::DivergentNorm(m)) => Err(Error::DivergentMoment(m)),
        other => Ok(other?.value),
    }
}

/// `Π Γ(a_i/2) / (2^{m-1} Γ(Σ a_i/2))`, the integral of `Π u_i^{a_i-1}`
/// over the positive orthant of `S^{m-1}`.
pub fn orthant_factor(a: &[f64]) -> Result<f64> {
    if a.iter().any(|x| !(*x > 0.0)) {
        return Err(Error::DivergentMoment(format!(
            "orthant integral needs every exponent positive, got {a:?}"
        )));
    }
    let m = a.len() as i32;
    let num: f64 = a.iter().map(|x| gamma(x / 2.0)).product();
    Ok(num / (2f64.powi(m - 1) * gamma(a.iter().sum::<f64>() / 2.0)))
}

fn single_profile<'k>(kernel: &'k KernelSpec) -> Result<&'k Profile> {
    kernel
        .profile()
        .ok_or_else(|| Error::Unsupported("this constant needs a single-profile kernel".into()))
}

fn psi_factors(kernel: &KernelSpec) -> Result<&[Profile]> {
    match kernel {
        KernelSpec::Psi { factors } => Ok(factors),
        _ => Err(Error::Unsupported("this constant needs a Ψ kernel".into())),
    }
}

fn growth_of(spec: &ConstantSpec) -> Result<&Growth> {
    spec.growth
        .as_ref()
        .ok_or_else(|| Error::InvalidInput(format!("theorem {} needs a growth function φ", spec.theorem)))
}

/// `𝒜 = (∫|Φ|^{r'} t^{n(r'-1)-1} dt)^{1/r'}`.
pub fn constant_a(profile: &Profile, n: usize, r: Q) -> Result<f64> {
    let rc = r
        .conj()
        .ok_or_else(|| Error::InvalidInput("𝒜 needs r > 1".into()))?
        .f();
    Ok(moment(profile, rc, n as f64 * (rc - 1.0))?.powf(1.0 / rc))
}

/// `ℬ = (∫|Φ|^{r'} t^{n-1} dt)^{1/r'}`.
pub fn constant_b(profile: &Profile, n: usize, r: Q) -> Result<f64> {
    let rc = r
        .conj()
        .ok_or_else(|| Error::InvalidInput("ℬ needs r > 1".into()))?
        .f();
    Ok(moment(profile, rc, n as f64)?.powf(1.0 / rc))
}

/// The constant on the right-hand side of the named inequality.
///
/// `Form::Derived` returns `None` for inequalities stated with `≲`, and for
/// the one exact statement (the `φ`-Morrey commutator bound) whose argument
/// does not produce an explicit constant.
pub fn theorem_constant(spec: &ConstantSpec, form: Form, q: &Quadrature) -> Result<Option<f64>> {
    let n = spec.dim;
    let nf = n as f64;
    let x = &spec.exponents;
    let w = omega(n);
    let derived = form == Form::Derived;
    let v = match spec.theorem {
        TheoremId::T1_1 => {
            let phi = single_profile(&spec.kernel)?;
            let p = x.f("p")?;
            let pow = x.q("pt1")?.recip().f() + x.q("pt2")?.conj_recip().f();
            w.powf(pow) * moment(phi, 1.0, nf / p)?
        }
        TheoremId::T1_2 => {
            let KernelSpec::Rough { profile, omega: om } = &spec.kernel else {
                return Err(Error::Unsupported("rough-kernel bound needs Φ with Ω".into()));
            };
            let p = x.f("p")?;
            let s = x.q("pt2")?.conj().map(Q::f);
            w.powf(1.0 / x.f("pt1")?) * omega_norm(om, n, s, q)? * moment(profile, 1.0, nf / p)?
        }
        TheoremId::T1_3 => {
            let phi = single_profile(&spec.kernel)?;
            let m = x.arity()?;
            let p = x.f("p")?;
            let big = omega(n * m);
            w.powf(1.0 / x.f("pt1")?) * big.powf(x.q("pt2")?.conj_recip().f()) * moment(phi, 1.0, (n * m) as f64 / p)?
        }
        TheoremId::T1_4 => {
            let phi = single_profile(&spec.kernel)?;
            let p = x.f("p")?;
            let ps = x.list_f("p_i")?;
            let a: Vec<f64> = ps.iter().map(|pi| nf - nf / pi).collect();
            moment(phi, 1.0, nf / p)? * w.powi(ps.len() as i32) * orthant_factor(&a)?
        }
        TheoremId::T1_5 => {
            if derived {
                return Ok(None);
            }
            let phi = single_profile(&spec.kernel)?;
            w * moment(phi, 1.0, nf / x.f("p2")? + x.f("alpha")?)?
        }
        TheoremId::T3_1a | TheoremId::T3_1b => {
            let phi = single_profile(&spec.kernel)?;
            let (s, qq, p2, g) = (x.f("s")?, x.f("q")?, x.f("p2")?, x.f("gamma")?);
            let base = w.powf(1.0 / qq) * moment(phi, s, (g + nf) * s / p2)?.powf(1.0 / s);
            if derived && spec.theorem == TheoremId::T3_1b {
                base * w.powf(1.0 - 1.0 / qq)
            } else {
                base
            }
        }
        TheoremId::T3_2 => {
            let phi = single_profile(&spec.kernel)?;
            let (qq, p2, g) = (x.f("q")?, x.f("p2")?, x.f("gamma")?);
            let p1 = x.q("p1")?;
            let p1c = p1
                .conj()
                .ok_or_else(|| Error::Hypothesis {
                    theorem: "3.2".into(),
                    reason: "the constant involves p₁' and needs p₁ > 1".into(),
                })?
                .f();
            let e = (g + nf) * p1c / p2;
            let front = (nf + g).powf(-1.0 / p2);
            if derived {
                w.powf(1.0 / qq) * front * moment(phi, p1c, e)?.powf(1.0 / p1c)
            } else {
                let p1 = p1.f();
                omega(n + 1).powf(1.0 / qq) * front * moment(phi, p1, e)?.powf(1.0 / p1)
            }
        }
        TheoremId::T4_1 => {
            let factors = psi_factors(&spec.kernel)?;
            let ps = x.list_f("p_i")?;
            let al = x.list_f("alpha_i")?;
            let pts = x.list("pt_i")?;
            check_len(factors.len(), &[ps.len(), al.len(), pts.len()])?;
            let pow = factors.len() as f64 + x.q("pt")?.recip().f() - sum_recip(&pts).f();
            let mut c = w.powf(pow);
            for ((phi, p), a) in factors.iter().zip(&ps).zip(&al) {
                c *= moment(phi, 1.0, nf / p + a)?;
            }
            c
        }
        TheoremId::T4_2 => {
            let factors = psi_factors(&spec.kernel)?;
            let lams = x.list_f("lambda_i")?;
            let pts = x.list("pt_i")?;
            check_len(factors.len(), &[lams.len(), pts.len()])?;
            let mut pow = x.q("pt")?.recip().f() - sum_recip(&pts).f();
            if derived {
                pow += factors.len() as f64;
            }
            let mut c = w.powf(pow);
            for (phi, l) in factors.iter().zip(&lams) {
                c *= moment(phi, 1.0, -nf * l)?;
            }
            c
        }
        TheoremId::T5_1 => {
            let phi = single_profile(&spec.kernel)?;
            let which = if derived { PhiSup::KDerived } else { PhiSup::K };
            phi_sup_constant(which, phi, growth_of(spec)?, n, x.f("p")?, q)?
        }
        TheoremId::T5_2 => {
            if derived {
                return Ok(None);
            }
            let phi = single_profile(&spec.kernel)?;
            phi_sup_constant(PhiSup::K0, phi, growth_of(spec)?, n, x.f("p")?, q)?
        }
        TheoremId::T5_3 | TheoremId::T5_4 => {
            if derived && spec.theorem == TheoremId::T5_4 {
                return Ok(None);
            }
            let phi = single_profile(&spec.kernel)?;
            phi_sup_constant(PhiSup::K1, phi, growth_of(spec)?, n, x.f("p")?, q)?
        }
        TheoremId::T6_1a | TheoremId::T6_2a | TheoremId::T6_1b | TheoremId::T6_2b | TheoremId::T6_1c | TheoremId::T6_2c => {
            if derived {
                return Ok(None);
            }
            let phi = single_profile(&spec.kernel)?;
            let r = x.q("r")?;
            match spec.theorem {
                TheoremId::T6_1a | TheoremId::T6_2a => constant_a(phi, n, r)?,
                TheoremId::T6_1b | TheoremId::T6_2b => constant_b(phi, n, r)?,
                _ => constant_a(phi, n, r)? + constant_b(phi, n, r)?,
            }
        }
    };
    if !v.is_finite() {
        return Err(Error::DivergentMoment(format!("constant of theorem {} is not finite", spec.theorem)));
    }
    Ok(Some(v))
}

fn check_len(m: usize, lens: &[usize]) -> Result<()> {
    if lens.iter().any(|l| *l != m) {
        return Err(Error::InvalidInput(format!("exponent lists must have one entry per factor ({m})")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    fn q() -> Quadrature {
        Quadrature::default()
    }

    fn chi12() -> Profile {
        Profile::indicator(1.0, 2.0)
    }

    fn spec(theorem: TheoremId, kernel: KernelSpec, exponents: Exponents) -> ConstantSpec {
        ConstantSpec {
            theorem,
            dim: 2,
            kernel,
            exponents,
            growth: None,
        }
    }

    #[test]
    fn hausdorff_constant_closed_form() {
        let s = spec(
            TheoremId::T1_1,
            KernelSpec::radial(chi12()),
            Exponents::new().with("p", "2").with("pt1", "2").with("pt2", "2"),
        );
        let c = theorem_constant(&s, Form::Printed, &q()).unwrap().unwrap();
        assert!((c - 2.0 * PI).abs() < 1e-12, "{c}");
        // p̃₂ = 1 drops the second ω power.
        let s1 = spec(
            TheoremId::T1_1,
            KernelSpec::radial(chi12()),
            Exponents::new().with("p", "2").with("pt1", "2").with("pt2", "1"),
        );
        let c1 = theorem_constant(&s1, Form::Printed, &q()).unwrap().unwrap();
        assert!((c1 - (2.0 * PI).sqrt()).abs() < 1e-12);
        let zero = spec(
            TheoremId::T1_1,
            KernelSpec::radial(chi12().with_coef(0.0)),
            Exponents::new().with("p", "2").with("pt1", "2").with("pt2", "2"),
        );
        assert_eq!(theorem_constant(&zero, Form::Printed, &q()).unwrap(), Some(0.0));
    }

    #[test]
    fn herz_commutator_constants() {
        let a = constant_a(&chi12(), 2, Q::int(2)).unwrap();
        assert!((a - 1.5f64.sqrt()).abs() < 1e-14);
        // ℬ with r' = 2: (∫_1^2 t dt)^{1/2} as well when n = 2.
        let b = constant_b(&chi12(), 2, Q::int(2)).unwrap();
        assert!((b - 1.5f64.sqrt()).abs() < 1e-14);
        let decay_free = Profile::power_cutoff(0.0, 1.0, None);
        assert!(matches!(constant_b(&decay_free, 2, Q::int(2)), Err(Error::DivergentMoment(_))));
    }

    #[test]
    fn phi_sup_family() {
        let q = q();
        let g = Growth::Power { delta: 1.0 };
        let k1 = phi_sup_constant(PhiSup::K1, &chi12(), &g, 2, 2.0, &q).unwrap();
        assert!((k1 - PI).abs() < 1e-12, "{k1}");
        let flat = Growth::Power { delta: 0.0 };
        let k1 = phi_sup_constant(PhiSup::K1, &chi12(), &flat, 2, 2.0, &q).unwrap();
        assert!((k1 - 2.0 * PI * LN_2).abs() < 1e-12);
        assert_eq!(phi_sup_constant(PhiSup::K1, &chi12().with_coef(0.0), &g, 2, 2.0, &q).unwrap(), 0.0);
        // A broken power with equal slopes goes through the sampled sup.
        let broken = Growth::BrokenPower { small: 1.0, large: 1.0 };
        let kb = phi_sup_constant(PhiSup::K1, &chi12(), &broken, 2, 2.0, &q).unwrap();
        assert!((kb - PI).abs() < 1e-10, "{kb}");
    }

    #[test]
    fn log_constant_dominates() {
        let q = q();
        let profile = Profile::power_exp(1.0, 1.0);
        for delta in [-0.5, 0.0, -1.0] {
            let g = Growth::Power { delta };
            let k0 = phi_sup_constant(PhiSup::K0, &profile, &g, 2, 2.0, &q).unwrap();
            let k = phi_sup_constant(PhiSup::K, &profile, &g, 2, 2.0, &q).unwrap();
            assert!(k0 >= LN_2 * k * (1.0 - 1e-12), "{k0} {k}");
        }
    }

    #[test]
    fn quadrature_matches_closed_form_moments() {
        let q = q();
        for p in [
            Profile::indicator(0.5, 3.0),
            Profile::power_cutoff(-3.0, 1.0, None),
            Profile::power_cutoff(1.5, 0.0, Some(2.0)),
            Profile::power_exp(0.5, 2.0),
        ] {
            for e in [0.5, 1.0, 2.0] {
                let exact = moment(&p, 1.0, e).unwrap();
                let quad = profile_integral(&p, |t| t.powf(e - 1.0), (0.0, f64::INFINITY), &[], &q).unwrap();
                assert!((quad - exact).abs() < 1e-10 * exact, "{p:?} e={e}: {quad} vs {exact}");
            }
        }
    }

    #[test]
    fn orthant_factor_values() {
        // Quarter circle: ∫_0^{π/2} dα = π/2.
        assert!((orthant_factor(&[1.0, 1.0]).unwrap() - PI / 2.0).abs() < 1e-14);
        // ∫_0^{π/2} cos α sin α dα = 1/2.
        assert!((orthant_factor(&[2.0, 2.0]).unwrap() - 0.5).abs() < 1e-14);
        assert!(orthant_factor(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn rough_omega_norm() {
        let q = q();
        let cap = AngularPart::Cap { height: 0.0 };
        let v = omega_norm(&cap, 2, Some(2.0), &q).unwrap();
        assert!((v - PI.sqrt()).abs() < 1e-12);
        assert_eq!(omega_norm(&cap, 2, None, &q).unwrap(), 1.0);
        let c = omega_norm(&AngularPart::Constant, 3, Some(1.0), &q).unwrap();
        assert!((c - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn derived_forms() {
        let q = q();
        let x = Exponents::new()
            .with("beta", "0")
            .with("alpha", "0")
            .with("gamma", "0")
            .with("p1", "2")
            .with("p2", "2")
            .with("q", "2")
            .with("s", "1");
        let s = spec(TheoremId::T3_1b, KernelSpec::radial(chi12()), x);
        let printed = theorem_constant(&s, Form::Printed, &q).unwrap().unwrap();
        let derived = theorem_constant(&s, Form::Derived, &q).unwrap().unwrap();
        assert!((derived / printed - (2.0 * PI).sqrt()).abs() < 1e-12);
        let mut s = s;
        s.theorem = TheoremId::T3_2;
        // ω₂^{1/2}/2^{1/2} (∫_1^2 t^{1} dt)^{1/2} and ω₁^{1/2}/2^{1/2} (∫_1^2 t dt)^{1/2}.
        let printed = theorem_constant(&s, Form::Printed, &q).unwrap().unwrap();
        let derived = theorem_constant(&s, Form::Derived, &q).unwrap().unwrap();
        assert!((printed - (4.0 * PI / 2.0 * 1.5).sqrt()).abs() < 1e-12, "{printed}");
        assert!((derived - (2.0 * PI / 2.0 * 1.5).sqrt()).abs() < 1e-12, "{derived}");
        let mut t = s.clone();
        t.exponents.set("p1", Q::int(1));
        assert!(matches!(theorem_constant(&t, Form::Printed, &q), Err(Error::Hypothesis { .. })));
        t.theorem = TheoremId::T6_1a;
        assert_eq!(theorem_constant(&t, Form::Derived, &q).unwrap(), None);
    }
}
