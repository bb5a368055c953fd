//! Theorem instances: one kernel, input fields, optional symbol and growth,
//! and the exponent tuple, with the hypotheses checked in exact arithmetic.

use std::path::Path;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::constants::ConstantSpec;
use crate::error::{Error, Result};
use crate::fields::{AngularPart, FieldSpec, Growth, KernelSpec, PolarFunction, Profile, RadialPart};
use crate::theorems::{sum, sum_recip, Exponents, TheoremId, Q};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub id: String,
    pub theorem: TheoremId,
    /// Dimension `n` of the statement.
    pub dim: usize,
    pub kernel: KernelSpec,
    pub fields: Vec<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<Growth>,
    pub exponents: Exponents,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct BankFile {
    #[serde(default)]
    case: Vec<Case>,
}

pub fn load_bank(path: &Path) -> Result<Vec<Case>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_bank(&text)
}

pub fn parse_bank(text: &str) -> Result<Vec<Case>> {
    let file: BankFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(file.case)
}

pub fn bank_to_toml(cases: &[Case]) -> Result<String> {
    toml::to_string(&BankFile { case: cases.to_vec() }).map_err(|e| Error::Parse(e.to_string()))
}

impl Case {
    pub fn constant_spec(&self) -> ConstantSpec {
        ConstantSpec {
            theorem: self.theorem,
            dim: self.dim,
            kernel: self.kernel.clone(),
            exponents: self.exponents.clone(),
            growth: self.growth.clone(),
        }
    }

    /// Number of input fields the statement takes.
    pub fn arity(&self) -> Result<usize> {
        match self.theorem {
            TheoremId::T1_4 | TheoremId::T4_1 | TheoremId::T4_2 => self.exponents.arity(),
            _ => Ok(1),
        }
    }

    /// Dimension the input fields live in.
    pub fn field_dim(&self) -> Result<usize> {
        if self.theorem == TheoremId::T1_3 {
            Ok(self.dim * self.exponents.arity()?)
        } else {
            Ok(self.dim)
        }
    }

    /// The same case with every field and the symbol replaced by `g(λ·)`.
    pub fn dilated(&self, lambda: f64) -> Case {
        let mut c = self.clone();
        c.fields = self.fields.iter().map(|f| f.dilate(lambda)).collect();
        c.symbol = self.symbol.as_ref().map(|b| b.dilate(lambda));
        c
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.theorem;
        let fail = |reason: String| Error::Hypothesis {
            theorem: t.to_string(),
            reason: format!("case {}: {reason}", self.id),
        };
        let check = |ok: bool, reason: &str| if ok { Ok(()) } else { Err(fail(reason.to_string())) };
        if self.dim < 1 {
            return Err(fail("dimension must be >= 1".into()));
        }
        self.kernel.validate()?;
        let arity = self.arity()?;
        check(self.fields.len() == arity, &format!("expects {arity} input field(s), got {}", self.fields.len()))?;
        let fd = self.field_dim()?;
        for f in &self.fields {
            f.validate()?;
            if f.dim() != fd {
                return Err(Error::DimensionMismatch { expected: fd, got: f.dim() });
            }
        }
        let needs_symbol = matches!(
            t,
            TheoremId::T5_2
                | TheoremId::T5_4
                | TheoremId::T6_1a
                | TheoremId::T6_1b
                | TheoremId::T6_1c
                | TheoremId::T6_2a
                | TheoremId::T6_2b
                | TheoremId::T6_2c
        );
        match (&self.symbol, needs_symbol) {
            (Some(b), true) => {
                b.validate()?;
                if b.dim() != fd {
                    return Err(Error::DimensionMismatch { expected: fd, got: b.dim() });
                }
            }
            (None, true) => return Err(fail("a commutator symbol b is required".into())),
            (Some(_), false) => return Err(fail("this statement takes no symbol".into())),
            (None, false) => {}
        }
        let needs_growth = matches!(t, TheoremId::T5_1 | TheoremId::T5_2 | TheoremId::T5_3 | TheoremId::T5_4);
        match (&self.growth, needs_growth) {
            (Some(g), true) => check(
                match *g {
                    Growth::Power { delta } => delta.is_finite(),
                    Growth::BrokenPower { small, large } => small.is_finite() && large.is_finite(),
                },
                "growth exponents must be finite",
            )?,
            (None, true) => return Err(fail("a growth function φ is required".into())),
            (Some(_), false) => return Err(fail("this statement takes no growth function".into())),
            (None, false) => {}
        }
        let all_radial = self.fields.iter().all(|f| f.is_radial());
        match (t, &self.kernel) {
            (TheoremId::T1_2, KernelSpec::Rough { omega, .. }) => omega.validate(self.dim)?,
            (TheoremId::T1_2, _) => return Err(fail("needs a rough kernel Φ·Ω".into())),
            (TheoremId::T4_1 | TheoremId::T4_2, KernelSpec::Psi { factors }) => {
                check(factors.len() == arity, "Ψ must have one factor per input")?
            }
            (TheoremId::T4_1 | TheoremId::T4_2, _) => return Err(fail("needs a product kernel Ψ".into())),
            (_, KernelSpec::Rough { .. } | KernelSpec::Psi { .. }) => {
                return Err(fail("needs a single-profile kernel Φ".into()))
            }
            _ => {}
        }
        if matches!(t, TheoremId::T1_4 | TheoremId::T1_5 | TheoremId::T3_1b | TheoremId::T4_2) {
            check(all_radial, "input functions must be radial")?;
        }
        self.validate_exponents(&check)
    }

    fn validate_exponents(&self, check: &dyn Fn(bool, &str) -> Result<()>) -> Result<()> {
        let x = &self.exponents;
        let n = Rational64::from_integer(self.dim as i64);
        let one = Rational64::one();
        let zero = Rational64::zero();
        let ge1 = |k: &str| -> Result<Rational64> {
            let v = x.q(k)?.0;
            check(v >= one, &format!("{k} must be >= 1"))?;
            Ok(v)
        };
        let gt1 = |k: &str| -> Result<Rational64> {
            let v = x.q(k)?.0;
            check(v > one, &format!("{k} must be > 1"))?;
            Ok(v)
        };
        let list_ge1 = |k: &str, m: usize| -> Result<Vec<Q>> {
            let v = x.list(k)?;
            check(v.len() == m, &format!("{k} needs {m} entries"))?;
            check(v.iter().all(|e| e.0 >= one), &format!("every entry of {k} must be >= 1"))?;
            Ok(v)
        };
        match self.theorem {
            TheoremId::T1_1 | TheoremId::T1_2 => {
                ge1("p")?;
                ge1("pt1")?;
                ge1("pt2")?;
            }
            TheoremId::T1_3 => {
                x.arity()?;
                ge1("p")?;
                ge1("pt1")?;
                ge1("pt2")?;
            }
            TheoremId::T1_4 => {
                let m = x.arity()?;
                let p = ge1("p")?;
                let pt = ge1("pt")?;
                let ps = list_ge1("p_i", m)?;
                let pts = list_ge1("pt_i", m)?;
                check(ps.iter().all(|e| e.0 > one), "every p_i must be > 1")?;
                check(sum_recip(&ps).0 == p.recip(), "1/p must equal Σ 1/p_i")?;
                check(sum_recip(&pts).0 == pt.recip(), "1/p̃ must equal Σ 1/p̃_i")?;
            }
            TheoremId::T1_5 => {
                ge1("p1")?;
                ge1("p2")?;
                ge1("pt1")?;
                ge1("q")?;
                x.q("alpha")?;
            }
            TheoremId::T3_1a | TheoremId::T3_1b | TheoremId::T3_2 => {
                let beta = x.q("beta")?.0;
                check(beta >= zero && beta < n, "needs 0 <= β < n")?;
                let p1 = ge1("p1")?;
                let p2 = ge1("p2")?;
                let q = ge1("q")?;
                let alpha = x.q("alpha")?.0;
                let gamma = x.q("gamma")?.0;
                check((gamma + n) / p2 == (alpha + n) / p1 - beta, "needs (γ+n)/p₂ = (α+n)/p₁ − β")?;
                if self.theorem == TheoremId::T3_2 {
                    check(n + gamma > zero, "needs n + γ > 0")?;
                    check(p1 > one, "the constant involves p₁' and needs p₁ > 1")?;
                } else {
                    let s = ge1("s")?;
                    check(q <= p2, "needs q <= p₂")?;
                    check(p2.recip() + one == s.recip() + p1.recip(), "needs 1/p₂ + 1 = 1/s + 1/p₁")?;
                }
            }
            TheoremId::T4_1 => {
                let m = x.arity()?;
                let p = ge1("p")?;
                let q = ge1("q")?;
                ge1("pt")?;
                let ps = list_ge1("p_i", m)?;
                let qs = list_ge1("q_i", m)?;
                list_ge1("pt_i", m)?;
                let al = x.list("alpha_i")?;
                check(al.len() == m, "alpha_i needs one entry per input")?;
                check(sum(&al) == x.q("alpha")?, "needs α = Σ α_i")?;
                check(sum_recip(&ps).0 == p.recip(), "needs 1/p = Σ 1/p_i")?;
                check(sum_recip(&qs).0 == q.recip(), "needs 1/q = Σ 1/q_i")?;
            }
            TheoremId::T4_2 => {
                let m = x.arity()?;
                let p = ge1("p")?;
                ge1("pt")?;
                let ps = list_ge1("p_i", m)?;
                list_ge1("pt_i", m)?;
                let lam = x.list("lambda_i")?;
                check(lam.len() == m, "lambda_i needs one entry per input")?;
                check(sum(&lam) == x.q("lambda")?, "needs λ = Σ λ_i")?;
                check(sum_recip(&ps).0 == p.recip(), "needs 1/p = Σ 1/p_i")?;
                check(
                    lam.iter().zip(&ps).all(|(l, p)| l.0 <= zero && l.0 > -p.0.recip()),
                    "needs −1/p_i < λ_i <= 0",
                )?;
            }
            TheoremId::T5_1 | TheoremId::T5_3 => {
                ge1("p")?;
                ge1("pt")?;
            }
            TheoremId::T5_2 | TheoremId::T5_4 => {
                let p = ge1("p")?;
                let pt = ge1("pt")?;
                let p1 = ge1("p1")?;
                let p2 = ge1("p2")?;
                let pt1 = ge1("pt1")?;
                let pt2 = ge1("pt2")?;
                check(p.recip() == p1.recip() + p2.recip(), "needs 1/p = 1/p₁ + 1/p₂")?;
                check(pt.recip() == pt1.recip() + pt2.recip(), "needs 1/p̃ = 1/p̃₁ + 1/p̃₂")?;
            }
            t => {
                let q = x.q("q")?.0;
                check(q > zero, "needs q > 0")?;
                let p = gt1("p")?;
                let pt = gt1("pt")?;
                let pt1 = gt1("pt1")?;
                let pt2 = gt1("pt2")?;
                let rr = gt1("r")?;
                check(rr < p, "needs 1 < r < p")?;
                check(pt.recip() == pt1.recip() + pt2.recip(), "needs 1/p̃ = 1/p̃₁ + 1/p̃₂")?;
                let alpha = x.q("alpha")?.0;
                let lambda = if matches!(t, TheoremId::T6_2a | TheoremId::T6_2b | TheoremId::T6_2c) {
                    let l = x.q("lambda")?.0;
                    check(l >= zero, "needs λ >= 0")?;
                    l
                } else {
                    zero
                };
                let upper = lambda + n * (rr.recip() - p.recip());
                let lower = lambda - n * (p.recip() - (one - rr.recip()));
                let (need_a, need_b) = match t {
                    TheoremId::T6_1a | TheoremId::T6_2a => (true, false),
                    TheoremId::T6_1b | TheoremId::T6_2b => (false, true),
                    _ => (true, true),
                };
                if need_a {
                    check(alpha < upper, "needs α < λ + n(1/r − 1/p)")?;
                }
                if need_b {
                    check(alpha > lower, "needs α > λ − n(1/p − 1/r')")?;
                }
            }
        }
        Ok(())
    }

    /// Exponent of the `CMO` norm of the symbol in the split-commutator
    /// statements, `max(p, pr/(p−r))`.
    pub fn cmo_exponent(&self) -> Result<Q> {
        let p = self.exponents.q("p")?.0;
        let rr = self.exponents.q("r")?.0;
        Ok(Q(p.max(p * rr / (p - rr))))
    }
}

// Field and kernel templates.

fn pg(n: usize, a: f64, b: f64, c: f64) -> FieldSpec {
    FieldSpec::radial(n, RadialPart::PowerGaussian { a, b, c })
}

fn gauss(n: usize) -> FieldSpec {
    FieldSpec::gaussian(n)
}

fn cut(n: usize, a: f64, radius: f64) -> FieldSpec {
    FieldSpec::radial(n, RadialPart::PowerCutoff { a, radius })
}

fn annulus(n: usize, inner: f64, outer: f64) -> FieldSpec {
    FieldSpec::radial(n, RadialPart::Annulus { inner, outer })
}

fn harmonic(radial: RadialPart, k: u32, offset: f64) -> FieldSpec {
    FieldSpec::separable(2, radial, AngularPart::Harmonic { k, offset }, 1.0)
}

fn cap(n: usize, radial: RadialPart, height: f64) -> FieldSpec {
    FieldSpec::separable(n, radial, AngularPart::Cap { height }, 1.0)
}

fn zonal(radial: RadialPart, coeffs: &[f64]) -> FieldSpec {
    FieldSpec::separable(3, radial, AngularPart::Zonal { coeffs: coeffs.to_vec() }, 1.0)
}

const GAUSS: RadialPart = RadialPart::PowerGaussian { a: 0.0, b: 1.0, c: 2.0 };

fn ind(t0: f64, t1: f64) -> Profile {
    Profile::indicator(t0, t1)
}

fn rad(p: Profile) -> KernelSpec {
    KernelSpec::radial(p)
}

/// `b = c + ln(clamp(r, lo, hi))`.
fn log_symbol(n: usize, lo: f64, hi: f64) -> FieldSpec {
    FieldSpec::radial(n, RadialPart::ClippedLog { offset: 0.0, lo, hi })
}

fn power(delta: f64) -> Option<Growth> {
    Some(Growth::Power { delta })
}

struct Builder {
    theorem: TheoremId,
    cases: Vec<Case>,
}

impl Builder {
    fn new(theorem: TheoremId) -> Self {
        Builder { theorem, cases: Vec::new() }
    }

    fn add(&mut self, label: &str, dim: usize, kernel: KernelSpec, fields: Vec<FieldSpec>, exps: Exponents) -> &mut Case {
        let id = format!("{}-{:02}-{label}", self.theorem, self.cases.len() + 1);
        self.cases.push(Case {
            id,
            theorem: self.theorem,
            dim,
            kernel,
            fields,
            symbol: None,
            growth: None,
            exponents: exps,
        });
        self.cases.last_mut().expect("just pushed")
    }
}

fn ex(pairs: &[(&str, &str)]) -> Exponents {
    pairs.iter().fold(Exponents::new(), |e, (k, v)| e.with(k, v))
}

/// The built-in bank for one statement.
pub fn default_bank(theorem: TheoremId) -> Vec<Case> {
    let mut b = Builder::new(theorem);
    let t = theorem;
    match t {
        TheoremId::T1_1 => {
            let e = |p, a, c| ex(&[("p", p), ("pt1", a), ("pt2", c)]);
            b.add("gauss-ind12", 2, rad(ind(1.0, 2.0)), vec![gauss(2)], e("2", "2", "2"));
            b.add("harmonic", 2, rad(ind(1.0, 2.0)), vec![harmonic(GAUSS, 2, 1.5)], e("2", "3", "3/2"));
            b.add("ball-powexp", 2, rad(Profile::power_exp(0.0, 1.0)), vec![cut(2, 0.0, 1.0)], e("3/2", "1", "4"));
            b.add("cap3", 3, rad(ind(0.5, 1.0)), vec![cap(3, GAUSS, 0.3)], e("4", "2", "2"));
            b.add("zonal-tail", 3, rad(Profile::power_cutoff(-1.0, 1.0, None)), vec![zonal(GAUSS, &[1.0, 0.5, 2.0])], e("4", "4", "4"));
            b.add("annulus-p1", 2, rad(Profile::power_exp(1.0, 2.0)), vec![annulus(2, 0.5, 2.0)], e("1", "2", "1"));
            b.add("harmonic-k1", 2, rad(ind(0.25, 4.0)), vec![harmonic(RadialPart::PowerGaussian { a: 1.0, b: 1.0, c: 2.0 }, 1, 2.0)], e("6", "6", "6"));
            b.add("gauss-n4", 4, rad(ind(1.0, 2.0)), vec![gauss(4)], e("2", "2", "2"));
            b.add("singular", 2, rad(ind(1.0, 3.0)), vec![pg(2, -0.5, 1.0, 1.0)], e("2", "1", "2"));
        }
        TheoremId::T1_2 => {
            let e = |p, a, c| ex(&[("p", p), ("pt1", a), ("pt2", c)]);
            let rough = |p: Profile, om: AngularPart| KernelSpec::Rough { profile: p, omega: om };
            b.add("omega-one", 2, rough(ind(1.0, 2.0), AngularPart::Constant), vec![gauss(2)], e("2", "2", "2"));
            b.add("harmonic-omega", 2, rough(ind(1.0, 2.0), AngularPart::Harmonic { k: 1, offset: 2.0 }), vec![gauss(2)], e("2", "2", "2"));
            b.add("cap-omega", 2, rough(ind(0.5, 2.0), AngularPart::Cap { height: 0.0 }), vec![harmonic(GAUSS, 2, 1.5)], e("3", "2", "3"));
            b.add("sup-omega", 2, rough(Profile::power_exp(0.0, 1.0), AngularPart::Harmonic { k: 3, offset: 1.0 }), vec![cut(2, 0.0, 1.0)], e("2", "3", "1"));
            b.add("zonal-omega", 3, rough(ind(1.0, 2.0), AngularPart::Zonal { coeffs: vec![1.0, 1.0] }), vec![gauss(3)], e("2", "2", "2"));
            b.add("cap3-omega", 3, rough(ind(0.25, 1.0), AngularPart::Cap { height: 0.5 }), vec![cap(3, GAUSS, -0.2)], e("3", "3/2", "4"));
            b.add("annulus", 2, rough(ind(1.0, 4.0), AngularPart::Harmonic { k: 2, offset: 1.5 }), vec![annulus(2, 0.5, 1.5)], e("4", "4", "4/3"));
            b.add("neg-omega", 2, rough(ind(1.0, 2.0), AngularPart::Harmonic { k: 1, offset: 0.0 }), vec![pg(2, 1.0, 1.0, 2.0)], e("2", "1", "2"));
        }
        TheoremId::T1_3 => {
            let e = |m, p, a, c| ex(&[("m", m), ("p", p), ("pt1", a), ("pt2", c)]);
            b.add("n1m2-harmonic", 1, rad(ind(1.0, 2.0)), vec![harmonic(GAUSS, 2, 1.5)], e("2", "2", "2", "2"));
            b.add("n1m2-cap", 1, rad(ind(0.5, 2.0)), vec![cap(2, GAUSS, 0.2)], e("2", "3", "1", "3/2"));
            b.add("n1m2-ball", 1, rad(Profile::power_exp(0.0, 1.0)), vec![cut(2, 0.0, 1.0)], e("2", "4", "2", "2"));
            b.add("n1m3-zonal", 1, rad(ind(1.0, 2.0)), vec![zonal(GAUSS, &[1.0, 0.0, 1.0])], e("3", "2", "2", "2"));
            b.add("n1m3-cap", 1, rad(ind(0.5, 1.0)), vec![cap(3, RadialPart::PowerCutoff { a: 0.0, radius: 2.0 }, 0.0)], e("3", "4", "1", "4"));
            b.add("n2m2-gauss", 2, rad(ind(1.0, 2.0)), vec![gauss(4)], e("2", "2", "2", "2"));
            b.add("n2m2-annulus", 2, rad(ind(0.5, 3.0)), vec![annulus(4, 0.5, 2.0)], e("2", "3", "3", "3/2"));
            b.add("n1m2-singular", 1, rad(ind(1.0, 3.0)), vec![harmonic(RadialPart::PowerGaussian { a: -0.5, b: 1.0, c: 1.0 }, 1, 2.0)], e("2", "2", "1", "2"));
        }
        TheoremId::T1_4 => {
            let e = |p: &str, pt: &str, ps: &[&str], pts: &[&str]| {
                ex(&[("m", &ps.len().to_string()), ("p", p), ("pt", pt)]).with_list("p_i", ps).with_list("pt_i", pts)
            };
            b.add("gauss-gauss", 2, rad(ind(1.0, 2.0)), vec![gauss(2), gauss(2)], e("1", "1", &["2", "2"], &["2", "2"]));
            b.add("ball-gauss", 2, rad(ind(0.5, 2.0)), vec![cut(2, 0.0, 1.0), gauss(2)], e("2", "1", &["3", "6"], &["2", "2"]));
            b.add("powexp", 2, rad(Profile::power_exp(1.0, 1.0)), vec![pg(2, 1.0, 1.0, 2.0), gauss(2)], e("1", "2", &["2", "2"], &["4", "4"]));
            b.add("annulus", 2, rad(ind(1.0, 3.0)), vec![annulus(2, 0.5, 1.5), cut(2, 0.5, 2.0)], e("3/2", "1", &["3", "3"], &["3/2", "3"]));
            b.add("n3", 3, rad(ind(1.0, 2.0)), vec![gauss(3), cut(3, 0.0, 1.5)], e("1", "1", &["2", "2"], &["2", "2"]));
            b.add("m3", 2, rad(ind(1.0, 2.0)), vec![gauss(2), gauss(2), cut(2, 0.0, 1.0)], e("1", "1", &["3", "3", "3"], &["3", "3", "3"]));
            b.add("m1", 2, rad(ind(1.0, 2.0)), vec![gauss(2)], e("2", "2", &["2"], &["2"]));
            b.add("tail-kernel", 2, rad(Profile::power_cutoff(-2.0, 1.0, None)), vec![gauss(2), pg(2, 0.5, 2.0, 1.0)], e("2", "2", &["4", "4"], &["4", "4"]));
        }
        TheoremId::T1_5 => {
            let e = |al, q, p1, p2, pt1| ex(&[("alpha", al), ("q", q), ("p1", p1), ("p2", p2), ("pt1", pt1)]);
            b.add("gauss", 2, KernelSpec::general(ind(1.0, 2.0)), vec![gauss(2)], e("0", "2", "2", "2", "2"));
            b.add("ball", 2, KernelSpec::general(ind(1.0, 2.0)), vec![cut(2, 0.0, 1.0)], e("1/2", "1", "3", "2", "3"));
            b.add("powexp", 2, KernelSpec::general(Profile::power_exp(1.0, 1.0)), vec![gauss(2)], e("-1/2", "2", "2", "3", "2"));
            b.add("annulus", 2, KernelSpec::general(ind(0.5, 1.0)), vec![annulus(2, 0.5, 2.0)], e("1", "3", "1", "2", "4"));
            b.add("n3", 3, KernelSpec::general(ind(1.0, 4.0)), vec![gauss(3)], e("0", "2", "2", "2", "1"));
            b.add("power-gauss", 2, KernelSpec::general(ind(1.0, 2.0)), vec![pg(2, 1.0, 1.0, 2.0)], e("-1", "4", "2", "2", "2"));
            b.add("tail", 2, KernelSpec::general(Profile::power_cutoff(-2.0, 1.0, None)), vec![gauss(2)], e("0", "1", "2", "4", "2"));
            b.add("n4", 4, KernelSpec::general(ind(1.0, 2.0)), vec![cut(4, 0.0, 1.5)], e("1/2", "2", "2", "2", "2"));
        }
        TheoremId::T3_1a | TheoremId::T3_1b => {
            let e = |be, p1, p2, q, s, al, ga| {
                ex(&[("beta", be), ("p1", p1), ("p2", p2), ("q", q), ("s", s), ("alpha", al), ("gamma", ga)])
            };
            let radial_only = t == TheoremId::T3_1b;
            let h = |f: FieldSpec| if radial_only { gauss(2) } else { f };
            b.add("gauss", 2, rad(ind(1.0, 2.0)), vec![gauss(2)], e("1/2", "2", "4", "2", "4/3", "0", "0"));
            b.add("harmonic", 2, rad(ind(1.0, 2.0)), vec![h(harmonic(GAUSS, 1, 1.5))], e("1/2", "2", "4", "4", "4/3", "0", "0"));
            b.add("alpha1", 2, rad(ind(0.5, 2.0)), vec![cut(2, 0.0, 1.0)], e("1", "2", "4", "1", "4/3", "1", "0"));
            b.add("gamma2", 2, rad(Profile::power_exp(1.0, 1.0)), vec![gauss(2)], e("1", "2", "4", "3", "4/3", "2", "2"));
            b.add("beta0", 2, rad(ind(1.0, 3.0)), vec![h(cap(2, GAUSS, 0.0))], e("0", "2", "2", "2", "1", "0", "0"));
            b.add("n3", 3, rad(ind(1.0, 2.0)), vec![if radial_only { gauss(3) } else { zonal(GAUSS, &[1.0, 1.0, 1.0]) }], e("1", "2", "3", "3", "6/5", "1", "0"));
            b.add("annulus", 2, rad(ind(0.5, 1.0)), vec![annulus(2, 0.5, 2.0)], e("1/2", "3/2", "3", "1", "3/2", "1/2", "3/2"));
            b.add("n4", 4, rad(ind(1.0, 2.0)), vec![gauss(4)], e("1", "2", "4", "2", "4/3", "0", "0"));
            b.add("ball-q4", 2, rad(Profile::power_exp(0.0, 2.0)), vec![cut(2, 0.0, 2.0)], e("1/2", "1", "2", "1", "2", "0", "1"));
        }
        TheoremId::T3_2 => {
            let e = |be, p1, p2, q, al, ga| ex(&[("beta", be), ("p1", p1), ("p2", p2), ("q", q), ("alpha", al), ("gamma", ga)]);
            b.add("gauss", 2, rad(ind(1.0, 2.0)), vec![gauss(2)], e("1/2", "2", "4", "2", "0", "0"));
            b.add("ball", 2, rad(ind(1.0, 2.0)), vec![cut(2, 0.0, 1.0)], e("1", "2", "4", "1", "2", "2"));
            b.add("harmonic", 2, rad(ind(0.5, 2.0)), vec![harmonic(GAUSS, 2, 1.5)], e("1/2", "2", "4", "3", "0", "0"));
            b.add("powexp", 2, rad(Profile::power_exp(1.0, 1.0)), vec![gauss(2)], e("0", "2", "2", "2", "0", "0"));
            b.add("n3-cap", 3, rad(ind(1.0, 2.0)), vec![cap(3, GAUSS, 0.0)], e("1", "2", "3", "2", "1", "0"));
            b.add("annulus", 2, rad(ind(1.0, 3.0)), vec![annulus(2, 0.5, 1.5)], e("1/2", "3/2", "3", "1", "1/2", "3/2"));
            b.add("p1-3", 2, rad(ind(1.0, 2.0)), vec![pg(2, 1.0, 1.0, 2.0)], e("1", "3", "3", "1", "4", "1"));
            b.add("n4", 4, rad(ind(1.0, 2.0)), vec![gauss(4)], e("1", "2", "4", "2", "0", "0"));
        }
        TheoremId::T4_1 => {
            let e = |al: &str, q: &str, p: &str, pt: &str, als: &[&str], qs: &[&str], ps: &[&str], pts: &[&str]| {
                ex(&[("m", &ps.len().to_string()), ("alpha", al), ("q", q), ("p", p), ("pt", pt)])
                    .with_list("alpha_i", als)
                    .with_list("q_i", qs)
                    .with_list("p_i", ps)
                    .with_list("pt_i", pts)
            };
            let psi = |fs: &[Profile]| KernelSpec::Psi { factors: fs.to_vec() };
            let i12 = ind(1.0, 2.0);
            b.add("flat", 2, psi(&[i12.clone(), i12.clone()]), vec![gauss(2), gauss(2)], e("0", "1", "1", "1", &["0", "0"], &["2", "2"], &["2", "2"], &["2", "2"]));
            b.add("alpha", 2, psi(&[i12.clone(), i12.clone()]), vec![gauss(2), cut(2, 0.0, 1.0)], e("1", "1", "1", "1", &["1/2", "1/2"], &["2", "2"], &["2", "2"], &["2", "2"]));
            b.add("q-ne-p", 2, psi(&[i12.clone(), ind(0.5, 1.0)]), vec![gauss(2), gauss(2)], e("0", "2", "1", "2", &["0", "0"], &["4", "4"], &["2", "2"], &["4", "4"]));
            b.add("m1-alpha0", 2, psi(&[i12.clone()]), vec![gauss(2)], e("0", "2", "2", "2", &["0"], &["2"], &["2"], &["2"]));
            b.add("m1-alpha", 2, psi(&[Profile::power_exp(0.0, 1.0)]), vec![pg(2, 1.0, 1.0, 2.0)], e("-1/2", "2", "2", "2", &["-1/2"], &["2"], &["2"], &["2"]));
            b.add("nonradial", 2, psi(&[i12.clone(), i12.clone()]), vec![harmonic(GAUSS, 2, 1.5), gauss(2)], e("0", "1", "1", "1", &["0", "0"], &["2", "2"], &["2", "2"], &["2", "2"]));
            b.add("n3", 3, psi(&[i12.clone(), ind(1.0, 3.0)]), vec![gauss(3), gauss(3)], e("1/2", "1", "1", "1", &["1/4", "1/4"], &["2", "2"], &["2", "2"], &["2", "2"]));
            b.add("annulus", 2, psi(&[ind(0.5, 2.0), i12]), vec![annulus(2, 0.5, 2.0), gauss(2)], e("0", "2", "3/2", "2", &["0", "0"], &["4", "4"], &["3", "3"], &["4", "4"]));
        }
        TheoremId::T4_2 => {
            let e = |lam: &str, p: &str, pt: &str, lams: &[&str], ps: &[&str], pts: &[&str]| {
                ex(&[("m", &ps.len().to_string()), ("lambda", lam), ("p", p), ("pt", pt)])
                    .with_list("lambda_i", lams)
                    .with_list("p_i", ps)
                    .with_list("pt_i", pts)
            };
            let psi = |fs: &[Profile]| KernelSpec::Psi { factors: fs.to_vec() };
            let i12 = ind(1.0, 2.0);
            b.add("lambda0", 2, psi(&[i12.clone(), i12.clone()]), vec![gauss(2), gauss(2)], e("0", "1", "1", &["0", "0"], &["2", "2"], &["2", "2"]));
            b.add("lambda-neg", 2, psi(&[i12.clone(), i12.clone()]), vec![gauss(2), gauss(2)], e("-1/2", "1", "1", &["-1/4", "-1/4"], &["2", "2"], &["2", "2"]));
            b.add("ball", 2, psi(&[i12.clone(), ind(0.5, 1.0)]), vec![cut(2, 0.0, 1.0), gauss(2)], e("-1/4", "1", "2", &["-1/4", "0"], &["2", "2"], &["4", "4"]));
            b.add("m1", 2, psi(&[i12.clone()]), vec![gauss(2)], e("-1/4", "2", "2", &["-1/4"], &["2"], &["2"]));
            b.add("m1-powexp", 2, psi(&[Profile::power_exp(1.0, 1.0)]), vec![pg(2, 1.0, 1.0, 2.0)], e("0", "2", "2", &["0"], &["2"], &["2"]));
            b.add("n3", 3, psi(&[i12.clone(), i12.clone()]), vec![gauss(3), cut(3, 0.0, 1.5)], e("-1/3", "1", "1", &["-1/6", "-1/6"], &["2", "2"], &["2", "2"]));
            b.add("p3", 2, psi(&[i12.clone(), ind(1.0, 3.0)]), vec![gauss(2), gauss(2)], e("-1/3", "3/2", "3/2", &["-1/6", "-1/6"], &["3", "3"], &["3", "3"]));
            b.add("annulus", 2, psi(&[ind(0.5, 2.0), i12]), vec![annulus(2, 0.5, 2.0), gauss(2)], e("-1/4", "1", "1", &["0", "-1/4"], &["2", "2"], &["2", "2"]));
        }
        TheoremId::T5_1 | TheoremId::T5_3 => {
            let e = |p, pt| ex(&[("p", p), ("pt", pt)]);
            let k = |p: Profile| if t == TheoremId::T5_1 { KernelSpec::general(p) } else { rad(p) };
            b.add("gauss-flat", 2, k(ind(1.0, 2.0)), vec![gauss(2)], e("2", "2")).growth = power(0.0);
            b.add("gauss-delta", 2, k(ind(1.0, 2.0)), vec![gauss(2)], e("2", "2")).growth = power(-0.5);
            b.add("below-one", 2, k(ind(0.25, 0.5)), vec![gauss(2)], e("2", "2")).growth = power(-0.5);
            b.add("harmonic", 2, k(ind(0.5, 2.0)), vec![harmonic(GAUSS, 2, 1.5)], e("2", "3")).growth = power(-0.5);
            b.add("ball", 2, k(Profile::power_exp(1.0, 1.0)), vec![cut(2, 0.0, 1.0)], e("1", "1")).growth = power(-1.0);
            b.add("n3-cap", 3, k(ind(1.0, 2.0)), vec![cap(3, GAUSS, 0.0)], e("3", "2")).growth = power(-1.0 / 2.0);
            b.add("annulus", 2, k(ind(1.0, 3.0)), vec![annulus(2, 0.5, 1.5)], e("4", "2")).growth = power(-0.25);
            b.add("power-gauss", 2, k(ind(0.5, 1.0)), vec![pg(2, 1.0, 1.0, 2.0)], e("2", "1")).growth = power(0.0);
        }
        TheoremId::T5_2 | TheoremId::T5_4 => {
            let e = |p, pt, p1, pt1, p2, pt2| ex(&[("p", p), ("pt", pt), ("p1", p1), ("pt1", pt1), ("p2", p2), ("pt2", pt2)]);
            let k = |p: Profile| if t == TheoremId::T5_2 { KernelSpec::general(p) } else { rad(p) };
            let add = |b: &mut Builder, label: &str, n: usize, kern: KernelSpec, f: FieldSpec, sym: FieldSpec, g: f64, x: Exponents| {
                let c = b.add(label, n, kern, vec![f], x);
                c.symbol = Some(sym);
                c.growth = power(g);
            };
            add(&mut b, "gauss-log", 2, k(ind(1.0, 2.0)), gauss(2), log_symbol(2, 0.5, 2.0), 0.0, e("1", "1", "2", "2", "2", "2"));
            add(&mut b, "gauss-log-delta", 2, k(ind(1.0, 2.0)), gauss(2), log_symbol(2, 0.5, 2.0), -0.25, e("1", "1", "2", "2", "2", "2"));
            add(&mut b, "const-symbol", 2, k(ind(1.0, 2.0)), gauss(2), FieldSpec::constant(2, 3.0), 0.0, e("1", "1", "2", "2", "2", "2"));
            add(&mut b, "ball", 2, k(ind(0.5, 2.0)), cut(2, 0.0, 1.0), log_symbol(2, 0.25, 1.0), -0.5, e("1", "1", "2", "2", "2", "2"));
            add(&mut b, "below-one", 2, k(ind(0.25, 0.5)), gauss(2), log_symbol(2, 1.0, 4.0), 0.0, e("1", "1", "2", "2", "2", "2"));
            add(&mut b, "p-mixed", 2, k(Profile::power_exp(1.0, 1.0)), gauss(2), log_symbol(2, 0.5, 2.0), 0.0, e("2", "2", "3", "4", "6", "4"));
            add(&mut b, "n3", 3, k(ind(1.0, 2.0)), gauss(3), log_symbol(3, 0.5, 2.0), -0.5, e("1", "1", "2", "2", "2", "2"));
            add(&mut b, "annulus", 2, k(ind(1.0, 3.0)), annulus(2, 0.5, 1.5), log_symbol(2, 0.5, 4.0), -0.25, e("1", "1", "2", "2", "2", "2"));
        }
        _ => {
            // Split commutators on Herz and Morrey-Herz spaces. The local part
            // needs α small, the global part α large, the full commutator
            // a window in between; `shift` places α relative to λ.
            let morrey = matches!(t, TheoremId::T6_2a | TheoremId::T6_2b | TheoremId::T6_2c);
            let part = match t {
                TheoremId::T6_1a | TheoremId::T6_2a => 0,
                TheoremId::T6_1b | TheoremId::T6_2b => 1,
                _ => 2,
            };
            let e = |shift: [Q; 3], q: &str, p: &str, pt: &str, pt1: &str, rr: &str, lam: Q| {
                let lam = if morrey { lam } else { Q::int(0) };
                let alpha = Q(lam.0 + shift[part].0).to_string();
                let x = ex(&[("alpha", &alpha), ("q", q), ("p", p), ("pt", pt), ("pt1", pt1), ("pt2", pt1), ("r", rr)]);
                if morrey {
                    x.with("lambda", &lam.to_string())
                } else {
                    x
                }
            };
            let std = [Q::new(-1, 4), Q::int(1), Q::new(1, 2)];
            let add = |b: &mut Builder, label: &str, n: usize, kern: KernelSpec, f: FieldSpec, sym: FieldSpec, x: Exponents| {
                b.add(label, n, kern, vec![f], x).symbol = Some(sym);
            };
            let sym = log_symbol(2, 0.5, 2.0);
            let (zero, quarter, half) = (Q::int(0), Q::new(1, 4), Q::new(1, 2));
            add(&mut b, "gauss", 2, rad(ind(0.5, 2.0)), gauss(2), sym.clone(), e(std, "2", "4", "2", "4", "3/2", zero));
            add(&mut b, "ball", 2, rad(ind(0.5, 2.0)), cut(2, 0.0, 1.0), sym.clone(), e(std, "1", "3", "3/2", "3", "3/2", quarter));
            add(&mut b, "const-symbol", 2, rad(ind(0.5, 2.0)), gauss(2), FieldSpec::constant(2, 2.0), e(std, "2", "4", "2", "4", "3/2", zero));
            add(&mut b, "powexp", 2, rad(Profile::power_exp(1.0, 1.0)), gauss(2), sym.clone(), e(std, "2", "4", "2", "4", "3/2", quarter));
            add(&mut b, "harmonic", 2, rad(ind(0.5, 2.0)), harmonic(GAUSS, 2, 1.5), sym.clone(), e(std, "2", "4", "2", "4", "3/2", zero));
            add(&mut b, "q3", 2, rad(ind(0.25, 3.0)), pg(2, 1.0, 1.0, 2.0), log_symbol(2, 0.25, 4.0), e(std, "3", "4", "2", "4", "3/2", half));
            add(&mut b, "n3", 3, rad(ind(0.5, 2.0)), gauss(3), log_symbol(3, 0.5, 2.0), e(std, "2", "4", "2", "4", "3/2", zero));
            let narrow = [Q::new(-1, 4), Q::int(1), Q::new(1, 4)];
            add(&mut b, "p2", 2, rad(ind(0.5, 2.0)), gauss(2), sym, e(narrow, "2", "2", "2", "4", "4/3", half));
        }
    }
    b.cases
}

/// All built-in cases for the selected statements.
pub fn builtin_bank(theorems: &[TheoremId]) -> Vec<Case> {
    theorems.iter().flat_map(|t| default_bank(*t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_cases_are_valid() {
        for t in TheoremId::ALL {
            let cases = default_bank(t);
            assert!(cases.len() >= 8, "{t}: {} cases", cases.len());
            for c in &cases {
                c.validate().unwrap_or_else(|e| panic!("{}: {e}", c.id));
            }
        }
    }

    #[test]
    fn case_ids_are_unique() {
        let all = builtin_bank(&TheoremId::ALL);
        let mut ids: Vec<_> = all.iter().map(|c| c.id.clone()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), all.len());
    }

    #[test]
    fn toml_round_trip() {
        let all = builtin_bank(&TheoremId::ALL);
        let text = bank_to_toml(&all).unwrap();
        assert!(text.contains("[[case]]"));
        assert_eq!(parse_bank(&text).unwrap(), all);
    }

    #[test]
    fn rejects_broken_relations() {
        let mut c = default_bank(TheoremId::T3_1a)[0].clone();
        c.exponents.set("gamma", Q::int(1));
        assert!(matches!(c.validate(), Err(Error::Hypothesis { .. })));
        let mut c = default_bank(TheoremId::T1_4)[0].clone();
        c.exponents.set("p", Q::int(2));
        assert!(c.validate().is_err());
        let mut c = default_bank(TheoremId::T6_1a)[0].clone();
        c.exponents.set("alpha", Q::int(1));
        assert!(c.validate().is_err());
        let mut c = default_bank(TheoremId::T3_1b)[1].clone();
        c.fields = vec![harmonic(GAUSS, 1, 1.5)];
        assert!(c.validate().is_err());
        let mut c = default_bank(TheoremId::T5_2)[0].clone();
        c.symbol = None;
        assert!(c.validate().is_err());
    }

    #[test]
    fn split_exponent() {
        let c = &default_bank(TheoremId::T6_1a)[0];
        assert_eq!(c.cmo_exponent().unwrap(), Q::int(4));
        let c = &default_bank(TheoremId::T6_1a)[1];
        assert_eq!(c.cmo_exponent().unwrap(), Q::int(3));
        let c = &default_bank(TheoremId::T6_1a)[7];
        assert_eq!(c.cmo_exponent().unwrap(), Q::int(4));
    }

    #[test]
    fn dilation_keeps_validity() {
        for c in default_bank(TheoremId::T5_2) {
            c.dilated(2.0).validate().unwrap();
        }
    }
}
