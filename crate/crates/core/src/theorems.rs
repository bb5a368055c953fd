//! Theorem identifiers and exact rational exponent tuples.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TheoremId {
    T1_1,
    T1_2,
    T1_3,
    T1_4,
    T1_5,
    T3_1a,
    T3_1b,
    T3_2,
    T4_1,
    T4_2,
    T5_1,
    T5_2,
    T5_3,
    T5_4,
    T6_1a,
    T6_1b,
    T6_1c,
    T6_2a,
    T6_2b,
    T6_2c,
}

impl TheoremId {
    pub const ALL: [TheoremId; 20] = [
        TheoremId::T1_1,
        TheoremId::T1_2,
        TheoremId::T1_3,
        TheoremId::T1_4,
        TheoremId::T1_5,
        TheoremId::T3_1a,
        TheoremId::T3_1b,
        TheoremId::T3_2,
        TheoremId::T4_1,
        TheoremId::T4_2,
        TheoremId::T5_1,
        TheoremId::T5_2,
        TheoremId::T5_3,
        TheoremId::T5_4,
        TheoremId::T6_1a,
        TheoremId::T6_1b,
        TheoremId::T6_1c,
        TheoremId::T6_2a,
        TheoremId::T6_2b,
        TheoremId::T6_2c,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::T1_1 => "1.1",
            TheoremId::T1_2 => "1.2",
            TheoremId::T1_3 => "1.3",
            TheoremId::T1_4 => "1.4",
            TheoremId::T1_5 => "1.5",
            TheoremId::T3_1a => "3.1a",
            TheoremId::T3_1b => "3.1b",
            TheoremId::T3_2 => "3.2",
            TheoremId::T4_1 => "4.1",
            TheoremId::T4_2 => "4.2",
            TheoremId::T5_1 => "5.1",
            TheoremId::T5_2 => "5.2",
            TheoremId::T5_3 => "5.3",
            TheoremId::T5_4 => "5.4",
            TheoremId::T6_1a => "6.1a",
            TheoremId::T6_1b => "6.1b",
            TheoremId::T6_1c => "6.1c",
            TheoremId::T6_2a => "6.2a",
            TheoremId::T6_2b => "6.2b",
            TheoremId::T6_2c => "6.2c",
        }
    }

    /// Inequalities stated with an explicit constant (checked as
    /// `ratio ≤ 1 + tol`); the rest hide an absolute constant and are
    /// checked for stability under dilation.
    pub fn is_exact(self) -> bool {
        !matches!(
            self,
            TheoremId::T1_5
                | TheoremId::T5_2
                | TheoremId::T6_1a
                | TheoremId::T6_1b
                | TheoremId::T6_1c
                | TheoremId::T6_2a
                | TheoremId::T6_2b
                | TheoremId::T6_2c
        )
    }

    /// Theorems whose output space is a Herz-type space (dilation-covariant
    /// only for dyadic factors).
    pub fn uses_herz(self) -> bool {
        matches!(
            self,
            TheoremId::T1_5
                | TheoremId::T4_1
                | TheoremId::T6_1a
                | TheoremId::T6_1b
                | TheoremId::T6_1c
                | TheoremId::T6_2a
                | TheoremId::T6_2b
                | TheoremId::T6_2c
        )
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::UnknownTheorem(s.to_string()))
    }
}

impl Serialize for TheoremId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for TheoremId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parse a comma-separated theorem list; an empty string selects nothing.
pub fn parse_theorem_list(s: &str) -> Result<Vec<TheoremId>> {
    if s.trim() == "all" {
        return Ok(TheoremId::ALL.to_vec());
    }
    s.split(',').filter(|x| !x.trim().is_empty()).map(str::parse).collect()
}

/// Exact rational exponent, written `"3/2"` in case files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Q(pub Rational64);

impl Q {
    pub fn new(num: i64, den: i64) -> Self {
        Q(Rational64::new(num, den))
    }

    pub fn int(v: i64) -> Self {
        Q(Rational64::from_integer(v))
    }

    pub fn f(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    /// `1/p`.
    pub fn recip(self) -> Q {
        Q(self.0.recip())
    }

    /// `1/p' = 1 − 1/p`.
    pub fn conj_recip(self) -> Q {
        Q(Rational64::one() - self.0.recip())
    }

    /// `p' = p/(p−1)`, or `None` for `p = 1`.
    pub fn conj(self) -> Option<Q> {
        let d = self.0 - Rational64::one();
        if d.is_zero() {
            None
        } else {
            Some(Q(self.0 / d))
        }
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Q {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        Rational64::from_str(t)
            .map(Q)
            .map_err(|_| Error::Parse(format!("not a rational exponent: {t:?}")))
    }
}

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum QRepr {
    Text(String),
    Int(i64),
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match QRepr::deserialize(d)? {
            QRepr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            QRepr::Int(v) => Ok(Q::int(v)),
        }
    }
}

impl From<i64> for Q {
    fn from(v: i64) -> Self {
        Q::int(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Exponent {
    One(Q),
    Many(Vec<Q>),
}

/// Named exponents of one theorem instance.
///
/// Keys: `p`, `pt` (p̃), `pt1`, `pt2`, `p1`, `p2`, `q`, `s`, `r`, `alpha`,
/// `beta`, `gamma`, `lambda`, `m`, and the lists `p_i`, `pt_i`, `q_i`,
/// `alpha_i`, `lambda_i`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Exponents(pub BTreeMap<String, Exponent>);

impl Exponents {
    pub fn new() -> Self {
        Exponents::default()
    }

    /// Builder form; `v` is a rational literal such as `"3/2"`.
    pub fn with(mut self, key: &str, v: &str) -> Self {
        let q = v.parse().unwrap_or_else(|e| panic!("bad literal {v:?}: {e}"));
        self.0.insert(key.to_string(), Exponent::One(q));
        self
    }

    pub fn with_list(mut self, key: &str, vs: &[&str]) -> Self {
        let qs = vs
            .iter()
            .map(|v| v.parse().unwrap_or_else(|e| panic!("bad literal {v:?}: {e}")))
            .collect();
        self.0.insert(key.to_string(), Exponent::Many(qs));
        self
    }

    pub fn set(&mut self, key: &str, v: Q) {
        self.0.insert(key.to_string(), Exponent::One(v));
    }

    pub fn set_list(&mut self, key: &str, v: Vec<Q>) {
        self.0.insert(key.to_string(), Exponent::Many(v));
    }

    pub fn q(&self, key: &str) -> Result<Q> {
        match self.0.get(key) {
            Some(Exponent::One(q)) => Ok(*q),
            Some(Exponent::Many(_)) => Err(Error::InvalidInput(format!("exponent {key} must be a scalar"))),
            None => Err(Error::InvalidInput(format!("missing exponent {key}"))),
        }
    }

    pub fn f(&self, key: &str) -> Result<f64> {
        self.q(key).map(Q::f)
    }

    pub fn list(&self, key: &str) -> Result<Vec<Q>> {
        match self.0.get(key) {
            Some(Exponent::Many(v)) => Ok(v.clone()),
            Some(Exponent::One(_)) => Err(Error::InvalidInput(format!("exponent {key} must be a list"))),
            None => Err(Error::InvalidInput(format!("missing exponent list {key}"))),
        }
    }

    pub fn list_f(&self, key: &str) -> Result<Vec<f64>> {
        Ok(self.list(key)?.into_iter().map(Q::f).collect())
    }

    /// `m` as an integer.
    pub fn arity(&self) -> Result<usize> {
        let m = self.q("m")?;
        if !m.0.is_integer() || m.0 < Rational64::one() {
            return Err(Error::InvalidInput(format!("m must be a positive integer, got {m}")));
        }
        Ok(*m.0.numer() as usize)
    }
}

/// Exact `Σ 1/x_i`.
pub fn sum_recip(xs: &[Q]) -> Q {
    Q(xs.iter().fold(Rational64::zero(), |acc, x| acc + x.0.recip()))
}

pub fn sum(xs: &[Q]) -> Q {
    Q(xs.iter().fold(Rational64::zero(), |acc, x| acc + x.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for t in TheoremId::ALL {
            assert_eq!(t.as_str().parse::<TheoremId>().unwrap(), t);
        }
        assert!("7.1".parse::<TheoremId>().is_err());
        assert_eq!(parse_theorem_list("").unwrap(), vec![]);
        assert_eq!(parse_theorem_list("1.1, 6.1a").unwrap(), vec![TheoremId::T1_1, TheoremId::T6_1a]);
        assert_eq!(TheoremId::ALL.iter().filter(|t| t.is_exact()).count(), 12);
    }

    #[test]
    fn rational_conjugates() {
        let p: Q = "3/2".parse().unwrap();
        assert_eq!(p.conj(), Some(Q::int(3)));
        assert_eq!(p.conj_recip(), Q::new(1, 3));
        assert_eq!(Q::int(1).conj(), None);
        assert_eq!(Q::int(1).conj_recip(), Q::int(0));
        assert_eq!(sum_recip(&[Q::int(3), Q::int(6)]), Q::new(1, 2));
        assert!("x".parse::<Q>().is_err());
    }

    #[test]
    fn exponent_serde() {
        let e = Exponents::new().with("p", "3/2").with_list("p_i", &["3", "3"]);
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, r#"{"p":"3/2","p_i":["3","3"]}"#);
        let back: Exponents = serde_json::from_str(r#"{"p":"3/2","p_i":["3",3]}"#).unwrap();
        assert_eq!(back, e);
        assert!(e.q("p_i").is_err());
        assert!(e.q("r").is_err());
    }
}
