//! Exact rational helpers.
//!
//! Statistics are computed over integers scaled by a common denominator and
//! only turned into [`Rational`] at the end. Comparisons against fractional
//! powers (fourth and square roots) are decided exactly, either by raising
//! both sides to an integer power or by bracketing the root with integer
//! `nth_root` bounds.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rational {
    Rational::new(num.into(), den.into())
}

pub fn int(v: impl Into<BigInt>) -> Rational {
    Rational::from_integer(v.into())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn pow(r: &Rational, e: u32) -> Rational {
    num_traits::pow(r.clone(), e as usize)
}

/// Parses `"3"`, `"-2/7"` or a plain decimal such as `"0.05"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("0{whole}{frac}").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        Rational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Canonical textual form, `"p/q"` or `"p"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact test of `x^2 <= c * y^2`-style comparisons: `lhs <= sqrt(c) * scale` for
/// non-negative `lhs` and `scale`.
pub fn le_sqrt_times(lhs: &Rational, c: &Rational, scale: &Rational) -> bool {
    if lhs.is_negative() {
        return true;
    }
    lhs * lhs <= c * scale * scale
}

/// Exact test of `lhs >= sqrt(c) * scale` for non-negative operands.
pub fn ge_sqrt_times(lhs: &Rational, c: &Rational, scale: &Rational) -> bool {
    if lhs.is_negative() {
        return false;
    }
    lhs * lhs >= c * scale * scale
}

/// Lower and upper rational bounds on `r^(1/4)` with denominator `q * 2^bits`.
fn fourth_root_bounds(r: &Rational, bits: u32) -> (Rational, Rational, bool) {
    debug_assert!(!r.is_negative());
    let p = r.numer().clone();
    let q = r.denom().clone();
    let scale = BigInt::one() << (4 * bits as usize);
    let radicand = p * &q * &q * &q * scale;
    let root = radicand.nth_root(4);
    let exact = &root * &root * &root * &root == radicand;
    let den = q << bits as usize;
    let lo = Rational::new(root.clone(), den.clone());
    let hi = if exact { lo.clone() } else { Rational::new(root + 1, den) };
    (lo, hi, exact)
}

/// Decides `x <= sum_i t_i^(1/4)` exactly for non-negative `t_i`.
///
/// Bounds are refined until the comparison is settled. If the two sides agree
/// to within `2^-1024`, the comparison is reported as holding.
pub fn le_sum_fourth_roots(x: &Rational, terms: &[Rational]) -> bool {
    if x.is_negative() || x.is_zero() {
        return true;
    }
    let mut bits = 16;
    loop {
        let mut lo = Rational::zero();
        let mut hi = Rational::zero();
        let mut all_exact = true;
        for t in terms {
            let (l, h, e) = fourth_root_bounds(t, bits);
            lo += l;
            hi += h;
            all_exact &= e;
        }
        if x <= &lo {
            return true;
        }
        if x > &hi {
            return false;
        }
        if all_exact || bits >= 1024 {
            return true;
        }
        bits *= 2;
    }
}

/// Decides `x <= c * t^(1/4)` exactly for non-negative operands.
pub fn le_times_fourth_root(x: &Rational, c: &Rational, t: &Rational) -> bool {
    if x.is_negative() || x.is_zero() {
        return true;
    }
    if c.is_zero() {
        return false;
    }
    let y = x / c;
    pow(&y, 4) <= *t
}

/// Sums of many `i128` terms that may exceed `i128`; spills into a `BigInt`.
#[derive(Debug, Default, Clone)]
pub(crate) struct WideSum {
    small: i128,
    big: BigInt,
}

impl WideSum {
    pub fn add(&mut self, v: i128) {
        match self.small.checked_add(v) {
            Some(s) => self.small = s,
            None => {
                self.big += self.small;
                self.small = v;
            }
        }
    }

    pub fn add_square(&mut self, x: i128, times: u32) {
        if x.unsigned_abs() < (1u128 << 62) {
            let sq = x * x;
            for _ in 0..times {
                self.add(sq);
            }
        } else {
            let b = BigInt::from(x);
            self.big += &b * &b * BigInt::from(times);
        }
    }

    pub fn add_big(&mut self, v: &BigInt) {
        self.big += v;
    }

    pub fn total(&self) -> BigInt {
        &self.big + self.small
    }
}

/// Serialized form of a rational: its exact `"p/q"` string and a decimal
/// rendering. Deserialization also accepts a bare string or number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactRational(pub Rational);

impl serde::Serialize for ExactRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Rational", 2)?;
        st.serialize_field("decimal", &to_f64(&self.0))?;
        st.serialize_field("exact", &format_rational(&self.0))?;
        st.end()
    }
}

impl<'de> serde::Deserialize<'de> for ExactRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = serde_json::Value::deserialize(d)?;
        let text = match &v {
            serde_json::Value::String(t) => t.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            serde_json::Value::Object(m) => match m.get("exact") {
                Some(serde_json::Value::String(t)) => t.clone(),
                _ => return Err(D::Error::custom("rational object needs an \"exact\" string")),
            },
            _ => return Err(D::Error::custom("expected a rational")),
        };
        parse_rational(&text).map(ExactRational).map_err(|e| D::Error::custom(format!("{e}")))
    }
}

/// `#[serde(with = ...)]` adapter for a single [`Rational`].
pub mod serde_rational {
    use super::{ExactRational, Rational};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        ExactRational(r.clone()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        Ok(ExactRational::deserialize(d)?.0)
    }
}

/// `#[serde(with = ...)]` adapter for `Vec<Rational>`.
pub mod serde_rational_vec {
    use super::{ExactRational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| ExactRational(r.clone())))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Ok(Vec::<ExactRational>::deserialize(d)?.into_iter().map(|r| r.0).collect())
    }
}

/// `#[serde(with = ...)]` adapter for `Option<Rational>`.
pub mod serde_rational_opt {
    use super::{ExactRational, Rational};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        v.clone().map(ExactRational).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Ok(Option::<ExactRational>::deserialize(d)?.map(|r| r.0))
    }
}
