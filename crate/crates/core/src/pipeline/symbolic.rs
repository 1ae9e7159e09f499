//! Products of rational powers, `c · Π bᵢ^{eᵢ}`, for constants far too small
//! to expand. Comparisons are decided rigorously from integer bounds on
//! `log₂` of each base.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::exact::{format_rational, int, Rational};

/// Largest result, in bits of numerator plus denominator, that
/// [`Monomial::expand`] will materialize.
pub const EXPANSION_BIT_BUDGET: u64 = 200_000;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Base {
    Num(Rational),
    Var(String),
}

/// `Π bᵢ^{eᵢ}` over positive rational bases and named variables.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Monomial {
    factors: BTreeMap<Base, Rational>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    /// A positive rational constant.
    pub fn num(r: Rational) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::InvalidParameter(format!("monomial bases must be positive, got {r}")));
        }
        let mut m = Monomial::one();
        m.push(Base::Num(r), int(1));
        Ok(m)
    }

    pub fn var(name: &str) -> Self {
        let mut m = Monomial::one();
        m.push(Base::Var(name.to_string()), int(1));
        m
    }

    fn push(&mut self, b: Base, e: Rational) {
        if let Base::Num(r) = &b {
            if r.is_one() {
                return;
            }
        }
        let slot = self.factors.entry(b.clone()).or_insert_with(Rational::zero);
        *slot += e;
        if slot.is_zero() {
            self.factors.remove(&b);
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        for (b, e) in &other.factors {
            out.push(b.clone(), e.clone());
        }
        out
    }

    pub fn pow(&self, e: &Rational) -> Monomial {
        if e.is_zero() {
            return Monomial::one();
        }
        Monomial { factors: self.factors.iter().map(|(b, x)| (b.clone(), x * e)).collect() }
    }

    pub fn powi(&self, e: i64) -> Monomial {
        self.pow(&int(e))
    }

    pub fn inv(&self) -> Monomial {
        self.powi(-1)
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        self.mul(&other.inv())
    }

    pub fn has_vars(&self) -> bool {
        self.factors.keys().any(|b| matches!(b, Base::Var(_)))
    }

    /// Replaces the variable `name` by a monomial.
    pub fn substitute(&self, name: &str, value: &Monomial) -> Monomial {
        let mut out = Monomial::one();
        for (b, e) in &self.factors {
            match b {
                Base::Var(v) if v == name => out = out.mul(&value.pow(e)),
                _ => out.push(b.clone(), e.clone()),
            }
        }
        out
    }

    /// Rigorous bounds `lo ≤ log₂(self) ≤ hi`, each base's logarithm
    /// bracketed through the bit length of its `2^precision`-th power.
    pub fn log2_bounds(&self, precision: u32) -> Option<(Rational, Rational)> {
        let mut lo = Rational::zero();
        let mut hi = Rational::zero();
        for (b, e) in &self.factors {
            let Base::Num(r) = b else { return None };
            let (nl, nh) = log2_int_bounds(r.numer(), precision);
            let (dl, dh) = log2_int_bounds(r.denom(), precision);
            let (bl, bh) = (&nl - &dh, &nh - &dl);
            if e.is_positive() {
                lo += e * &bl;
                hi += e * &bh;
            } else {
                lo += e * &bh;
                hi += e * &bl;
            }
        }
        Some((lo, hi))
    }

    /// Approximate `log₁₀`, or `None` with variables present.
    pub fn log10(&self) -> Option<f64> {
        let mut acc = 0.0;
        for (b, e) in &self.factors {
            let Base::Num(r) = b else { return None };
            let l = big_log10(r.numer()) - big_log10(r.denom());
            acc += l * e.to_f64().unwrap_or(f64::NAN);
        }
        Some(acc)
    }

    /// Compares two variable-free monomials. `None` if `log₂` of the ratio
    /// cannot be separated from zero at the highest precision tried.
    pub fn compare(&self, other: &Monomial) -> Option<Ordering> {
        let q = self.div(other);
        if q.factors.is_empty() {
            return Some(Ordering::Equal);
        }
        for precision in [6u32, 10, 14, 18] {
            let (lo, hi) = q.log2_bounds(precision)?;
            if hi.is_negative() {
                return Some(Ordering::Less);
            }
            if lo.is_positive() {
                return Some(Ordering::Greater);
            }
        }
        if let Some(v) = q.expand(EXPANSION_BIT_BUDGET) {
            return Some(v.cmp(&int(1)));
        }
        None
    }

    pub fn lt(&self, other: &Monomial) -> Option<bool> {
        self.compare(other).map(|o| o == Ordering::Less)
    }

    /// The exact value when every exponent is an integer and the result fits
    /// in `budget` bits.
    pub fn expand(&self, budget: u64) -> Option<Rational> {
        let mut size = 0u64;
        for (b, e) in &self.factors {
            let Base::Num(r) = b else { return None };
            if !e.is_integer() {
                return None;
            }
            let bits = r.numer().bits() + r.denom().bits();
            size = size.saturating_add(bits.saturating_mul(e.numer().abs().to_u64()?));
        }
        if size > budget {
            return None;
        }
        let mut v = int(1);
        for (b, e) in &self.factors {
            let Base::Num(r) = b else { return None };
            let k = e.numer().to_i64()?;
            let p = num_traits::pow(r.clone(), k.unsigned_abs() as usize);
            v = if k >= 0 { v * p } else { v / p };
        }
        Some(v)
    }
}

/// `log₂ n ∈ [(b-1)/K, b/K]` with `b` the bit length of `n^K`, `K = 2^precision`.
fn log2_int_bounds(n: &BigInt, precision: u32) -> (Rational, Rational) {
    if n.is_one() {
        return (Rational::zero(), Rational::zero());
    }
    if n.is_positive() && (n & (n - BigInt::one())).is_zero() {
        let k = int(n.bits() - 1);
        return (k.clone(), k);
    }
    let k = 1u64 << precision;
    let b = num_traits::pow(n.clone(), k as usize).bits();
    (Rational::new(BigInt::from(b - 1), BigInt::from(k)), Rational::new(BigInt::from(b), BigInt::from(k)))
}

fn big_log10(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap_or(f64::NAN).log10();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift as usize;
    top.to_f64().unwrap_or(f64::NAN).log10() + shift as f64 * std::f64::consts::LOG10_2
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (b, e) in &self.factors {
            if !first {
                write!(f, " * ")?;
            }
            first = false;
            let base = match b {
                Base::Num(r) if r.is_integer() => format_rational(r),
                Base::Num(r) => format!("({})", format_rational(r)),
                Base::Var(v) => v.clone(),
            };
            if e.is_one() {
                write!(f, "{base}")?;
            } else {
                write!(f, "{base}^({})", format_rational(e))?;
            }
        }
        Ok(())
    }
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Monomial", 3)?;
        st.serialize_field("expr", &self.to_string())?;
        st.serialize_field("log10", &self.log10())?;
        st.serialize_field("exact", &self.expand(4096).map(|r| format_rational(&r)))?;
        st.end()
    }
}

/// `⌈x⌉` for a variable-free monomial; exact when `x` expands within the
/// budget, otherwise kept symbolic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Ceiling {
    pub of: Monomial,
    #[serde(serialize_with = "ser_big_opt")]
    pub exact: Option<BigInt>,
}

fn ser_big_opt<S: Serializer>(v: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.as_ref().map(|b| b.to_string()).serialize(s)
}

impl Ceiling {
    pub fn new(of: Monomial) -> Self {
        let exact = of.expand(EXPANSION_BIT_BUDGET).map(|r| r.numer().div_ceil(r.denom()));
        Ceiling { of, exact }
    }

    /// The exact ceiling as a monomial if known, else the pre-ceiling value.
    pub fn value(&self) -> Monomial {
        match &self.exact {
            Some(b) if b.is_positive() => Monomial::num(Rational::from_integer(b.clone())).expect("positive"),
            _ => self.of.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::exact::ratio;

    #[test]
    fn algebra_and_comparison() {
        let half = Monomial::num(ratio(1, 2)).unwrap();
        let a = half.powi(1600).mul(&Monomial::num(ratio(1, 1000)).unwrap());
        let b = half.powi(4);
        assert_eq!(a.lt(&b), Some(true));
        assert_eq!(b.lt(&a), Some(false));
        assert_eq!(a.compare(&a), Some(Ordering::Equal));
        // 3^(1/2) vs 2^(3/4): 1.732 > 1.682
        let x = Monomial::num(int(3)).unwrap().pow(&ratio(1, 2));
        let y = Monomial::num(int(2)).unwrap().pow(&ratio(3, 4));
        assert_eq!(x.compare(&y), Some(Ordering::Greater));
        assert_eq!(half.powi(3).expand(100), Some(ratio(1, 8)));
        assert_eq!(half.powi(10).div(&half.powi(10)), Monomial::one());
    }

    #[test]
    fn ceiling_and_substitution() {
        let c = Ceiling::new(Monomial::num(ratio(7, 2)).unwrap());
        assert_eq!(c.exact, Some(BigInt::from(4)));
        let f = Monomial::var("x").powi(-2).mul(&Monomial::num(int(3)).unwrap());
        let v = f.substitute("x", &Monomial::num(int(2)).unwrap());
        assert_eq!(v.expand(64), Some(ratio(3, 4)));
        assert_eq!(f.to_string(), "3 * x^(-2)");
    }
}
