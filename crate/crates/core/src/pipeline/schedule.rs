//! Parameter schedules for the compression pipeline.
//!
//! `desk` schedules hold directly usable thresholds. `paper` schedules hold
//! the exact constant chain of the main theorem as symbolic monomials; they
//! document the proof's parameters and are not runnable.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::symbolic::{Ceiling, Monomial};
use crate::error::{Error, Result};
use crate::model::exact::{int, ratio, Rational};

/// `ε₂(x) = coeff · x^(-exp)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Eps2Fn {
    #[serde(with = "crate::model::exact::serde_rational")]
    pub coeff: Rational,
    #[serde(with = "crate::model::exact::serde_rational", default = "zero")]
    pub exp: Rational,
}

fn zero() -> Rational {
    Rational::zero()
}

impl Eps2Fn {
    pub fn constant(c: Rational) -> Self {
        Eps2Fn { coeff: c, exp: Rational::zero() }
    }

    /// Value at an integer part count; requires an integer exponent.
    pub fn at(&self, x: usize) -> Result<Rational> {
        if !self.exp.is_integer() {
            return Err(Error::InvalidParameter("eps2 exponent must be an integer for exact evaluation".into()));
        }
        let e = self.exp.numer().try_into().map_err(|_| Error::Overflow("eps2 exponent".into()))?;
        let xr = int(x.max(1) as u64);
        let p: i32 = e;
        let pw = num_traits::pow(xr, p.unsigned_abs() as usize);
        Ok(if p >= 0 { &self.coeff / pw } else { &self.coeff * pw })
    }

    pub fn symbolic(&self, x: &Monomial) -> Result<Monomial> {
        Ok(Monomial::num(self.coeff.clone())?.mul(&x.pow(&-self.exp.clone())))
    }
}

/// Runnable thresholds. Every `*_coeff` and `*_threshold` stands for a power of
/// δ or ε₁′ in the proof, kept as an independent number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeskSchedule {
    /// Target ε₁ of the output: bound on the fraction of pairs outside
    /// quasirandom parts (Γ).
    #[serde(with = "crate::model::exact::serde_rational")]
    pub eps1: Rational,
    /// ε₂ as a function of the number of pair parts.
    pub eps2: Eps2Fn,
    /// dev₂,₃ ε₁ used to classify the input's triads.
    #[serde(with = "crate::model::exact::serde_rational")]
    pub eps1_dblprime: Rational,
    /// dev₂ ε₂ used for the input's pair parts.
    #[serde(with = "crate::model::exact::serde_rational")]
    pub eps2_dblprime: Rational,
    /// Similarity tolerance of the clustering.
    #[serde(with = "crate::model::exact::serde_rational")]
    pub delta: Rational,
    /// Density margin of F₀/F₁.
    #[serde(with = "crate::model::exact::serde_rational")]
    pub f_val: Rational,
    /// Ψ threshold `coeff · ℓ³ · t`.
    #[serde(with = "crate::model::exact::serde_rational")]
    pub psi_coeff: Rational,
    /// Exception threshold of the clustering: color-2 degree at least `√eps · |U_ij|`.
    #[serde(with = "crate::model::exact::serde_rational")]
    pub packing_eps: Rational,
    /// A cluster is nontrivial when `|W^u| ≥ coeff · ℓ / m_ij`.
    #[serde(with = "crate::model::exact::serde_rational")]
    pub nontrivial_coeff: Rational,
    /// Ω₂ keeps cells with at most `coeff · |cell|` F_err part triples.
    #[serde(with = "crate::model::exact::serde_rational")]
    pub omega2_coeff: Rational,
    /// Ω₃ keeps cells with at most `coeff · |cell|` troublesome triples.
    #[serde(with = "crate::model::exact::serde_rational")]
    pub omega3_coeff: Rational,
    /// Majority share required of a cell's color; `1 - f_val` when absent.
    #[serde(with = "crate::model::exact::serde_rational_opt")]
    pub hom_threshold: Option<Rational>,
    /// Share of `E^σ` a split triad needs to count as homogeneous; `1 - f_val` when absent.
    #[serde(with = "crate::model::exact::serde_rational_opt")]
    pub sigma_threshold: Option<Rational>,
    /// μ of the homogeneity reports; `f_val` when absent.
    #[serde(with = "crate::model::exact::serde_rational_opt")]
    pub mu: Option<Rational>,
    /// Parts per class in the output; `m_max²` when absent.
    pub ell1: Option<usize>,
    /// Largest admissible cluster count; exceeding it is reported.
    pub m_cap: Option<usize>,
    /// Density tolerance of the verified splits; `delta` when absent.
    #[serde(with = "crate::model::exact::serde_rational_opt")]
    pub split_delta: Option<Rational>,
    pub max_attempts: usize,
    /// VC₂ bound assumed for the input, used to audit the clusterings for
    /// `U(k)` copies.
    pub k: Option<usize>,
    pub t0: Option<usize>,
    #[serde(rename = "D")]
    pub d: Option<u32>,
}

impl Default for DeskSchedule {
    fn default() -> Self {
        DeskSchedule {
            eps1: ratio(1, 10),
            eps2: Eps2Fn::constant(ratio(1, 10)),
            eps1_dblprime: int(128),
            eps2_dblprime: ratio(1, 10),
            delta: ratio(1, 10),
            f_val: ratio(1, 10),
            psi_coeff: ratio(1, 10),
            packing_eps: ratio(1, 100),
            nontrivial_coeff: ratio(3, 10),
            omega2_coeff: ratio(1, 10),
            omega3_coeff: ratio(1, 2),
            hom_threshold: None,
            sigma_threshold: None,
            mu: None,
            ell1: None,
            m_cap: None,
            split_delta: None,
            max_attempts: 8,
            k: None,
            t0: None,
            d: None,
        }
    }
}

impl DeskSchedule {
    pub fn validate(&self) -> Result<()> {
        let one = int(1);
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.delta.is_positive() && self.delta <= self.f_val && self.f_val < one) {
            return bad("desk schedule needs 0 < delta <= f_val < 1");
        }
        if self.ell1 == Some(0) {
            return bad("ell1 must be at least 1");
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be at least 1");
        }
        for (name, v) in [
            ("eps1", &self.eps1),
            ("eps1_dblprime", &self.eps1_dblprime),
            ("eps2_dblprime", &self.eps2_dblprime),
            ("psi_coeff", &self.psi_coeff),
            ("packing_eps", &self.packing_eps),
            ("nontrivial_coeff", &self.nontrivial_coeff),
            ("omega2_coeff", &self.omega2_coeff),
            ("omega3_coeff", &self.omega3_coeff),
        ] {
            if v.is_negative() {
                return Err(Error::InvalidParameter(format!("{name} must be non-negative")));
            }
        }
        if !self.eps2.coeff.is_positive() {
            return bad("eps2 coefficient must be positive");
        }
        Ok(())
    }

    pub fn hom_threshold(&self) -> Rational {
        self.hom_threshold.clone().unwrap_or_else(|| int(1) - &self.f_val)
    }

    pub fn sigma_threshold(&self) -> Rational {
        self.sigma_threshold.clone().unwrap_or_else(|| int(1) - &self.f_val)
    }

    pub fn mu(&self) -> Rational {
        self.mu.clone().unwrap_or_else(|| self.f_val.clone())
    }

    pub fn split_delta(&self) -> Rational {
        self.split_delta.clone().unwrap_or_else(|| self.delta.clone())
    }
}

/// Inputs of [`derive_paper_schedule`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaperInputs {
    #[serde(with = "crate::model::exact::serde_rational")]
    pub eps1: Rational,
    pub k: u32,
    #[serde(rename = "D")]
    pub d: u32,
    /// Stand-in for the packing constant `c₁`.
    #[serde(with = "crate::model::exact::serde_rational")]
    pub c1: Rational,
    #[serde(default = "default_eps2")]
    pub eps2: Eps2Fn,
    #[serde(default)]
    pub t0: Option<u64>,
}

fn default_eps2() -> Eps2Fn {
    Eps2Fn { coeff: int(1), exp: int(1) }
}

/// One inequality of the constant chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainCheck {
    pub relation: String,
    /// `None` when the comparison could not be decided.
    pub holds: Option<bool>,
}

/// The symbolic constant chain of the main theorem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PaperSchedule {
    pub inputs: PaperInputs,
    /// `f(ε₁) = ε₁^{1/D}`.
    pub f_eps1: Monomial,
    pub tau1: Monomial,
    pub delta: Monomial,
    pub eps1_prime: Monomial,
    pub m: Ceiling,
    pub eps1_dblprime: Monomial,
    /// `ℓ₁ = ⌈δ⁻⁴ m⁴⌉`, with `m` replaced by its pre-ceiling value when `m`
    /// is not expanded.
    pub ell1: Ceiling,
    /// `ε₂′(x)` in the variable `x`.
    pub eps2_prime: Monomial,
    /// `ε₂″(x)` in the variable `x`.
    pub eps2_dblprime: Monomial,
    pub t0: Option<u64>,
    pub checks: Vec<ChainCheck>,
}

impl PaperSchedule {
    pub fn chain_holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds == Some(true))
    }
}

/// The constants of the main theorem's proof from `(ε₁, k, D, c₁)`:
/// `τ₁ = ε₁^{4D}`, `δ = τ₁⁴⁰⁰/1000`, `ε₁′ = (δ/8c₁)^{2k+1000}`,
/// `m = ⌈2c₁(δ/8)^{-2k-2}⌉`, `ε₁″ = ε₁′²/1000`, `ℓ₁ = ⌈δ⁻⁴m⁴⌉`,
/// `ε₂′(x) = ε₁″ ε₂(x) ε₂(2⁴δ^{-8k-10})` and `ε₂″(x) = ε₂(δ⁻⁴m⁴) ε₂′(x)⁵/4`.
pub fn derive_paper_schedule(inputs: &PaperInputs) -> Result<PaperSchedule> {
    let PaperInputs { eps1, k, d, c1, eps2, t0 } = inputs;
    if !(eps1.is_positive() && *eps1 < int(1)) {
        return Err(Error::InvalidParameter("eps1 must lie in (0, 1)".into()));
    }
    if !c1.is_positive() {
        return Err(Error::InvalidParameter("c1 must be positive".into()));
    }
    if *d == 0 {
        return Err(Error::InvalidParameter("D must be at least 1".into()));
    }
    let k = *k as i64;
    let num = |r: Rational| Monomial::num(r);
    let e1 = num(eps1.clone())?;
    let f_eps1 = e1.pow(&ratio(1, *d as u64));
    let tau1 = e1.powi(4 * *d as i64);
    let thousandth = num(ratio(1, 1000))?;
    let delta = tau1.powi(400).mul(&thousandth);
    let c1m = num(c1.clone())?;
    let eighth = num(ratio(1, 8))?;
    let eps1_prime = delta.mul(&eighth).div(&c1m).powi(2 * k + 1000);
    let m = Ceiling::new(num(int(2))?.mul(&c1m).mul(&delta.mul(&eighth).powi(-2 * k - 2)));
    let eps1_dblprime = eps1_prime.powi(2).mul(&thousandth);
    let ell1 = Ceiling::new(delta.powi(-4).mul(&m.value().powi(4)));
    let x = Monomial::var("x");
    let inner = num(int(16))?.mul(&delta.powi(-8 * k - 10));
    let eps2_prime = eps1_dblprime.mul(&eps2.symbolic(&x)?).mul(&eps2.symbolic(&inner)?);
    let eps2_dblprime = eps2
        .symbolic(&delta.powi(-4).mul(&m.value().powi(4)))?
        .mul(&eps2_prime.powi(5))
        .mul(&num(ratio(1, 4))?);

    let check = |rel: &str, a: &Monomial, b: &Monomial| ChainCheck { relation: rel.to_string(), holds: a.lt(b) };
    let checks = vec![
        check("eps1'' < eps1'", &eps1_dblprime, &eps1_prime),
        check("eps1' < delta", &eps1_prime, &delta),
        check("delta < tau1", &delta, &tau1),
        check("tau1 < eps1", &tau1, &e1),
        check("tau1 < eps1^(1/D)", &tau1, &f_eps1),
    ];
    Ok(PaperSchedule {
        inputs: inputs.clone(),
        f_eps1,
        tau1,
        delta,
        eps1_prime,
        m,
        eps1_dblprime,
        ell1,
        eps2_prime,
        eps2_dblprime,
        t0: *t0,
        checks,
    })
}

/// A schedule file: runnable desk thresholds or paper-mode inputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ScheduleFile {
    Desk(DeskSchedule),
    Paper(PaperInputs),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TuningSchedule {
    Desk(DeskSchedule),
    Paper(Box<PaperSchedule>),
}

impl TuningSchedule {
    pub fn from_file(f: ScheduleFile) -> Result<Self> {
        match f {
            ScheduleFile::Desk(d) => {
                d.validate()?;
                Ok(TuningSchedule::Desk(d))
            }
            ScheduleFile::Paper(p) => Ok(TuningSchedule::Paper(Box::new(derive_paper_schedule(&p)?))),
        }
    }

    pub fn desk(&self) -> Result<&DeskSchedule> {
        match self {
            TuningSchedule::Desk(d) => Ok(d),
            TuningSchedule::Paper(_) => Err(Error::Precondition(
                "paper-mode schedules hold symbolic constants and cannot drive the pipeline; use mode \"desk\"".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_for_half() {
        let s = derive_paper_schedule(&PaperInputs {
            eps1: ratio(1, 2),
            k: 1,
            d: 1,
            c1: int(1),
            eps2: default_eps2(),
            t0: None,
        })
        .unwrap();
        assert!(s.chain_holds(), "{:?}", s.checks);
        assert_eq!(s.tau1.expand(64), Some(ratio(1, 16)));
        assert!(s.m.exact.is_some());
    }

    #[test]
    fn desk_defaults_validate() {
        DeskSchedule::default().validate().unwrap();
        let mut d = DeskSchedule::default();
        d.delta = ratio(1, 5);
        assert!(d.validate().is_err());
        let f: ScheduleFile = serde_json::from_str(r#"{"mode":"desk","ell1":4}"#).unwrap();
        assert!(TuningSchedule::from_file(f).unwrap().desk().is_ok());
        let f: ScheduleFile = serde_json::from_str(r#"{"mode":"paper","eps1":"1/2","k":1,"D":1,"c1":"1"}"#).unwrap();
        assert!(TuningSchedule::from_file(f).unwrap().desk().is_err());
    }

    #[test]
    fn eps2_values() {
        let f = Eps2Fn { coeff: int(1), exp: int(2) };
        assert_eq!(f.at(4).unwrap(), ratio(1, 16));
        assert_eq!(Eps2Fn::constant(ratio(1, 10)).at(7).unwrap(), ratio(1, 10));
    }
}
