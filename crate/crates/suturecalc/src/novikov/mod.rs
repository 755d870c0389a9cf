//! The prototype Novikov-type ring: finitely supported sums `Σ c·t^α` with integer
//! coefficients and exact rational exponents, together with truncated series for
//! inverses that do not terminate.

mod expr;
mod series;
mod text;
mod units;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use expr::evaluate_expression;
pub use series::TruncatedSeries;
pub use units::is_unit_ratio;

/// Exponent of `t`. Rationals keep every exponent the calculus produces exact and ordered.
pub type Exponent = Ratio<i64>;

/// Default truncation point for inverses when the caller does not choose one.
pub const DEFAULT_CUTOFF: i64 = 50;

/// A finitely supported element `Σ c·t^α`.
///
/// Terms are kept sorted by strictly increasing exponent and never carry a zero
/// coefficient, so structural equality is ring equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct NovikovElement {
    terms: Vec<(Exponent, BigInt)>,
}

impl NovikovElement {
    pub fn zero() -> Self {
        NovikovElement { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(BigInt::one(), Exponent::zero())
    }

    /// The image of `alpha` under the exponential homomorphism, `t^alpha`.
    pub fn exp_hom(alpha: Exponent) -> Self {
        Self::monomial(BigInt::one(), alpha)
    }

    pub fn monomial(coefficient: BigInt, exponent: Exponent) -> Self {
        if coefficient.is_zero() {
            return Self::zero();
        }
        NovikovElement {
            terms: vec![(exponent, coefficient)],
        }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c.into(), Exponent::zero())
    }

    /// Builds an element from arbitrary `(exponent, coefficient)` pairs, merging repeats.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, BigInt)>,
    {
        let mut acc: BTreeMap<Exponent, BigInt> = BTreeMap::new();
        for (e, c) in terms {
            *acc.entry(e).or_default() += c;
        }
        Self::from_map(acc)
    }

    fn from_map(map: BTreeMap<Exponent, BigInt>) -> Self {
        NovikovElement {
            terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn terms(&self) -> &[(Exponent, BigInt)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_zero() && self.terms[0].1.is_one()
    }

    /// The term of minimal exponent.
    pub fn leading_term(&self) -> Result<(Exponent, &BigInt)> {
        self.terms
            .first()
            .map(|(e, c)| (*e, c))
            .ok_or(Error::NoLeadingTerm)
    }

    /// Minimal exponent, `None` for zero.
    pub fn valuation(&self) -> Option<Exponent> {
        self.terms.first().map(|(e, _)| *e)
    }

    pub fn max_exponent(&self) -> Option<Exponent> {
        self.terms.last().map(|(e, _)| *e)
    }

    /// Invertible in the completed ring: nonzero with leading coefficient ±1.
    pub fn is_unit(&self) -> bool {
        match self.terms.first() {
            Some((_, c)) => c.abs().is_one(),
            None => false,
        }
    }

    /// A single term `±t^α` (the units with a finitely supported inverse).
    pub fn is_monomial_unit(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].1.abs().is_one()
    }

    /// Exact inverse when it is finitely supported, i.e. for `±t^α`.
    pub fn monomial_inverse(&self) -> Option<Self> {
        if !self.is_monomial_unit() {
            return None;
        }
        let (e, c) = &self.terms[0];
        Some(Self::monomial(c.clone(), -*e))
    }

    /// The constant `c` when the element is `c·t^0` (or zero).
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.as_slice() {
            [] => Some(BigInt::zero()),
            [(e, c)] if e.is_zero() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        NovikovElement {
            terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect(),
        }
    }

    /// Multiplies by `t^shift`.
    pub fn shift(&self, shift: Exponent) -> Self {
        NovikovElement {
            terms: self.terms.iter().map(|(e, c)| (*e + shift, c.clone())).collect(),
        }
    }

    /// Keeps only the terms with exponent at most `cutoff`.
    pub fn truncate(&self, cutoff: Exponent) -> Self {
        NovikovElement {
            terms: self
                .terms
                .iter()
                .take_while(|(e, _)| *e <= cutoff)
                .cloned()
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Truncated inverse by leading-term long division.
    ///
    /// The quotient `q` satisfies `x·q − 1 ∈ t^(>cutoff)`. Monomials and inputs whose
    /// division terminates come back exact.
    pub fn invert(&self, cutoff: Exponent) -> Result<TruncatedSeries> {
        if !self.is_unit() {
            return Err(Error::NotAUnit(self.to_string()));
        }
        if let Some(inv) = self.monomial_inverse() {
            return Ok(TruncatedSeries::exact(inv));
        }
        let (lead_exp, lead_coeff) = self.leading_term()?;
        let lead_coeff = lead_coeff.clone();
        let mut quotient = BTreeMap::new();
        let mut remainder = Self::one();
        loop {
            let Some((rem_exp, rem_coeff)) = remainder.terms.first().cloned() else {
                return Ok(TruncatedSeries::exact(Self::from_map(quotient)));
            };
            if rem_exp > cutoff {
                break;
            }
            // lead_coeff is ±1, so the division is exact.
            let q_coeff = &rem_coeff * &lead_coeff;
            let q_exp = rem_exp - lead_exp;
            remainder = &remainder - &Self::monomial(q_coeff.clone(), q_exp).mul_ref(self);
            quotient.insert(q_exp, q_coeff);
        }
        // The neglected tail r/x starts above cutoff - lead_exp.
        Ok(TruncatedSeries::new(Self::from_map(quotient), Some(cutoff - lead_exp)))
    }

    fn add_ref(&self, rhs: &Self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < rhs.terms.len() {
            let (ea, ca) = &self.terms[i];
            let (eb, cb) = &rhs.terms[j];
            match ea.cmp(eb) {
                std::cmp::Ordering::Less => {
                    out.push((*ea, ca.clone()));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((*eb, cb.clone()));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = ca + cb;
                    if !c.is_zero() {
                        out.push((*ea, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&rhs.terms[j..]);
        NovikovElement { terms: out }
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        let mut acc: BTreeMap<Exponent, BigInt> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                *acc.entry(*ea + *eb).or_default() += ca * cb;
            }
        }
        Self::from_map(acc)
    }

    fn neg_ref(&self) -> Self {
        NovikovElement {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl<'a> $trait<&'a NovikovElement> for &'a NovikovElement {
            type Output = NovikovElement;
            fn $method(self, rhs: &'a NovikovElement) -> NovikovElement {
                $body(self, rhs)
            }
        }
        impl $trait for NovikovElement {
            type Output = NovikovElement;
            fn $method(self, rhs: NovikovElement) -> NovikovElement {
                $body(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &NovikovElement, b: &NovikovElement| a.add_ref(b));
forward_binop!(Sub, sub, |a: &NovikovElement, b: &NovikovElement| a
    .add_ref(&b.neg_ref()));
forward_binop!(Mul, mul, |a: &NovikovElement, b: &NovikovElement| a.mul_ref(b));

impl Neg for NovikovElement {
    type Output = NovikovElement;
    fn neg(self) -> NovikovElement {
        self.neg_ref()
    }
}

impl Neg for &NovikovElement {
    type Output = NovikovElement;
    fn neg(self) -> NovikovElement {
        self.neg_ref()
    }
}

impl fmt::Debug for NovikovElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NovikovElement({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Exponent {
        Exponent::new(n, d)
    }

    fn t(e: i64) -> NovikovElement {
        NovikovElement::exp_hom(q(e, 1))
    }

    #[test]
    fn exp_hom_examples() {
        assert!(NovikovElement::exp_hom(q(0, 1)).is_one());
        let half = NovikovElement::exp_hom(q(1, 2));
        assert_eq!(&half * &half, t(1));
        let x = NovikovElement::exp_hom(q(-3, 4));
        assert_eq!(x.terms(), &[(q(-3, 4), BigInt::one())]);
    }

    #[test]
    fn difference_times_sum_expands() {
        let a = &t(1) - &t(-1);
        let b = &t(1) + &t(-1);
        assert_eq!(&a * &b, &t(2) - &t(-2));
    }

    #[test]
    fn fractional_exponents_add() {
        let x = NovikovElement::exp_hom(q(1, 3)) * NovikovElement::exp_hom(q(2, 3));
        assert_eq!(x, t(1));
    }

    #[test]
    fn leading_terms() {
        let x = &t(-1) + &t(1);
        assert_eq!(x.leading_term().unwrap(), (q(-1, 1), &BigInt::one()));
        let y = -(&t(1) + &t(3));
        assert_eq!(y.leading_term().unwrap(), (q(1, 1), &BigInt::from(-1)));
        assert_eq!(NovikovElement::zero().leading_term(), Err(Error::NoLeadingTerm));
    }

    #[test]
    fn unit_examples() {
        assert!(NovikovElement::exp_hom(q(5, 2)).is_unit());
        assert!(!NovikovElement::constant(2).is_unit());
        assert!(!NovikovElement::zero().is_unit());
    }

    #[test]
    fn inverse_of_t_minus_inverse_t() {
        let x = &t(1) - &t(-1);
        let inv = x.invert(q(7, 1)).unwrap();
        let expected = -(t(1) + t(3) + t(5) + t(7));
        assert_eq!(inv.known_terms(), &expected);
    }

    #[test]
    fn inverse_of_one_plus_t() {
        let x = &NovikovElement::one() + &t(1);
        let inv = x.invert(q(3, 1)).unwrap();
        let expected = NovikovElement::one() - t(1) + t(2) - t(3);
        assert_eq!(inv.known_terms(), &expected);
        let residue = &(&x * inv.known_terms()) - &NovikovElement::one();
        assert!(residue.valuation().unwrap() > q(3, 1));
    }

    #[test]
    fn monomial_inverse_is_exact() {
        let x = NovikovElement::monomial(BigInt::from(-1), q(2, 5));
        let inv = x.invert(q(1, 1)).unwrap();
        assert!(inv.is_exact());
        assert_eq!(inv.known_terms(), &NovikovElement::monomial(BigInt::from(-1), q(-2, 5)));
    }

    #[test]
    fn non_unit_inverse_fails() {
        assert!(NovikovElement::constant(3).invert(q(5, 1)).is_err());
        assert!(NovikovElement::zero().invert(q(5, 1)).is_err());
    }
}
