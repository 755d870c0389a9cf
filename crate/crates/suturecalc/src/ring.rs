//! Coefficient rings and the unit subgroups used for projective equivalence.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::novikov::{is_unit_ratio, Exponent, NovikovElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RingKind {
    #[serde(rename = "integers", alias = "Z")]
    Integers,
    #[serde(rename = "integers-mod-2", alias = "Z/2")]
    IntegersMod2,
    #[serde(rename = "rationals", alias = "Q")]
    RationalField,
    #[serde(rename = "novikov")]
    NovikovOverIntegers,
}

impl RingKind {
    pub fn name(self) -> &'static str {
        match self {
            RingKind::Integers => "integers",
            RingKind::IntegersMod2 => "integers-mod-2",
            RingKind::RationalField => "rationals",
            RingKind::NovikovOverIntegers => "novikov",
        }
    }
}

impl fmt::Display for RingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RingKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Document(format!("unknown ring `{s}`")))
    }
}

/// The subgroup `G` of the unit group by which homomorphisms are identified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitGroup {
    Trivial,
    Signs,
    #[serde(alias = "full")]
    FullUnits,
}

impl UnitGroup {
    /// Subgroup order: Trivial ⊆ Signs ⊆ FullUnits.
    pub fn contains(self, other: UnitGroup) -> bool {
        self >= other
    }

    pub fn name(self) -> &'static str {
        match self {
            UnitGroup::Trivial => "trivial",
            UnitGroup::Signs => "signs",
            UnitGroup::FullUnits => "full-units",
        }
    }
}

impl fmt::Display for UnitGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for UnitGroup {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Document(format!("unknown unit group `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingSpec {
    pub kind: RingKind,
    pub unit_group: UnitGroup,
}

impl RingSpec {
    pub fn new(kind: RingKind, unit_group: UnitGroup) -> Self {
        RingSpec { kind, unit_group }
    }

    /// The smallest named group with the same elements (over Z every unit is a sign,
    /// over Z/2 the only unit is 1).
    pub fn effective_group(&self) -> UnitGroup {
        match (self.kind, self.unit_group) {
            (RingKind::IntegersMod2, _) => UnitGroup::Trivial,
            (RingKind::Integers, UnitGroup::FullUnits) => UnitGroup::Signs,
            (_, g) => g,
        }
    }
}

/// A commutative integral domain with exact arithmetic.
///
/// Inverses are only required where they are finitely representable; the unit tests
/// `ratio_in_group` work in the completion where that matters (Novikov).
pub trait Ring:
    Clone
    + PartialEq
    + Eq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const KIND: RingKind;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    /// The canonical map Z → R.
    fn from_integer(n: &BigInt) -> Self;
    fn is_unit(&self) -> bool;
    /// Inverse, when it exists and is finitely representable.
    fn exact_inverse(&self) -> Option<Self>;
    /// Whether `num = u·den` for some `u ∈ group` (`den ≠ 0`).
    fn ratio_in_group(num: &Self, den: &Self, group: UnitGroup) -> bool;
    /// A unit `u ∈ group` such that `u·pivot` is in the canonical form for its class.
    fn normalizing_unit(pivot: &Self, group: UnitGroup) -> Self;
    /// Image of a prototype-ring element if it lies in the image of this ring's constants.
    fn embed_novikov(x: &NovikovElement) -> Option<Self>;
    fn parse(s: &str) -> Result<Self>;

    fn from_i64(n: i64) -> Self {
        Self::from_integer(&BigInt::from(n))
    }
}

fn sign_unit<R: Ring>(negative: bool, group: UnitGroup) -> R {
    if negative && group != UnitGroup::Trivial {
        -R::one()
    } else {
        R::one()
    }
}

impl Ring for BigInt {
    const KIND: RingKind = RingKind::Integers;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_integer(n: &BigInt) -> Self {
        n.clone()
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
    fn exact_inverse(&self) -> Option<Self> {
        Ring::is_unit(self).then(|| self.clone())
    }
    fn ratio_in_group(num: &Self, den: &Self, group: UnitGroup) -> bool {
        match group {
            UnitGroup::Trivial => num == den,
            UnitGroup::Signs | UnitGroup::FullUnits => num == den || *num == -den,
        }
    }
    fn normalizing_unit(pivot: &Self, group: UnitGroup) -> Self {
        sign_unit(pivot.is_negative(), group)
    }
    fn embed_novikov(x: &NovikovElement) -> Option<Self> {
        x.as_constant()
    }
    fn parse(s: &str) -> Result<Self> {
        s.trim()
            .parse()
            .map_err(|_| Error::parse(0, format!("`{s}` is not an integer")))
    }
}

/// The field with two elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Zmod2(pub bool);

#[allow(clippy::suspicious_arithmetic_impl)]
impl Add for Zmod2 {
    type Output = Zmod2;
    fn add(self, rhs: Zmod2) -> Zmod2 {
        Zmod2(self.0 ^ rhs.0)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Sub for Zmod2 {
    type Output = Zmod2;
    fn sub(self, rhs: Zmod2) -> Zmod2 {
        Zmod2(self.0 ^ rhs.0)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for Zmod2 {
    type Output = Zmod2;
    fn mul(self, rhs: Zmod2) -> Zmod2 {
        Zmod2(self.0 & rhs.0)
    }
}

impl Neg for Zmod2 {
    type Output = Zmod2;
    fn neg(self) -> Zmod2 {
        self
    }
}

impl fmt::Display for Zmod2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", u8::from(self.0))
    }
}

impl Ring for Zmod2 {
    const KIND: RingKind = RingKind::IntegersMod2;

    fn zero() -> Self {
        Zmod2(false)
    }
    fn one() -> Self {
        Zmod2(true)
    }
    fn is_zero(&self) -> bool {
        !self.0
    }
    fn from_integer(n: &BigInt) -> Self {
        Zmod2(n.is_odd())
    }
    fn is_unit(&self) -> bool {
        self.0
    }
    fn exact_inverse(&self) -> Option<Self> {
        self.0.then_some(*self)
    }
    fn ratio_in_group(num: &Self, den: &Self, _group: UnitGroup) -> bool {
        num == den
    }
    fn normalizing_unit(_pivot: &Self, _group: UnitGroup) -> Self {
        Zmod2(true)
    }
    fn embed_novikov(x: &NovikovElement) -> Option<Self> {
        x.as_constant().map(|c| Self::from_integer(&c))
    }
    fn parse(s: &str) -> Result<Self> {
        let n: BigInt = Ring::parse(s)?;
        Ok(Self::from_integer(&n))
    }
}

impl Ring for BigRational {
    const KIND: RingKind = RingKind::RationalField;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_integer(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
    fn is_unit(&self) -> bool {
        !Zero::is_zero(self)
    }
    fn exact_inverse(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn ratio_in_group(num: &Self, den: &Self, group: UnitGroup) -> bool {
        match group {
            UnitGroup::Trivial => num == den,
            UnitGroup::Signs => num == den || *num == -den,
            UnitGroup::FullUnits => !Zero::is_zero(num) && !Zero::is_zero(den),
        }
    }
    fn normalizing_unit(pivot: &Self, group: UnitGroup) -> Self {
        match group {
            UnitGroup::FullUnits if !Zero::is_zero(pivot) => pivot.recip(),
            _ => sign_unit(pivot.is_negative(), group),
        }
    }
    fn embed_novikov(x: &NovikovElement) -> Option<Self> {
        x.as_constant().map(BigRational::from_integer)
    }
    fn parse(s: &str) -> Result<Self> {
        s.trim()
            .parse()
            .map_err(|_| Error::parse(0, format!("`{s}` is not a rational number")))
    }
}

impl Ring for NovikovElement {
    const KIND: RingKind = RingKind::NovikovOverIntegers;

    fn zero() -> Self {
        NovikovElement::zero()
    }
    fn one() -> Self {
        NovikovElement::one()
    }
    fn is_zero(&self) -> bool {
        NovikovElement::is_zero(self)
    }
    fn from_integer(n: &BigInt) -> Self {
        NovikovElement::constant(n.clone())
    }
    fn is_unit(&self) -> bool {
        NovikovElement::is_unit(self)
    }
    fn exact_inverse(&self) -> Option<Self> {
        self.monomial_inverse()
    }
    fn ratio_in_group(num: &Self, den: &Self, group: UnitGroup) -> bool {
        match group {
            UnitGroup::Trivial => num == den,
            UnitGroup::Signs => num == den || *num == -den,
            UnitGroup::FullUnits => is_unit_ratio(num, den),
        }
    }
    /// Over the full unit group the pivot's leading monomial is moved to `+t^0`;
    /// the rest of the pivot is left alone because its inverse need not terminate.
    fn normalizing_unit(pivot: &Self, group: UnitGroup) -> Self {
        let Ok((exp, coeff)) = pivot.leading_term() else {
            return NovikovElement::one();
        };
        match group {
            UnitGroup::Trivial => NovikovElement::one(),
            UnitGroup::Signs => sign_unit(coeff.is_negative(), group),
            UnitGroup::FullUnits => {
                let sign = if coeff.is_negative() { -1 } else { 1 };
                NovikovElement::monomial(BigInt::from(sign), -exp)
            }
        }
    }
    fn embed_novikov(x: &NovikovElement) -> Option<Self> {
        Some(x.clone())
    }
    fn parse(s: &str) -> Result<Self> {
        s.parse()
    }
}

/// Convenience: `t^e` for integer `e`.
pub fn t_pow(e: i64) -> NovikovElement {
    NovikovElement::exp_hom(Exponent::from_integer(e))
}
