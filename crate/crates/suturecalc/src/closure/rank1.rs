//! Evaluation of words when every closure carries a free module of rank one, so each
//! letter is multiplication by a unit.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::marker::PhantomData;

use num_bigint::BigInt;
use num_rational::Ratio;

use super::descriptor::{DiffeoPath, DiffeoStep};
use super::word::{Letter, MorphismWord, Node};
use crate::error::{Error, Result};
use crate::novikov::NovikovElement;
use crate::ring::{Ring, RingKind, UnitGroup};

/// Product of the units assigned to the letters. Unit scalars contribute their own
/// payload.
pub fn evaluate_rank_one<R: Ring>(w: &MorphismWord, assign: impl Fn(&Letter) -> Result<R>) -> Result<R> {
    let mut acc = R::one();
    for l in w.letters() {
        let v = match l {
            Letter::UnitScalar { unit, .. } => R::embed_novikov(unit)
                .ok_or_else(|| Error::NotAUnit(format!("{unit} is not an element of {:?}", R::KIND)))?,
            _ => assign(l)?,
        };
        if !v.is_unit() {
            return Err(Error::NotAUnit(format!("{l} is assigned {v}")));
        }
        acc = acc * v;
    }
    Ok(acc)
}

fn digest<T: Hash>(seed: u64, salt: u8, x: &T) -> u64 {
    let mut h = DefaultHasher::new();
    seed.hash(&mut h);
    salt.hash(&mut h);
    x.hash(&mut h);
    h.finish()
}

/// A deterministic unit of `R` chosen from `h`.
pub fn sample_unit<R: Ring>(h: u64) -> R {
    let negative = h & 1 == 1;
    let sign = if negative { -R::one() } else { R::one() };
    let body = match R::KIND {
        RingKind::NovikovOverIntegers => {
            let k = ((h >> 1) % 13) as i64 - 6;
            let t = NovikovElement::exp_hom(Ratio::new(k, 2));
            R::embed_novikov(&t).expect("monomials embed")
        }
        RingKind::RationalField => {
            let a = R::from_i64(((h >> 1) % 5) as i64 + 1);
            let b = R::from_integer(&BigInt::from(((h >> 4) % 5) as i64 + 1));
            a * b.exact_inverse().expect("nonzero rational")
        }
        RingKind::Integers | RingKind::IntegersMod2 => R::one(),
    };
    sign * body
}

/// Unit of `group` chosen from `h`.
pub fn sample_group_unit<R: Ring>(h: u64, group: UnitGroup) -> R {
    match group {
        UnitGroup::Trivial => R::one(),
        UnitGroup::Signs => {
            if h & 1 == 1 {
                -R::one()
            } else {
                R::one()
            }
        }
        UnitGroup::FullUnits => sample_unit(h),
    }
}

/// An assignment compatible with every rewrite rule up to `group`: a letter from `a`
/// to `b` along `f` gets `u(b)·u(a)⁻¹·v(f)·g` with node and path potentials `u`, `v`
/// and a letter-dependent `g ∈ group`.
#[derive(Clone, Debug)]
pub struct ConsistentAssignment<R> {
    seed: u64,
    group: UnitGroup,
    _ring: PhantomData<R>,
}

impl<R: Ring> ConsistentAssignment<R> {
    pub fn new(seed: u64, group: UnitGroup) -> Self {
        ConsistentAssignment {
            seed,
            group,
            _ring: PhantomData,
        }
    }

    fn inverse(x: &R) -> R {
        x.exact_inverse().expect("sampled units are invertible")
    }

    pub fn node_unit(&self, node: &Node) -> R {
        sample_unit(digest(self.seed, 1, node))
    }

    pub fn path_unit(&self, path: &DiffeoPath) -> R {
        let mut acc = R::one();
        for step in path.steps() {
            let u = match step {
                DiffeoStep::Atomic { label, source, target, inverse } => {
                    let u: R = sample_unit(digest(self.seed, 2, &(label, source, target)));
                    if *inverse {
                        Self::inverse(&u)
                    } else {
                        u
                    }
                }
                DiffeoStep::Nest { from, to } => {
                    let w = |tag: &String| -> R { sample_unit(digest(self.seed, 3, tag)) };
                    w(to) * Self::inverse(&w(from))
                }
            };
            acc = acc * u;
        }
        acc
    }

    /// Value with the letter's own group element removed.
    pub fn exact_value(&self, letter: &Letter) -> R {
        let (from, to) = letter.ends();
        self.node_unit(&to) * Self::inverse(&self.node_unit(&from)) * self.path_unit(&letter.via())
    }

    pub fn value(&self, letter: &Letter) -> Result<R> {
        let g = sample_group_unit(digest(self.seed, 4, letter), self.group);
        Ok(self.exact_value(letter) * g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::descriptor::ClosureDescriptor;
    use std::sync::Arc;

    fn t(n: i64) -> NovikovElement {
        NovikovElement::exp_hom(Ratio::from_integer(n))
    }

    #[test]
    fn product_of_assigned_units() {
        let d = Node::Closure(Arc::new(ClosureDescriptor::new("D", 2, "Y").unwrap()));
        let scalar = |u: NovikovElement| Letter::UnitScalar { at: d.clone(), unit: u };
        let w = MorphismWord::from_letters(vec![scalar(t(2)), scalar(NovikovElement::constant(-1)), scalar(t(-1))]).unwrap();
        let v: NovikovElement = evaluate_rank_one(&w, |_| unreachable!()).unwrap();
        assert_eq!(v, -t(1));
        let empty = MorphismWord::identity(d.clone());
        let one: BigInt = evaluate_rank_one(&empty, |_| unreachable!()).unwrap();
        assert_eq!(one, BigInt::from(1));
    }

    #[test]
    fn non_units_are_rejected() {
        let d = Node::Closure(Arc::new(ClosureDescriptor::new("D", 2, "Y").unwrap()));
        let w = MorphismWord::from_letters(vec![Letter::UnitScalar { at: d, unit: t(1) }]).unwrap();
        assert!(evaluate_rank_one::<BigInt>(&w, |_| unreachable!()).is_err());
    }

    #[test]
    fn path_potentials_respect_inverses() {
        let a = ConsistentAssignment::<NovikovElement>::new(5, UnitGroup::Signs);
        let f = DiffeoPath::atomic("f", "M", "N");
        assert!(a.path_unit(&f).clone() * a.path_unit(&f.inverse()) == NovikovElement::one());
        let n = DiffeoPath::nest("p", "q").then(&DiffeoPath::nest("q", "r")).unwrap();
        assert_eq!(
            a.path_unit(&n),
            a.path_unit(&DiffeoPath::nest("p", "q")) * a.path_unit(&DiffeoPath::nest("q", "r"))
        );
    }
}
