#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use proptest::prelude::*;
use rand::Rng;
use suturecalc::module::Homomorphism;
use suturecalc::novikov::{Exponent, NovikovElement};
use suturecalc::ring::{Ring, UnitGroup};
use suturecalc::transys::TransitiveSystem;

pub fn element_from(terms: Vec<(i64, i64, i64)>) -> NovikovElement {
    NovikovElement::from_terms(
        terms
            .into_iter()
            .map(|(n, d, c)| (Ratio::new(n, d), BigInt::from(c))),
    )
}

/// Up to `max_terms` terms, exponents `n/d` with `d ≤ 12`.
pub fn novikov(max_terms: usize) -> impl Strategy<Value = NovikovElement> {
    prop::collection::vec((-40i64..40, 1i64..=12, -6i64..=6), 0..=max_terms).prop_map(element_from)
}

pub fn nonzero_novikov(max_terms: usize) -> impl Strategy<Value = NovikovElement> {
    novikov(max_terms).prop_filter("nonzero", |x| !x.is_zero())
}

fn divisor_of_twelve() -> impl Strategy<Value = i64> {
    prop::sample::select(vec![1i64, 2, 3, 4, 6, 12])
}

/// Nonzero, exponents on the lattice `Z/12`.
pub fn lattice_novikov(max_terms: usize) -> impl Strategy<Value = NovikovElement> {
    prop::collection::vec((-10i64..10, divisor_of_twelve(), -4i64..=4), 1..=max_terms)
        .prop_map(element_from)
        .prop_filter("nonzero", |x| !x.is_zero())
}

/// Leading coefficient ±1. Exponents stay on the lattice `Z/12` so that long
/// division and unit tests work on polynomials of moderate degree.
pub fn novikov_unit(max_terms: usize) -> impl Strategy<Value = NovikovElement> {
    (
        (-10i64..10, divisor_of_twelve(), prop::bool::ANY),
        prop::collection::vec((1i64..12, divisor_of_twelve(), -4i64..=4), 0..max_terms),
    )
        .prop_map(|((n, d, neg), rest)| {
            let lead = Ratio::new(n, d);
            let sign = if neg { -1 } else { 1 };
            NovikovElement::from_terms(
                std::iter::once((lead, BigInt::from(sign))).chain(
                    rest.into_iter()
                        .map(|(n, d, c)| (lead + Ratio::new(n, d), BigInt::from(c))),
                ),
            )
        })
}

pub fn random_element<G: Rng>(rng: &mut G, max_terms: usize) -> NovikovElement {
    let k = rng.gen_range(0..=max_terms);
    element_from(
        (0..k)
            .map(|_| (rng.gen_range(-40..40), rng.gen_range(1..=12), rng.gen_range(-6..=6)))
            .collect(),
    )
}

pub fn int_matrix<G: Rng>(rng: &mut G, n: usize, range: i64) -> Homomorphism<BigInt> {
    Homomorphism::from_fn(n, n, |_, _| BigInt::from(rng.gen_range(-range..=range)))
}

pub fn rational_matrix<G: Rng>(rng: &mut G, n: usize) -> Homomorphism<BigRational> {
    Homomorphism::from_fn(n, n, |_, _| {
        BigRational::new(BigInt::from(rng.gen_range(-6..=6)), BigInt::from(rng.gen_range(1..=4)))
    })
}

/// A product of elementary and sign matrices, so an invertible integer matrix.
pub fn unimodular<G: Rng>(rng: &mut G, n: usize) -> Homomorphism<BigInt> {
    let mut m = Homomorphism::<BigInt>::identity(n);
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        let e = if i == j {
            let s = if rng.gen_bool(0.5) { -1 } else { 1 };
            Homomorphism::from_fn(n, n, |r, c| BigInt::from(if r == c { if r == i { s } else { 1 } } else { 0 }))
        } else {
            let k = rng.gen_range(-2..=2);
            Homomorphism::from_fn(n, n, |r, c| {
                BigInt::from(if r == c { 1 } else if r == i && c == j { k } else { 0 })
            })
        };
        m = e.compose(&m).unwrap();
    }
    m
}

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

/// A valid system over the integers: modules identified with a base through random
/// unimodular matrices, maps scaled by random signs when `group` allows it.
pub fn valid_system<G: Rng>(rng: &mut G, n: usize, rank: usize, group: UnitGroup) -> TransitiveSystem<BigInt> {
    let to_base: Vec<Homomorphism<BigInt>> = (0..n).map(|_| unimodular(rng, rank)).collect();
    let mut maps = BTreeMap::new();
    let idx = labels(n);
    for a in 0..n {
        for b in 0..n {
            let inv = to_base[b].exact_inverse().unwrap();
            let mut m = inv.compose(&to_base[a]).unwrap();
            if group != UnitGroup::Trivial && a != b && rng.gen_bool(0.5) {
                m = m.scale(&BigInt::from(-1));
            }
            maps.insert((idx[a].clone(), idx[b].clone()), m);
        }
    }
    TransitiveSystem::new(idx, vec![rank; n], maps, group).unwrap()
}

/// Exhaustive axiom check by triples, independent of `validate`.
pub fn brute_force_valid<R: Ring>(s: &TransitiveSystem<R>) -> bool {
    let n = s.len();
    let group = s.unit_group();
    let equiv = |f: &Homomorphism<R>, g: &Homomorphism<R>| brute_equivalent(f, g, group);
    for a in 0..n {
        if s.map(a, a).rows() != s.rank(a) || !equiv(s.map(a, a), &Homomorphism::identity(s.rank(a))) {
            return false;
        }
        for b in 0..n {
            let m = s.map(a, b);
            if m.rows() != s.rank(b) || m.cols() != s.rank(a) || !m.is_isomorphism() {
                return false;
            }
            for c in 0..n {
                let Ok(comp) = s.map(b, c).compose(s.map(a, b)) else {
                    return false;
                };
                if !equiv(&comp, s.map(a, c)) {
                    return false;
                }
            }
        }
    }
    true
}

/// `f = u·g` for `u` among the explicit units of `group` (signs only).
pub fn brute_equivalent<R: Ring>(f: &Homomorphism<R>, g: &Homomorphism<R>, group: UnitGroup) -> bool {
    let units: Vec<R> = match group {
        UnitGroup::Trivial => vec![R::one()],
        _ => vec![R::one(), -R::one()],
    };
    units.iter().any(|u| g.scale(u) == *f)
}

/// Breaks one off-diagonal map so that some axiom fails.
pub fn inject_defect<G: Rng>(rng: &mut G, s: &mut TransitiveSystem<BigInt>) {
    let n = s.len();
    let a = rng.gen_range(0..n);
    let b = (a + rng.gen_range(1..n)) % n;
    let rank = s.rank(a);
    let m = s.map(a, b).clone();
    // Over rank one every unimodular matrix is a sign, so only the first two apply.
    let kinds = if rank == 1 { 2 } else { 3 };
    let broken = match rng.gen_range(0..kinds) {
        0 => m.scale(&BigInt::from(2)),
        1 => Homomorphism::zero(rank, rank),
        _ => {
            let mut u = unimodular(rng, rank);
            while u.g_equivalent(&Homomorphism::identity(rank), UnitGroup::Signs).unwrap() {
                u = unimodular(rng, rank);
            }
            m.compose(&u).unwrap()
        }
    };
    s.set_map(a, b, broken);
}

pub fn q(n: i64, d: i64) -> Exponent {
    Ratio::new(n, d)
}

/// Rank-one values built in the test from scratch: a random unit per node, per
/// diffeomorphism label and per embedding tag, times a random element of the unit
/// group for each letter. Consistent with every relation of the calculus.
pub struct Potentials<R: Ring> {
    rng: std::cell::RefCell<rand_chacha::ChaCha8Rng>,
    sample: fn(&mut rand_chacha::ChaCha8Rng) -> R,
    group_sample: fn(&mut rand_chacha::ChaCha8Rng) -> R,
    nodes: std::cell::RefCell<std::collections::HashMap<suturecalc::closure::Node, R>>,
    labels: std::cell::RefCell<std::collections::HashMap<String, R>>,
}

impl<R: Ring> Potentials<R> {
    pub fn new(
        seed: u64,
        sample: fn(&mut rand_chacha::ChaCha8Rng) -> R,
        group_sample: fn(&mut rand_chacha::ChaCha8Rng) -> R,
    ) -> Self {
        use rand::SeedableRng;
        Potentials {
            rng: std::cell::RefCell::new(rand_chacha::ChaCha8Rng::seed_from_u64(seed)),
            sample,
            group_sample,
            nodes: Default::default(),
            labels: Default::default(),
        }
    }

    fn label_unit(&self, key: String) -> R {
        let mut rng = self.rng.borrow_mut();
        self.labels
            .borrow_mut()
            .entry(key)
            .or_insert_with(|| (self.sample)(&mut rng))
            .clone()
    }

    fn node_unit(&self, node: &suturecalc::closure::Node) -> R {
        let mut rng = self.rng.borrow_mut();
        self.nodes
            .borrow_mut()
            .entry(node.clone())
            .or_insert_with(|| (self.sample)(&mut rng))
            .clone()
    }

    pub fn value(&self, letter: &suturecalc::closure::Letter) -> suturecalc::Result<R> {
        use suturecalc::closure::DiffeoStep;
        let (from, to) = letter.ends();
        let inv = |x: R| x.exact_inverse().expect("sampled units invert");
        let mut v = self.node_unit(&to) * inv(self.node_unit(&from));
        for step in letter.via().steps() {
            v = v * match step {
                DiffeoStep::Atomic { label, source, target, inverse } => {
                    let u = self.label_unit(format!("{label}:{source}>{target}"));
                    if *inverse {
                        inv(u)
                    } else {
                        u
                    }
                }
                DiffeoStep::Nest { from, to } => {
                    self.label_unit(format!("tag:{to}")) * inv(self.label_unit(format!("tag:{from}")))
                }
            };
        }
        let g = (self.group_sample)(&mut self.rng.borrow_mut());
        Ok(v * g)
    }
}

pub fn rational_unit(rng: &mut rand_chacha::ChaCha8Rng) -> BigRational {
    let num = rng.gen_range(1..=9) * if rng.gen_bool(0.5) { -1 } else { 1 };
    BigRational::new(BigInt::from(num), BigInt::from(rng.gen_range(1..=9)))
}

pub fn sign_unit<R: Ring>(rng: &mut rand_chacha::ChaCha8Rng) -> R {
    if rng.gen_bool(0.5) {
        -R::one()
    } else {
        R::one()
    }
}

pub fn novikov_monomial_unit(rng: &mut rand_chacha::ChaCha8Rng) -> NovikovElement {
    let e = Ratio::new(rng.gen_range(-12..=12), rng.gen_range(1..=4));
    NovikovElement::exp_hom(e) * NovikovElement::constant(if rng.gen_bool(0.5) { -1 } else { 1 })
}

pub fn one<R: Ring>(_: &mut rand_chacha::ChaCha8Rng) -> R {
    R::one()
}

/// The two words of a pair agree up to `group` under `trials` independent potentials.
pub fn potentials_agree<R: Ring>(
    left: &suturecalc::closure::MorphismWord,
    right: &suturecalc::closure::MorphismWord,
    group: UnitGroup,
    sample: fn(&mut rand_chacha::ChaCha8Rng) -> R,
    group_sample: fn(&mut rand_chacha::ChaCha8Rng) -> R,
    trials: u64,
) -> suturecalc::Result<bool> {
    use suturecalc::closure::evaluate_rank_one;
    for seed in 0..trials {
        let p = Potentials::new(seed, sample, group_sample);
        let l = evaluate_rank_one(left, |x| p.value(x))?;
        let r = evaluate_rank_one(right, |x| p.value(x))?;
        if !R::ratio_in_group(&l, &r, group) {
            return Ok(false);
        }
    }
    Ok(true)
}
