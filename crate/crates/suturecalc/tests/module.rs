mod common;

use common::{brute_equivalent, unimodular};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use suturecalc::module::{GClassHom, Homomorphism};
use suturecalc::novikov::NovikovElement;
use suturecalc::ring::{t_pow, UnitGroup};

fn int_hom(n: usize, range: i64) -> impl Strategy<Value = Homomorphism<BigInt>> {
    prop::collection::vec(-range..=range, n * n).prop_map(move |v| {
        Homomorphism::from_fn(n, n, |i, j| BigInt::from(v[i * n + j]))
    })
}

fn sign() -> impl Strategy<Value = BigInt> {
    prop_oneof![Just(BigInt::from(1)), Just(BigInt::from(-1))]
}

#[test]
fn novikov_classes_absorb_units() {
    let f = Homomorphism::from_rows(vec![
        vec![NovikovElement::one(), t_pow(2)],
        vec![NovikovElement::zero(), NovikovElement::one() - t_pow(1)],
    ])
    .unwrap();
    let u = NovikovElement::one() + t_pow(1);
    let g = f.scale(&u);
    assert!(f.g_equivalent(&g, UnitGroup::FullUnits).unwrap());
    assert!(!f.g_equivalent(&g, UnitGroup::Signs).unwrap());
    assert!(f.g_equivalent(&f.scale(&-t_pow(3)), UnitGroup::FullUnits).unwrap());
    assert!(!f.g_equivalent(&f.scale(&NovikovElement::constant(2)), UnitGroup::FullUnits).unwrap());
}

#[test]
fn shape_mismatch_is_an_error() {
    let a = Homomorphism::<BigInt>::identity(2);
    let b = Homomorphism::<BigInt>::identity(3);
    assert!(a.g_equivalent(&b, UnitGroup::Signs).is_err());
    assert!(a.compose(&b).is_err());
}

#[test]
fn random_unimodular_matrices_are_isomorphisms() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=4 {
        let m = unimodular(&mut rng, n);
        assert!(m.is_isomorphism());
        let inv = m.exact_inverse().unwrap();
        assert_eq!(inv.compose(&m).unwrap(), Homomorphism::identity(n));
        let singular = Homomorphism::from_fn(n, n, |_, j| if j == 0 { BigInt::from(2) } else { BigInt::from(0) });
        assert!(!singular.is_isomorphism());
    }
}

proptest! {
    #[test]
    fn equivalence_is_reflexive_symmetric_transitive(f in int_hom(3, 3), s in sign(), t in sign()) {
        let g = f.scale(&s);
        let h = g.scale(&t);
        let group = UnitGroup::Signs;
        prop_assert!(f.g_equivalent(&f, group).unwrap());
        prop_assert_eq!(f.g_equivalent(&g, group).unwrap(), g.g_equivalent(&f, group).unwrap());
        prop_assert!(f.g_equivalent(&g, group).unwrap() && g.g_equivalent(&h, group).unwrap());
        prop_assert!(f.g_equivalent(&h, group).unwrap());
    }

    #[test]
    fn equivalence_agrees_with_brute_force(f in int_hom(3, 2), g in int_hom(3, 2)) {
        for group in [UnitGroup::Trivial, UnitGroup::Signs] {
            prop_assert_eq!(f.g_equivalent(&g, group).unwrap(), brute_equivalent(&f, &g, group));
        }
    }

    #[test]
    fn composition_descends_to_classes(f in int_hom(3, 2), g in int_hom(3, 2), s in sign(), t in sign()) {
        let group = UnitGroup::Signs;
        let a = GClassHom::new(f.clone(), group).compose(&GClassHom::new(g.clone(), group)).unwrap();
        let b = GClassHom::new(f.scale(&s), group).compose(&GClassHom::new(g.scale(&t), group)).unwrap();
        prop_assert!(a.same_class(&b).unwrap());
    }

    #[test]
    fn normalization_is_idempotent_and_class_preserving(f in int_hom(3, 3), s in sign()) {
        let group = UnitGroup::Signs;
        let n = f.normalize_class(group);
        prop_assert_eq!(n.normalize_class(group), n.clone());
        prop_assert!(n.g_equivalent(&f, group).unwrap());
        prop_assert_eq!(f.scale(&s).normalize_class(group), n);
    }

    #[test]
    fn isomorphism_matches_brute_force_inverse(f in int_hom(2, 1)) {
        // Inverses of such matrices again have entries in {-1, 0, 1}.
        let brute = (0..3i64.pow(4)).any(|code| {
            let mut c = code;
            let g = Homomorphism::from_fn(2, 2, |_, _| {
                let v = c % 3 - 1;
                c /= 3;
                BigInt::from(v)
            });
            g.compose(&f).unwrap() == Homomorphism::identity(2)
                && f.compose(&g).unwrap() == Homomorphism::identity(2)
        });
        prop_assert_eq!(f.is_isomorphism(), brute);
    }

    #[test]
    fn tensor_commutes_with_composition(f in int_hom(3, 3), g in int_hom(3, 3)) {
        let fg = f.compose(&g).unwrap();
        let lhs: Homomorphism<NovikovElement> = fg.tensor();
        let rhs = f.tensor::<NovikovElement>().compose(&g.tensor()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
