use proptest::prelude::*;
use suturecalc::closure::{build_surgery, eliminate_negative_twists};
use suturecalc::mcg::{
    factor_symplectic, transitive_map, twist_matrix, CurveClass, FactorMode, GeneratorSet, SpMatrix, TwistLetter,
    TwistWord,
};

fn curve(genus: usize) -> impl Strategy<Value = CurveClass> {
    prop::collection::vec(-4i64..=4, 2 * genus)
        .prop_map(|v| CurveClass::from_i64(&v))
        .prop_filter("primitive", |c| !c.is_zero() && c.is_primitive())
}

fn letter(genus: usize) -> impl Strategy<Value = TwistLetter> {
    (curve(genus), any::<bool>()).prop_map(|(c, neg)| if neg { TwistLetter::negative(c) } else { TwistLetter::positive(c) })
}

fn word(genus: usize, max_len: usize) -> impl Strategy<Value = TwistWord> {
    prop::collection::vec(letter(genus), 0..=max_len).prop_map(move |l| TwistWord::new(genus, l).unwrap())
}

/// Words over the standard curves only, so that matrix entries stay small.
fn standard_word(genus: usize, len: usize) -> impl Strategy<Value = TwistWord> {
    let curves = suturecalc::mcg::standard_generators(genus);
    prop::collection::vec((0..curves.len(), any::<bool>()), len).prop_map(move |v| {
        let letters = v
            .into_iter()
            .map(|(i, neg)| {
                let c = curves[i].clone();
                if neg {
                    TwistLetter::negative(c)
                } else {
                    TwistLetter::positive(c)
                }
            })
            .collect();
        TwistWord::new(genus, letters).unwrap()
    })
}

fn genus_and_curves() -> impl Strategy<Value = (usize, CurveClass, CurveClass)> {
    (1usize..=3).prop_flat_map(|g| (Just(g), curve(g), curve(g)))
}

/// `⟨x, y⟩ = Σ x_{a_i} y_{b_i} − x_{b_i} y_{a_i}`, recomputed from coordinates.
fn pairing(x: &CurveClass, y: &CurveClass) -> i128 {
    let (x, y) = (x.coords(), y.coords());
    (0..x.len() / 2).map(|i| x[2 * i] * y[2 * i + 1] - x[2 * i + 1] * y[2 * i]).sum()
}

#[test]
fn hyperbolic_basis() {
    let g = 3;
    for i in 1..=g {
        for j in 1..=g {
            let expected = if i == j { 1 } else { 0 };
            assert_eq!(CurveClass::a(g, i).intersection(&CurveClass::b(g, j)).unwrap(), expected);
            assert_eq!(CurveClass::a(g, i).intersection(&CurveClass::a(g, j)).unwrap(), 0);
        }
    }
}

#[test]
fn twist_about_a_moves_b() {
    let a = CurveClass::a(2, 1);
    let b = CurveClass::b(2, 1);
    let t = twist_matrix(&a, 1).unwrap();
    assert_eq!(t.apply(&b).unwrap(), b.add(&a.scale(-1)));
    assert_eq!(t.apply(&a).unwrap(), a);
    assert!(twist_matrix(&a.scale(2), 1).is_err());
    assert!(twist_matrix(&CurveClass::zero(2), 1).is_err());
}

#[test]
fn custom_generators_round_trip() {
    let genus = 2;
    let mut curves = suturecalc::mcg::standard_generators(genus);
    curves.rotate_left(2);
    let set = GeneratorSet::new(genus, curves).unwrap();
    let w = TwistWord::new(
        genus,
        vec![
            TwistLetter::positive(CurveClass::from_i64(&[1, 1, 0, 1])),
            TwistLetter::negative(CurveClass::from_i64(&[0, 1, 1, 0])),
        ],
    )
    .unwrap();
    let m = w.word_action();
    for mode in [FactorMode::Signed, FactorMode::PositiveOnly] {
        let f = factor_symplectic(&m, Some(&set), mode).unwrap();
        assert_eq!(f.word_action(), m);
        assert!(f.letters.iter().all(|l| set.curves().contains(&l.curve)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pairing_is_alternating((_g, x, y) in genus_and_curves()) {
        prop_assert_eq!(x.intersection(&y).unwrap(), pairing(&x, &y));
        prop_assert_eq!(x.intersection(&y).unwrap(), -y.intersection(&x).unwrap());
        prop_assert_eq!(x.intersection(&x).unwrap(), 0);
    }

    #[test]
    fn twists_are_symplectic_transvections((_g, c, x) in genus_and_curves(), neg in any::<bool>()) {
        let s: i8 = if neg { -1 } else { 1 };
        let t = twist_matrix(&c, s).unwrap();
        prop_assert!(t.is_symplectic());
        let expected = x.add(&c.scale(s as i128 * pairing(&x, &c)));
        prop_assert_eq!(t.apply(&x).unwrap(), expected);
        let back = twist_matrix(&c, -s).unwrap();
        prop_assert!(t.mul(&back).unwrap().is_identity());
    }

    #[test]
    fn conjugation_relation(m in standard_word(2, 12), c in curve(2), neg in any::<bool>()) {
        let s: i8 = if neg { -1 } else { 1 };
        let m = m.word_action();
        let lhs = twist_matrix(&m.apply(&c).unwrap(), s).unwrap();
        let rhs = m.mul(&twist_matrix(&c, s).unwrap()).unwrap().mul(&m.symplectic_inverse()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn word_action_is_a_homomorphism(u in word(2, 5), v in word(2, 5)) {
        let uv = u.then_after(&v).word_action();
        prop_assert_eq!(uv, u.word_action().mul(&v.word_action()).unwrap());
        prop_assert!(u.then_after(&u.inverse()).is_identity_on_homology());
        prop_assert!(u.word_action().mul(&u.word_action().symplectic_inverse()).unwrap().is_identity());
    }

    #[test]
    fn factorization_round_trips(w in standard_word(2, 30), positive in any::<bool>()) {
        let m = w.word_action();
        let mode = if positive { FactorMode::PositiveOnly } else { FactorMode::Signed };
        let f = factor_symplectic(&m, None, mode).unwrap();
        prop_assert_eq!(f.word_action(), m);
        if positive {
            prop_assert!(f.is_positive());
        }
    }

    #[test]
    fn non_symplectic_matrices_are_rejected(k in 2i64..5) {
        let m = SpMatrix::from_i64_rows(&[vec![k, 0], vec![0, 1]]).unwrap();
        prop_assert!(!m.is_symplectic());
        prop_assert!(factor_symplectic(&m, None, FactorMode::Signed).is_err());
    }

    #[test]
    fn transitive_maps_send_source_to_target((_g, x, y) in genus_and_curves()) {
        let m = transitive_map(&x, &y).unwrap();
        prop_assert!(m.is_symplectic());
        prop_assert_eq!(m.apply(&x).unwrap(), y);
    }

    #[test]
    fn negative_twists_are_eliminated(w in standard_word(3, 8)) {
        let positive = eliminate_negative_twists(&w, None).unwrap();
        prop_assert!(positive.is_positive());
        prop_assert!(positive.then_after(&w.inverse()).is_identity_on_homology());
        for split in [0, w.len() / 2, w.len()] {
            let surgery = build_surgery(&w, split).unwrap();
            prop_assert!(surgery.validate().is_ok());
            let negatives = w.letters.iter().filter(|l| l.sign < 0).count();
            prop_assert_eq!(surgery.len(), w.len() + negatives);
        }
    }
}
