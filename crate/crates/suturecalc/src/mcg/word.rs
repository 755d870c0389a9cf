use std::fmt;

use serde::{Deserialize, Serialize};

use super::{CurveClass, Int, SpMatrix};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwistLetter {
    pub curve: CurveClass,
    /// `+1` for a positive (right-handed) twist, `-1` for its inverse.
    pub sign: i8,
}

impl TwistLetter {
    pub fn positive(curve: CurveClass) -> Self {
        TwistLetter { curve, sign: 1 }
    }

    pub fn negative(curve: CurveClass) -> Self {
        TwistLetter { curve, sign: -1 }
    }

    pub fn inverse(&self) -> Self {
        TwistLetter {
            curve: self.curve.clone(),
            sign: -self.sign,
        }
    }

    pub fn matrix(&self) -> SpMatrix {
        SpMatrix::transvection(&self.curve, self.sign as Int)
    }
}

impl fmt::Debug for TwistLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign > 0 { "+" } else { "-" };
        write!(f, "T{}{}", self.curve, s)
    }
}

/// A signed Dehn twist word. The word `[l₁, …, lₙ]` is the composite `l₁ ∘ ⋯ ∘ lₙ`, so
/// the last letter acts first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwistWord {
    pub genus: usize,
    pub letters: Vec<TwistLetter>,
}

impl TwistWord {
    pub fn empty(genus: usize) -> Self {
        TwistWord {
            genus,
            letters: Vec::new(),
        }
    }

    pub fn new(genus: usize, letters: Vec<TwistLetter>) -> Result<Self> {
        let w = TwistWord { genus, letters };
        w.check()?;
        Ok(w)
    }

    /// All curves live on the same surface, are primitive, and signs are `±1`.
    pub fn check(&self) -> Result<()> {
        if self.genus == 0 {
            return Err(Error::Dimension("surface genus must be at least 1".into()));
        }
        for (i, l) in self.letters.iter().enumerate() {
            if l.curve.genus() != self.genus || l.curve.0.len() % 2 != 0 {
                return Err(Error::Dimension(format!(
                    "letter {i} lives on a surface of genus {}, word has genus {}",
                    l.curve.genus(),
                    self.genus
                )));
            }
            if l.sign != 1 && l.sign != -1 {
                return Err(Error::Document(format!("letter {i} has sign {}", l.sign)));
            }
            l.curve.require_primitive()?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_positive(&self) -> bool {
        self.letters.iter().all(|l| l.sign > 0)
    }

    pub fn push(&mut self, letter: TwistLetter) {
        self.letters.push(letter);
    }

    /// Formal inverse: reversed letters with flipped signs.
    pub fn inverse(&self) -> Self {
        TwistWord {
            genus: self.genus,
            letters: self.letters.iter().rev().map(TwistLetter::inverse).collect(),
        }
    }

    /// The composite `self ∘ other`.
    pub fn then_after(&self, other: &Self) -> Self {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        TwistWord {
            genus: self.genus,
            letters,
        }
    }

    /// Action on H₁, computed by left-multiplying from the last letter. Runs of equal
    /// letters are applied as one power.
    pub fn word_action(&self) -> SpMatrix {
        let mut m = SpMatrix::identity(self.genus);
        let mut i = self.letters.len();
        while i > 0 {
            let l = &self.letters[i - 1];
            let mut j = i - 1;
            while j > 0 && self.letters[j - 1] == *l {
                j -= 1;
            }
            m.twist_left(&l.curve, (i - j) as Int * l.sign as Int);
            i = j;
        }
        m
    }

    pub fn is_identity_on_homology(&self) -> bool {
        self.word_action().is_identity()
    }

    /// Image of a curve class under the word's action.
    pub fn transport(&self, c: &CurveClass) -> Result<CurveClass> {
        self.word_action().apply(c)
    }

    /// Conjugation `self ∘ other ∘ self⁻¹`.
    pub fn conjugate(&self, other: &Self) -> Self {
        self.then_after(other).then_after(&self.inverse())
    }
}

/// The transvection of a Dehn twist about `c`, with `sign = ±1`.
pub fn twist_matrix(c: &CurveClass, sign: i8) -> Result<SpMatrix> {
    if c.is_zero() {
        return Err(Error::NotPrimitive("zero vector".into()));
    }
    c.require_primitive()?;
    if sign != 1 && sign != -1 {
        return Err(Error::Document(format!("twist sign {sign}")));
    }
    Ok(SpMatrix::transvection(c, sign as Int))
}

/// The curve `M·c`. Symplectic matrices preserve primitivity.
pub fn transport_curve(m: &SpMatrix, c: &CurveClass) -> Result<CurveClass> {
    c.require_primitive()?;
    m.apply(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: &[i64]) -> CurveClass {
        CurveClass::from_i64(v)
    }

    #[test]
    fn empty_and_inverse_words() {
        assert!(TwistWord::empty(2).word_action().is_identity());
        let w = TwistWord::new(
            2,
            vec![
                TwistLetter::positive(c(&[1, 0, 0, 0])),
                TwistLetter::negative(c(&[0, 1, 1, 0])),
                TwistLetter::positive(c(&[1, 0, -1, 0])),
            ],
        )
        .unwrap();
        assert!(w.then_after(&w.inverse()).is_identity_on_homology());
        assert!(!w.is_identity_on_homology());
    }

    #[test]
    fn rightmost_letter_acts_first() {
        let a = TwistLetter::positive(c(&[1, 0]));
        let b = TwistLetter::positive(c(&[0, 1]));
        let w = TwistWord::new(1, vec![a.clone(), b.clone()]).unwrap();
        assert_eq!(w.word_action(), a.matrix().mul(&b.matrix()).unwrap());
        let runs = TwistWord::new(1, vec![a.clone(), a.clone(), b.clone()]).unwrap();
        let expected = a.matrix().mul(&a.matrix()).unwrap().mul(&b.matrix()).unwrap();
        assert_eq!(runs.word_action(), expected);
    }

    #[test]
    fn twist_and_transport_examples() {
        let a1 = c(&[1, 0]);
        let t = twist_matrix(&a1, 1).unwrap();
        assert_eq!(transport_curve(&t, &c(&[0, 1])).unwrap(), c(&[-1, 1]));
        assert!(twist_matrix(&c(&[0, 0]), 1).is_err());
        assert!(twist_matrix(&c(&[2, 0]), 1).is_err());
        assert!(TwistWord::new(1, vec![TwistLetter::positive(c(&[1, 0, 0, 0]))]).is_err());
    }

    #[test]
    fn conjugation_relation() {
        let f = TwistWord::new(
            2,
            vec![
                TwistLetter::positive(c(&[0, 1, 0, 0])),
                TwistLetter::negative(c(&[1, 0, -1, 0])),
            ],
        )
        .unwrap();
        let a = c(&[1, 0, 0, 0]);
        let m = f.word_action();
        let fa = transport_curve(&m, &a).unwrap();
        let lhs = twist_matrix(&fa, 1).unwrap();
        let rhs = m
            .mul(&twist_matrix(&a, 1).unwrap())
            .unwrap()
            .mul(&m.symplectic_inverse())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn lantern_relation_on_homology() {
        let boundary = [c(&[1, 0, 0, 0, 0, 0]), c(&[0, 0, 1, 0, 0, 0]), c(&[0, 0, 0, 0, 1, 0]), c(&[1, 0, 1, 0, 1, 0])];
        let interior = [c(&[1, 0, 1, 0, 0, 0]), c(&[0, 0, 1, 0, 1, 0]), c(&[1, 0, 0, 0, 1, 0])];
        let lhs = TwistWord::new(3, boundary.iter().cloned().map(TwistLetter::positive).collect()).unwrap();
        let rhs = TwistWord::new(3, interior.iter().cloned().map(TwistLetter::positive).collect()).unwrap();
        assert!(lhs.then_after(&rhs.inverse()).is_identity_on_homology());
        assert!(!lhs.is_identity_on_homology());
    }
}
