use std::collections::HashMap;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mcg::{factor_symplectic, twist_matrix, CurveClass, FactorMode, GeneratorSet, TwistLetter, TwistWord};
use crate::novikov::Exponent;

/// One framed curve in the product region.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurgeryEntry {
    pub curve: CurveClass,
    #[serde(with = "ratio_text")]
    pub height: Exponent,
    /// Framing relative to the fibre surface, `±1`.
    pub framing: i8,
    /// Height of the cancelling `−1` entry paired with a `+1` entry.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_ratio_text")]
    pub cancelling_partner: Option<Exponent>,
}

/// Surgery data for a twist word split as `A · B`. Heights in the `A` part lie in
/// `(1/4, 3/4)`, in the `B` part in `(−3/4, −1/4)`; the first letter is highest.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurgeryPresentation {
    pub entries: Vec<SurgeryEntry>,
}

fn q(n: i64, d: i64) -> Exponent {
    Ratio::new(n, d)
}

/// Heights for a word of `len` letters whose first `split` letters form the `A` part.
pub fn letter_heights(len: usize, split: usize) -> Vec<Exponent> {
    let (n, m) = (split as i64, len as i64);
    let mut out = Vec::with_capacity(len);
    for i in 1..=n {
        out.push(q(1, 4) + q(n + 1 - i, 2 * (n + 1)));
    }
    for j in n + 1..=m {
        out.push(q(-1, 4) - q(j - n, 2 * (m - n + 1)));
    }
    out
}

/// Surgery presentation of `word`, its first `split` letters being the `A` part.
/// Positive twists become `−1` surgeries; a negative twist becomes a `+1` surgery
/// with a cancelling `−1` surgery on the same curve just above it.
pub fn build_surgery(word: &TwistWord, split: usize) -> Result<SurgeryPresentation> {
    if split > word.len() {
        return Err(Error::Precondition(format!("split {split} exceeds word length {}", word.len())));
    }
    let heights = letter_heights(word.len(), split);
    let mut entries = Vec::new();
    for (i, (letter, &t)) in word.letters.iter().zip(&heights).enumerate() {
        if letter.sign > 0 {
            entries.push(SurgeryEntry {
                curve: letter.curve.clone(),
                height: t,
                framing: -1,
                cancelling_partner: None,
            });
            continue;
        }
        let above = if i == 0 || i == split {
            if i < split {
                q(3, 4)
            } else {
                q(-1, 4)
            }
        } else {
            heights[i - 1]
        };
        let partner = (t + above) / 2;
        entries.push(SurgeryEntry {
            curve: letter.curve.clone(),
            height: t,
            framing: 1,
            cancelling_partner: Some(partner),
        });
        entries.push(SurgeryEntry {
            curve: letter.curve.clone(),
            height: partner,
            framing: -1,
            cancelling_partner: None,
        });
    }
    Ok(SurgeryPresentation { entries })
}

impl SurgeryPresentation {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Heights distinct and inside `(−3/4, 3/4)` away from `[−1/4, 1/4]`, framings
    /// `±1`, and every `+1` entry paired with a `−1` entry on the same curve strictly
    /// between it and the next greater height of a `+1` or unpaired entry.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Precondition(format!("surgery presentation: {m}")));
        let mut seen: HashMap<Exponent, usize> = HashMap::new();
        for (i, e) in self.entries.iter().enumerate() {
            let t = e.height;
            let in_a = t > q(1, 4) && t < q(3, 4);
            let in_b = t > q(-3, 4) && t < q(-1, 4);
            if !in_a && !in_b {
                return bad(format!("height {t} is outside the product region slots"));
            }
            if e.framing != 1 && e.framing != -1 {
                return bad(format!("framing {}", e.framing));
            }
            if seen.insert(t, i).is_some() {
                return bad(format!("height {t} is used twice"));
            }
        }
        let partners: Vec<Exponent> = self.entries.iter().filter_map(|e| e.cancelling_partner).collect();
        let listed: Vec<Exponent> = self
            .entries
            .iter()
            .filter(|e| !partners.contains(&e.height))
            .map(|e| e.height)
            .collect();
        for e in &self.entries {
            match (e.framing, e.cancelling_partner) {
                (1, None) => return bad(format!("+1 entry at {} has no cancelling partner", e.height)),
                (1, Some(p)) => {
                    let Some(&k) = seen.get(&p) else {
                        return bad(format!("partner height {p} has no entry"));
                    };
                    let partner = &self.entries[k];
                    if partner.framing != -1 || partner.curve != e.curve {
                        return bad(format!("entry at {p} does not cancel the +1 entry at {}", e.height));
                    }
                    let bound = listed
                        .iter()
                        .copied()
                        .filter(|&x| x > e.height)
                        .min()
                        .unwrap_or(if e.height > q(0, 1) { q(3, 4) } else { q(-1, 4) });
                    let bound = if e.height < q(0, 1) { bound.min(q(-1, 4)) } else { bound };
                    if !(p > e.height && p < bound) {
                        return bad(format!("partner {p} is not between {} and {bound}", e.height));
                    }
                }
                (_, Some(_)) => return bad(format!("-1 entry at {} names a partner", e.height)),
                _ => {}
            }
        }
        Ok(())
    }
}

impl fmt::Display for SurgeryPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|e| format!("{}@{}:{:+}", e.curve, e.height, e.framing))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Replaces every negative letter by a positive factorization of its inverse twist.
pub fn eliminate_negative_twists(word: &TwistWord, generators: Option<&GeneratorSet>) -> Result<TwistWord> {
    let mut cache: HashMap<CurveClass, Vec<TwistLetter>> = HashMap::new();
    let mut letters = Vec::with_capacity(word.len());
    for l in &word.letters {
        if l.sign > 0 {
            letters.push(l.clone());
            continue;
        }
        if !cache.contains_key(&l.curve) {
            let m = twist_matrix(&l.curve, -1)?;
            let w = factor_symplectic(&m, generators, FactorMode::PositiveOnly)?;
            cache.insert(l.curve.clone(), w.letters);
        }
        letters.extend(cache[&l.curve].iter().cloned());
    }
    Ok(TwistWord {
        genus: word.genus,
        letters,
    })
}

mod ratio_text {
    use super::Exponent;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Exponent, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Exponent, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

mod opt_ratio_text {
    use super::Exponent;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Exponent>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.collect_str(r),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Exponent>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|x| x.parse().map_err(D::Error::custom))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: &[i64]) -> CurveClass {
        CurveClass::from_i64(v)
    }

    #[test]
    fn empty_and_single_letters() {
        let empty = build_surgery(&TwistWord::empty(2), 0).unwrap();
        assert!(empty.is_empty());
        let pos = TwistWord::new(2, vec![TwistLetter::positive(c(&[1, 0, 0, 0]))]).unwrap();
        let s = build_surgery(&pos, 1).unwrap();
        assert_eq!(s.entries.len(), 1);
        assert_eq!(s.entries[0].framing, -1);
        assert_eq!(s.entries[0].height, q(1, 2));
        let neg = TwistWord::new(2, vec![TwistLetter::negative(c(&[1, 0, 0, 0]))]).unwrap();
        let s = build_surgery(&neg, 1).unwrap();
        assert_eq!(s.entries.len(), 2);
        assert_eq!(s.entries[0].framing, 1);
        let p = s.entries[0].cancelling_partner.unwrap();
        assert!(p > q(1, 2) && p < q(3, 4));
        s.validate().unwrap();
    }

    #[test]
    fn heights_are_ordered_in_their_slots() {
        let h = letter_heights(5, 2);
        assert!(h.windows(2).all(|w| w[0] > w[1]));
        assert!(h[..2].iter().all(|&t| t > q(1, 4) && t < q(3, 4)));
        assert!(h[2..].iter().all(|&t| t > q(-3, 4) && t < q(-1, 4)));
    }

    #[test]
    fn mixed_word_validates() {
        let w = TwistWord::new(
            2,
            vec![
                TwistLetter::negative(c(&[1, 0, 0, 0])),
                TwistLetter::negative(c(&[0, 1, 0, 0])),
                TwistLetter::positive(c(&[1, 0, -1, 0])),
                TwistLetter::negative(c(&[0, 0, 0, 1])),
            ],
        )
        .unwrap();
        let s = build_surgery(&w, 2).unwrap();
        assert_eq!(s.len(), 7);
        s.validate().unwrap();
        let mut broken = s.clone();
        broken.entries[1].curve = c(&[0, 0, 1, 0]);
        assert!(broken.validate().is_err());
    }

    #[test]
    fn negative_twists_are_eliminated() {
        let w = TwistWord::new(
            2,
            vec![
                TwistLetter::positive(c(&[1, 0, 0, 0])),
                TwistLetter::negative(c(&[0, 1, 0, 0])),
                TwistLetter::negative(c(&[1, 0, -1, 0])),
            ],
        )
        .unwrap();
        let p = eliminate_negative_twists(&w, None).unwrap();
        assert!(p.is_positive());
        assert!(w.then_after(&p.inverse()).is_identity_on_homology());
        let already = TwistWord::new(2, vec![TwistLetter::positive(c(&[1, 0, 0, 0]))]).unwrap();
        assert_eq!(eliminate_negative_twists(&already, None).unwrap(), already);
    }
}
