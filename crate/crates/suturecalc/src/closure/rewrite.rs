//! Rewriting of morphism words.
//!
//! Rules, each applicable at any position:
//! - a raw letter is validated and replaced by the canonical `Reduced` letter between
//!   its endpoints, or removed when that is an identity (unit scalars are absorbed);
//! - a raw letter followed by its formal inverse cancels;
//! - two adjacent `Reduced` letters compose, and an identity `Reduced` letter is removed.
//!
//! Every rule lowers `(raw letter count, length)` lexicographically, so rewriting
//! terminates; the normal form is empty or a single `Reduced` letter.

use super::word::{Letter, MorphismWord};
use crate::error::Result;

/// Termination measure `(raw letters, letters)`.
pub fn measure(w: &MorphismWord) -> (usize, usize) {
    (w.letters().iter().filter(|l| l.is_raw()).count(), w.len())
}

fn reduced_or_identity(letter: Letter) -> Option<Letter> {
    match &letter {
        Letter::Reduced { from, to, via } if from == to && via.is_identity() => None,
        _ => Some(letter),
    }
}

/// The reduct of a single letter.
pub fn reduce_letter(letter: &Letter) -> Result<Option<Letter>> {
    letter.validate()?;
    Ok(match letter {
        Letter::UnitScalar { .. } => None,
        Letter::Reduced { .. } => reduced_or_identity(letter.clone()),
        _ => {
            let (from, to) = letter.ends();
            reduced_or_identity(Letter::Reduced {
                from,
                to,
                via: letter.via(),
            })
        }
    })
}

/// The composite of two adjacent reduced letters.
fn compose_reduced(first: &Letter, second: &Letter) -> Result<Option<Letter>> {
    match (first, second) {
        (Letter::Reduced { from, via: v1, .. }, Letter::Reduced { to, via: v2, .. }) => {
            Ok(reduced_or_identity(Letter::Reduced {
                from: from.clone(),
                to: to.clone(),
                via: v1.then(v2)?,
            }))
        }
        _ => unreachable!("only reduced letters compose"),
    }
}

/// All words reachable by one rule application.
pub fn one_step_reducts(w: &MorphismWord) -> Result<Vec<MorphismWord>> {
    let ls = w.letters();
    let mut out = Vec::new();
    let splice = |i: usize, j: usize, mid: Option<Letter>| {
        let mut v = ls[..i].to_vec();
        v.extend(mid);
        v.extend_from_slice(&ls[j..]);
        w.with_letters(v)
    };
    for i in 0..ls.len() {
        if ls[i].is_raw() {
            out.push(splice(i, i + 1, reduce_letter(&ls[i])?));
        } else if reduced_or_identity(ls[i].clone()).is_none() {
            out.push(splice(i, i + 1, None));
        }
        if i + 1 < ls.len() {
            if ls[i].is_raw() && ls[i + 1].is_raw() && ls[i + 1] == ls[i].inverse() {
                out.push(splice(i, i + 2, None));
            }
            if !ls[i].is_raw() && !ls[i + 1].is_raw() {
                out.push(splice(i, i + 2, compose_reduced(&ls[i], &ls[i + 1])?));
            }
        }
    }
    Ok(out)
}

/// The canonical form: reduce every letter, then compose left to right.
pub fn normal_form(w: &MorphismWord) -> Result<MorphismWord> {
    w.check_chaining()?;
    let mut acc: Option<Letter> = None;
    for l in w.letters() {
        let Some(r) = reduce_letter(l)? else { continue };
        acc = match acc {
            None => Some(r),
            Some(prev) => compose_reduced(&prev, &r)?,
        };
    }
    Ok(w.with_letters(acc.into_iter().collect()))
}

/// Equality of normal forms. Words with different endpoints are an error.
pub fn coherence_check(w1: &MorphismWord, w2: &MorphismWord) -> Result<bool> {
    if w1.source() != w2.source() || w1.target() != w2.target() {
        return Err(crate::error::Error::Chaining(format!(
            "words run {} -> {} and {} -> {}",
            w1.source(),
            w1.target(),
            w2.source(),
            w2.target()
        )));
    }
    Ok(normal_form(w1)? == normal_form(w2)?)
}

/// Outcome of checking one word against the rewrite system.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LocalCheck {
    pub reducts: usize,
    /// Some reduct failed to lower the termination measure.
    pub measure_violation: bool,
    /// Some reduct normalizes differently from the word.
    pub confluence_violation: bool,
    pub idempotence_violation: bool,
}

impl LocalCheck {
    pub fn ok(&self) -> bool {
        !self.measure_violation && !self.confluence_violation && !self.idempotence_violation
    }
}

/// Checks termination and local confluence at `w`: every one-step reduct lowers the
/// measure and reaches the same normal form, and the normal form is a fixed point.
pub fn local_check(w: &MorphismWord) -> Result<LocalCheck> {
    let nf = normal_form(w)?;
    let m = measure(w);
    let mut report = LocalCheck::default();
    for r in one_step_reducts(w)? {
        report.reducts += 1;
        if measure(&r) >= m {
            report.measure_violation = true;
        }
        r.check_chaining()?;
        if normal_form(&r)? != nf {
            report.confluence_violation = true;
        }
    }
    report.idempotence_violation = normal_form(&nf)? != nf || !one_step_reducts(&nf)?.is_empty();
    Ok(report)
}
