use std::collections::BTreeMap;

use super::TransitiveSystem;
use crate::error::{Error, Result};
use crate::module::{FreeModule, Homomorphism};
use crate::ring::{Ring, RingSpec, UnitGroup};

/// The module a strict transitive system defines, realised as the module at a base
/// index together with the identification of every other module with it.
#[derive(Clone, Debug)]
pub struct QuotientModule<R: Ring> {
    pub module: FreeModule,
    pub base: String,
    /// `identifications[label]` maps the module at `label` onto the base module.
    pub identifications: BTreeMap<String, Homomorphism<R>>,
}

impl<R: Ring> TransitiveSystem<R> {
    pub fn quotient_module(&self) -> Result<QuotientModule<R>> {
        let base = self
            .indices()
            .first()
            .ok_or_else(|| Error::Precondition("empty index set".into()))?
            .clone();
        self.quotient_module_at(&base)
    }

    /// The quotient with `base` as the distinguished index. Requires a strict system
    /// (the unit group must act trivially), otherwise identifications are only classes.
    pub fn quotient_module_at(&self, base: &str) -> Result<QuotientModule<R>> {
        let spec = RingSpec::new(R::KIND, self.unit_group());
        if spec.effective_group() != UnitGroup::Trivial {
            return Err(Error::Precondition(format!(
                "quotient needs a strict system, unit group is {}",
                self.unit_group()
            )));
        }
        let b = self
            .position(base)
            .ok_or_else(|| Error::Document(format!("unknown index {base}")))?;
        let identifications = self
            .indices()
            .iter()
            .enumerate()
            .map(|(a, label)| (label.clone(), self.map(a, b).clone()))
            .collect();
        let q = QuotientModule {
            module: self.module(b),
            base: base.to_string(),
            identifications,
        };
        q.check_triangles(self)?;
        Ok(q)
    }
}

impl<R: Ring> QuotientModule<R> {
    /// `ι_β ∘ g(α→β) = ι_α` exactly, for all pairs.
    pub fn check_triangles(&self, system: &TransitiveSystem<R>) -> Result<()> {
        for (a, la) in system.indices().iter().enumerate() {
            for (b, lb) in system.indices().iter().enumerate() {
                let lhs = self.identifications[lb].compose(system.map(a, b))?;
                if lhs != self.identifications[la] {
                    return Err(Error::Precondition(format!(
                        "identification triangle fails for {la} -> {lb}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Re-expresses the identifications over another base `new_base`, composing with
    /// the system's map from the current base.
    pub fn transport_to(&self, system: &TransitiveSystem<R>, new_base: &str) -> Result<Self> {
        let from = system
            .position(&self.base)
            .ok_or_else(|| Error::Document(format!("unknown index {}", self.base)))?;
        let to = system
            .position(new_base)
            .ok_or_else(|| Error::Document(format!("unknown index {new_base}")))?;
        let step = system.map(from, to);
        let identifications = self
            .identifications
            .iter()
            .map(|(l, m)| Ok((l.clone(), step.compose(m)?)))
            .collect::<Result<_>>()?;
        Ok(QuotientModule {
            module: system.module(to),
            base: new_base.to_string(),
            identifications,
        })
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.base == other.base && self.identifications == other.identifications
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn constant_system_quotient() {
        let s = TransitiveSystem::<BigInt>::constant(labels(&["a", "b"]), 2, UnitGroup::Trivial);
        let q = s.quotient_module().unwrap();
        assert_eq!(q.module.rank, 2);
        assert!(q.identifications.values().all(|m| *m == Homomorphism::identity(2)));
    }

    #[test]
    fn coherent_family_and_rebasing() {
        let p = vec![
            Homomorphism::from_integers(&[vec![1, 0], vec![0, 1]]).unwrap(),
            Homomorphism::from_integers(&[vec![2, 1], vec![1, 1]]).unwrap(),
            Homomorphism::from_integers(&[vec![0, -1], vec![1, 3]]).unwrap(),
        ];
        let s = TransitiveSystem::<BigInt>::from_transports(labels(&["a", "b", "c"]), &p, UnitGroup::Trivial, |_, _| {
            BigInt::from(1)
        })
        .unwrap();
        let q = s.quotient_module().unwrap();
        let rebased = s.quotient_module_at("c").unwrap();
        assert!(q.transport_to(&s, "c").unwrap().same_as(&rebased));
    }

    #[test]
    fn projective_system_has_no_quotient() {
        let s = TransitiveSystem::<BigInt>::constant(labels(&["a"]), 1, UnitGroup::Signs);
        assert!(s.quotient_module().is_err());
    }
}
