use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::{SystemMorphism, TransitiveSystem};
use crate::error::{Error, Result};
use crate::module::Homomorphism;
use crate::ring::Ring;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OuterViolation {
    InnerSystem { outer: String, detail: String },
    Connector { from: String, to: String, detail: String },
    Identity { outer: String },
    Cocycle { first: String, second: String, third: String },
}

/// A transitive system whose entries are themselves transitive systems, connected by
/// system morphisms. Connectors are compared exactly as morphisms (no outer units).
#[derive(Clone, Debug)]
pub struct SystemOfSystems<R: Ring> {
    outer: Vec<String>,
    inner: Vec<Arc<TransitiveSystem<R>>>,
    /// `connectors[i * n + j]` goes from `inner[i]` to `inner[j]`.
    connectors: Vec<SystemMorphism<R>>,
}

impl<R: Ring> SystemOfSystems<R> {
    pub fn new(
        outer: Vec<String>,
        inner: Vec<Arc<TransitiveSystem<R>>>,
        connectors: BTreeMap<(usize, usize), SystemMorphism<R>>,
    ) -> Result<Self> {
        let n = outer.len();
        if inner.len() != n {
            return Err(Error::Dimension("one inner system per outer index".into()));
        }
        let mut table = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let c = match connectors.get(&(i, j)) {
                    Some(c) => c.clone(),
                    None if i == j => SystemMorphism::identity(inner[i].clone()),
                    None => {
                        return Err(Error::Document(format!(
                            "missing connector {}->{}",
                            outer[i], outer[j]
                        )))
                    }
                };
                table.push(c);
            }
        }
        Ok(SystemOfSystems {
            outer,
            inner,
            connectors: table,
        })
    }

    pub fn outer(&self) -> &[String] {
        &self.outer
    }

    pub fn inner(&self, i: usize) -> &Arc<TransitiveSystem<R>> {
        &self.inner[i]
    }

    pub fn connector(&self, i: usize, j: usize) -> &SystemMorphism<R> {
        &self.connectors[i * self.outer.len() + j]
    }

    pub fn connector_mut(&mut self, i: usize, j: usize) -> &mut SystemMorphism<R> {
        let n = self.outer.len();
        &mut self.connectors[i * n + j]
    }

    /// Inner validity, connector compatibility, and the outer identity and cocycle laws.
    pub fn validate_outer(&self) -> Vec<OuterViolation> {
        let n = self.outer.len();
        let mut out = Vec::new();
        for (i, sys) in self.inner.iter().enumerate() {
            if let Some(v) = sys.validate().first() {
                out.push(OuterViolation::InnerSystem {
                    outer: self.outer[i].clone(),
                    detail: v.to_string(),
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                let c = self.connector(i, j);
                let wrong_ends = !c.source().same_as(&self.inner[i]) || !c.target().same_as(&self.inner[j]);
                let detail = if wrong_ends {
                    Some("endpoints do not match the inner systems".to_string())
                } else {
                    c.validate().first().map(|v| format!("{v:?}"))
                };
                if let Some(detail) = detail {
                    out.push(OuterViolation::Connector {
                        from: self.outer[i].clone(),
                        to: self.outer[j].clone(),
                        detail,
                    });
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for i in 0..n {
            if !self.connector(i, i).same_as(&SystemMorphism::identity(self.inner[i].clone())) {
                out.push(OuterViolation::Identity {
                    outer: self.outer[i].clone(),
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let composite = self.connector(j, k).compose_after(self.connector(i, j));
                    let ok = composite.is_ok_and(|c| c.same_as(self.connector(i, k)));
                    if !ok {
                        out.push(OuterViolation::Cocycle {
                            first: self.outer[i].clone(),
                            second: self.outer[j].clone(),
                            third: self.outer[k].clone(),
                        });
                    }
                }
            }
        }
        out
    }

    /// One system on the disjoint union of the inner index sets (labels `outer/inner`).
    /// The result is not validated here; callers run `validate` on it.
    pub fn flatten(&self) -> Result<TransitiveSystem<R>> {
        let group = self
            .inner
            .iter()
            .map(|s| s.unit_group())
            .max()
            .ok_or_else(|| Error::Precondition("no outer indices".into()))?;
        if self.inner.iter().any(|s| s.unit_group() != group) {
            return Err(Error::Precondition("inner systems use different unit groups".into()));
        }
        let mut labels = Vec::new();
        let mut ranks = Vec::new();
        let mut owner = Vec::new();
        for (i, sys) in self.inner.iter().enumerate() {
            for (a, l) in sys.indices().iter().enumerate() {
                labels.push(format!("{}/{}", self.outer[i], l));
                ranks.push(sys.rank(a));
                owner.push((i, a));
            }
        }
        let mut maps: BTreeMap<(String, String), Homomorphism<R>> = BTreeMap::new();
        for (x, &(i, a)) in owner.iter().enumerate() {
            for (y, &(j, b)) in owner.iter().enumerate() {
                let m = if i == j {
                    self.inner[i].map(a, b).clone()
                } else {
                    self.connector(i, j).component(a, b).clone()
                };
                maps.insert((labels[x].clone(), labels[y].clone()), m);
            }
        }
        TransitiveSystem::new(labels, ranks, maps, group)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::UnitGroup;
    use num_bigint::BigInt;

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn two_level() -> SystemOfSystems<BigInt> {
        let p = vec![
            Homomorphism::identity(2),
            Homomorphism::from_integers(&[vec![1, 1], vec![0, 1]]).unwrap(),
        ];
        let s = Arc::new(TransitiveSystem::from_transports(labels(&["a", "b"]), &p, UnitGroup::Signs, |_, _| BigInt::from(1)).unwrap());
        let t = Arc::new(TransitiveSystem::<BigInt>::constant(labels(&["x"]), 2, UnitGroup::Signs));
        let phi = Homomorphism::from_integers(&[vec![0, 1], vec![-1, 0]]).unwrap();
        let there = SystemMorphism::transported(s.clone(), t.clone(), 0, 0, &phi).unwrap();
        let back = SystemMorphism::transported(t.clone(), s.clone(), 0, 0, &phi.exact_inverse().unwrap()).unwrap();
        let mut connectors = BTreeMap::new();
        connectors.insert((0, 1), there);
        connectors.insert((1, 0), back);
        SystemOfSystems::new(labels(&["P", "Q"]), vec![s, t], connectors).unwrap()
    }

    #[test]
    fn single_outer_index_flattens_to_the_inner_system() {
        let s = Arc::new(TransitiveSystem::<BigInt>::constant(labels(&["a", "b"]), 1, UnitGroup::Signs));
        let sos = SystemOfSystems::new(labels(&["P"]), vec![s.clone()], BTreeMap::new()).unwrap();
        assert!(sos.validate_outer().is_empty());
        let flat = sos.flatten().unwrap();
        assert_eq!(flat.indices(), &labels(&["P/a", "P/b"]));
        assert!(flat.restrict(&labels(&["P/a", "P/b"])).unwrap().validate().is_empty());
    }

    #[test]
    fn transported_connectors_flatten_to_a_valid_system() {
        let sos = two_level();
        assert!(sos.validate_outer().is_empty());
        let flat = sos.flatten().unwrap();
        assert_eq!(flat.len(), 3);
        assert!(flat.validate().is_empty());
    }

    #[test]
    fn broken_connector_is_detected_in_both_views() {
        let mut sos = two_level();
        let c = sos.connector_mut(1, 0);
        let m = c.component(0, 1).compose(&Homomorphism::from_integers(&[vec![1, 1], vec![0, 1]]).unwrap()).unwrap();
        c.set_component(0, 1, m);
        assert!(!sos.validate_outer().is_empty());
        let flat = sos.flatten().unwrap();
        assert!(!flat.validate().is_empty());
    }
}
