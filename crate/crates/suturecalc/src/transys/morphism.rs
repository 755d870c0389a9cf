use std::sync::Arc;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use super::TransitiveSystem;
use crate::error::{Error, Result};
use crate::module::Homomorphism;
use crate::ring::{Ring, UnitGroup};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MorphismViolation {
    Shape { from: String, to: String },
    /// `f(β→δ) ∘ g(α→β)` differs from `h(γ→δ) ∘ f(α→γ)`.
    Compatibility {
        alpha: String,
        beta: String,
        gamma: String,
        delta: String,
    },
}

/// A morphism of transitive systems, one component per (source index, target index).
#[derive(Clone, Debug)]
pub struct SystemMorphism<R: Ring> {
    source: Arc<TransitiveSystem<R>>,
    target: Arc<TransitiveSystem<R>>,
    /// `components[a * m + c]` maps source module `a` to target module `c`.
    components: Vec<Homomorphism<R>>,
}

impl<R: Ring> SystemMorphism<R> {
    pub fn new(
        source: Arc<TransitiveSystem<R>>,
        target: Arc<TransitiveSystem<R>>,
        components: Vec<Homomorphism<R>>,
    ) -> Result<Self> {
        if components.len() != source.len() * target.len() {
            return Err(Error::Dimension(format!(
                "expected {} components, found {}",
                source.len() * target.len(),
                components.len()
            )));
        }
        Ok(SystemMorphism {
            source,
            target,
            components,
        })
    }

    /// The morphism induced by one isomorphism `phi` from source module `a0` to target
    /// module `c0`, spread to every pair through the systems' own maps.
    pub fn transported(
        source: Arc<TransitiveSystem<R>>,
        target: Arc<TransitiveSystem<R>>,
        a0: usize,
        c0: usize,
        phi: &Homomorphism<R>,
    ) -> Result<Self> {
        let mut components = Vec::with_capacity(source.len() * target.len());
        for a in 0..source.len() {
            for c in 0..target.len() {
                let into_base = phi.compose(source.map(a, a0))?;
                components.push(target.map(c0, c).compose(&into_base)?);
            }
        }
        Self::new(source, target, components)
    }

    /// The identity of a system: its own maps, read as components.
    pub fn identity(system: Arc<TransitiveSystem<R>>) -> Self {
        let n = system.len();
        let components = (0..n * n).map(|k| system.map(k / n, k % n).clone()).collect();
        SystemMorphism {
            source: system.clone(),
            target: system,
            components,
        }
    }

    pub fn source(&self) -> &Arc<TransitiveSystem<R>> {
        &self.source
    }

    pub fn target(&self) -> &Arc<TransitiveSystem<R>> {
        &self.target
    }

    pub fn component(&self, a: usize, c: usize) -> &Homomorphism<R> {
        &self.components[a * self.target.len() + c]
    }

    pub fn set_component(&mut self, a: usize, c: usize, m: Homomorphism<R>) {
        let k = a * self.target.len() + c;
        self.components[k] = m;
    }

    /// Classes are compared modulo the larger of the two unit groups.
    pub fn unit_group(&self) -> UnitGroup {
        self.source.unit_group().max(self.target.unit_group())
    }

    fn equivalent(&self, f: &Homomorphism<R>, g: &Homomorphism<R>) -> bool {
        f.g_equivalent(g, self.unit_group()).unwrap_or(false)
    }

    /// Compatibility failures over all quadruples, in lexicographic order.
    pub fn validate(&self) -> Vec<MorphismViolation> {
        let (n, m) = (self.source.len(), self.target.len());
        let src = |i: usize| self.source.indices()[i].clone();
        let tgt = |i: usize| self.target.indices()[i].clone();
        let mut shape = Vec::new();
        for a in 0..n {
            for c in 0..m {
                let f = self.component(a, c);
                if f.cols() != self.source.rank(a) || f.rows() != self.target.rank(c) {
                    shape.push(MorphismViolation::Shape { from: src(a), to: tgt(c) });
                }
            }
        }
        if !shape.is_empty() {
            return shape;
        }
        (0..n * n * m * m)
            .into_par_iter()
            .filter_map(|k| {
                let (a, b) = (k / (n * m * m), (k / (m * m)) % n);
                let (c, d) = ((k / m) % m, k % m);
                let left = self.component(b, d).compose(self.source.map(a, b)).ok()?;
                let right = self.target.map(c, d).compose(self.component(a, c)).ok()?;
                (!self.equivalent(&left, &right)).then(|| MorphismViolation::Compatibility {
                    alpha: src(a),
                    beta: src(b),
                    gamma: tgt(c),
                    delta: tgt(d),
                })
            })
            .collect()
    }

    /// Componentwise equality of classes.
    pub fn same_as(&self, other: &Self) -> bool {
        self.components.len() == other.components.len()
            && self
                .components
                .iter()
                .zip(&other.components)
                .all(|(f, g)| self.equivalent(f, g))
    }

    /// `self ∘ first`. Each component is computed through every intermediate index and
    /// the results must agree.
    pub fn compose_after(&self, first: &Self) -> Result<Self> {
        if !first.target.same_as(&self.source) {
            return Err(Error::Precondition(
                "target of the first morphism is not the source of the second".into(),
            ));
        }
        let group = self.unit_group().max(first.unit_group());
        let (n, mid, m) = (first.source.len(), self.source.len(), self.target.len());
        let mut components = Vec::with_capacity(n * m);
        for a in 0..n {
            for e in 0..m {
                let mut chosen: Option<Homomorphism<R>> = None;
                for c in 0..mid {
                    let via = self.component(c, e).compose(first.component(a, c))?;
                    match &chosen {
                        None => chosen = Some(via),
                        Some(prev) if prev.g_equivalent(&via, group)? => {}
                        Some(_) => {
                            return Err(Error::Precondition(format!(
                                "composite {}->{} depends on the intermediate index {}",
                                first.source.indices()[a],
                                self.target.indices()[e],
                                self.source.indices()[c]
                            )))
                        }
                    }
                }
                components.push(chosen.ok_or_else(|| {
                    Error::Precondition("cannot compose through an empty system".into())
                })?);
            }
        }
        Self::new(first.source.clone(), self.target.clone(), components)
    }
}

/// Base change of a morphism along Z → S.
pub fn tensor_morphism<S: Ring>(m: &SystemMorphism<BigInt>) -> SystemMorphism<S> {
    SystemMorphism {
        source: Arc::new(m.source.tensor()),
        target: Arc::new(m.target.tensor()),
        components: m.components.iter().map(Homomorphism::tensor).collect(),
    }
}
