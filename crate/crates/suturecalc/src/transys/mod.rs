//! Transitive systems of free modules and their morphisms.
//!
//! A system assigns a module to every index and a class of isomorphisms (modulo a unit
//! subgroup) to every ordered pair of indices, subject to the identity and cocycle
//! axioms. Violations are reported as data so callers can print counterexamples.

mod flatten;
mod morphism;
mod quotient;

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::module::{FreeModule, GClassHom, Homomorphism};
use crate::ring::{Ring, UnitGroup};

pub use flatten::{OuterViolation, SystemOfSystems};
pub use morphism::{tensor_morphism, MorphismViolation, SystemMorphism};
pub use quotient::QuotientModule;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    /// A map has the wrong shape for its source and target modules.
    Shape { from: String, to: String, detail: String },
    NotIsomorphism { from: String, to: String },
    /// The identity is not in the class assigned to `(index, index)`.
    Identity { index: String },
    /// `g(second→third) ∘ g(first→second)` is not equivalent to `g(first→third)`.
    Cocycle { first: String, second: String, third: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape { from, to, detail } => write!(f, "map {from}->{to}: {detail}"),
            Violation::NotIsomorphism { from, to } => {
                write!(f, "map {from}->{to} is not an isomorphism")
            }
            Violation::Identity { index } => write!(f, "identity not in class at {index}"),
            Violation::Cocycle {
                first,
                second,
                third,
            } => write!(f, "cocycle fails at ({first},{second},{third})"),
        }
    }
}

/// A (projectively) transitive system over `R` with finitely many indices.
#[derive(Clone, Debug)]
pub struct TransitiveSystem<R: Ring> {
    indices: Vec<String>,
    ranks: Vec<usize>,
    /// `maps[a * n + b]` represents the class from index `a` to index `b`.
    maps: Vec<Homomorphism<R>>,
    unit_group: UnitGroup,
}

impl<R: Ring> TransitiveSystem<R> {
    /// Builds a system from a complete table of maps; shapes are checked by `validate`.
    pub fn new(
        indices: Vec<String>,
        ranks: Vec<usize>,
        maps: BTreeMap<(String, String), Homomorphism<R>>,
        unit_group: UnitGroup,
    ) -> Result<Self> {
        if indices.len() != ranks.len() {
            return Err(Error::Dimension("one rank per index is required".into()));
        }
        let position = index_positions(&indices)?;
        let n = indices.len();
        let mut table: Vec<Option<Homomorphism<R>>> = vec![None; n * n];
        for ((a, b), m) in maps {
            let (Some(&i), Some(&j)) = (position.get(&a), position.get(&b)) else {
                return Err(Error::Document(format!("map {a}->{b} names an unknown index")));
            };
            table[i * n + j] = Some(m);
        }
        let maps = table
            .into_iter()
            .enumerate()
            .map(|(k, m)| {
                m.ok_or_else(|| {
                    Error::Document(format!(
                        "missing map {}->{}",
                        indices[k / n],
                        indices[k % n]
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TransitiveSystem {
            indices,
            ranks,
            maps,
            unit_group,
        })
    }

    /// Builds a system from a partial table, deriving the missing maps by transport
    /// along a breadth-first spanning tree. Diagonal entries default to the identity.
    pub fn from_partial(
        indices: Vec<String>,
        ranks: Vec<usize>,
        given: BTreeMap<(String, String), Homomorphism<R>>,
        unit_group: UnitGroup,
    ) -> Result<Self> {
        let position = index_positions(&indices)?;
        let n = indices.len();
        let mut known: BTreeMap<(usize, usize), Homomorphism<R>> = BTreeMap::new();
        for ((a, b), m) in given {
            let (Some(&i), Some(&j)) = (position.get(&a), position.get(&b)) else {
                return Err(Error::Document(format!("map {a}->{b} names an unknown index")));
            };
            known.insert((i, j), m);
        }
        // forward[v]: root → v, backward[v]: v → root.
        let mut forward: Vec<Option<Homomorphism<R>>> = vec![None; n];
        let mut backward: Vec<Option<Homomorphism<R>>> = vec![None; n];
        if n > 0 {
            forward[0] = Some(Homomorphism::identity(ranks[0]));
            backward[0] = Some(Homomorphism::identity(ranks[0]));
        }
        let mut queue: VecDeque<usize> = (0..n.min(1)).collect();
        let no_inverse = |a: usize, b: usize| {
            Error::Document(format!(
                "map {}->{} has no finitely representable inverse",
                indices[a], indices[b]
            ))
        };
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if forward[v].is_some() {
                    continue;
                }
                let fu = forward[u].clone().expect("visited");
                let bu = backward[u].clone().expect("visited");
                let (to_v, from_v) = if let Some(m) = known.get(&(u, v)) {
                    let inv = m.exact_inverse().ok_or_else(|| no_inverse(u, v))?;
                    (m.compose(&fu)?, bu.compose(&inv)?)
                } else if let Some(m) = known.get(&(v, u)) {
                    let inv = m.exact_inverse().ok_or_else(|| no_inverse(v, u))?;
                    (inv.compose(&fu)?, bu.compose(m)?)
                } else {
                    continue;
                };
                forward[v] = Some(to_v);
                backward[v] = Some(from_v);
                queue.push_back(v);
            }
        }
        let mut maps = BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                let m = match known.get(&(a, b)) {
                    Some(m) => m.clone(),
                    None if a == b => Homomorphism::identity(ranks[a]),
                    None => {
                        let (Some(to_b), Some(from_a)) = (&forward[b], &backward[a]) else {
                            return Err(Error::Document(format!(
                                "indices {} and {} are not connected by given maps",
                                indices[a], indices[b]
                            )));
                        };
                        to_b.compose(from_a)?
                    }
                };
                maps.insert((indices[a].clone(), indices[b].clone()), m);
            }
        }
        Self::new(indices, ranks, maps, unit_group)
    }

    /// The constant system: every module `R^rank`, every map the identity.
    pub fn constant(indices: Vec<String>, rank: usize, unit_group: UnitGroup) -> Self {
        let n = indices.len();
        TransitiveSystem {
            ranks: vec![rank; n],
            maps: vec![Homomorphism::identity(rank); n * n],
            indices,
            unit_group,
        }
    }

    /// The system obtained by transporting along chosen isomorphisms `base → index`:
    /// the map `a → b` is `units(a,b) · P_b ∘ P_a⁻¹`.
    pub fn from_transports(
        indices: Vec<String>,
        transports: &[Homomorphism<R>],
        unit_group: UnitGroup,
        mut unit: impl FnMut(usize, usize) -> R,
    ) -> Result<Self> {
        let n = indices.len();
        let inverses = transports
            .iter()
            .map(|p| {
                p.exact_inverse()
                    .ok_or_else(|| Error::Precondition("transport is not invertible".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut maps = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let m = transports[b].compose(&inverses[a])?;
                maps.push(if a == b { m } else { m.scale(&unit(a, b)) });
            }
        }
        Ok(TransitiveSystem {
            indices,
            ranks: transports.iter().map(Homomorphism::rows).collect(),
            maps,
            unit_group,
        })
    }

    pub fn indices(&self) -> &[String] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn unit_group(&self) -> UnitGroup {
        self.unit_group
    }

    pub fn module(&self, i: usize) -> FreeModule {
        FreeModule {
            ring: R::KIND,
            rank: self.ranks[i],
        }
    }

    pub fn rank(&self, i: usize) -> usize {
        self.ranks[i]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.indices.iter().position(|x| x == label)
    }

    /// Representative of the class from index `a` to index `b`.
    pub fn map(&self, a: usize, b: usize) -> &Homomorphism<R> {
        &self.maps[a * self.len() + b]
    }

    pub fn class(&self, a: usize, b: usize) -> GClassHom<R> {
        GClassHom::new(self.map(a, b).clone(), self.unit_group)
    }

    pub fn set_map(&mut self, a: usize, b: usize, m: Homomorphism<R>) {
        let n = self.len();
        self.maps[a * n + b] = m;
    }

    pub fn with_unit_group(mut self, unit_group: UnitGroup) -> Self {
        self.unit_group = unit_group;
        self
    }

    fn equivalent(&self, f: &Homomorphism<R>, g: &Homomorphism<R>) -> bool {
        f.g_equivalent(g, self.unit_group).unwrap_or(false)
    }

    fn shape_violations(&self) -> Vec<Violation> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let m = self.map(a, b);
                if m.cols() != self.ranks[a] || m.rows() != self.ranks[b] {
                    out.push(Violation::Shape {
                        from: self.indices[a].clone(),
                        to: self.indices[b].clone(),
                        detail: format!(
                            "expected {}x{}, found {}x{}",
                            self.ranks[b],
                            self.ranks[a],
                            m.rows(),
                            m.cols()
                        ),
                    });
                }
            }
        }
        out
    }

    /// All axiom violations, in a deterministic order: isomorphism failures, then
    /// identity failures, then cocycle triples in lexicographic index order.
    pub fn validate(&self) -> Vec<Violation> {
        let shape = self.shape_violations();
        if !shape.is_empty() {
            return shape;
        }
        let n = self.len();
        let label = |i: usize| self.indices[i].clone();
        let mut out: Vec<Violation> = (0..n * n)
            .into_par_iter()
            .filter(|&k| !self.maps[k].is_isomorphism())
            .map(|k| Violation::NotIsomorphism {
                from: label(k / n),
                to: label(k % n),
            })
            .collect();
        out.extend(
            (0..n)
                .filter(|&a| {
                    let id = Homomorphism::identity(self.ranks[a]);
                    !self.equivalent(&id, self.map(a, a))
                })
                .map(|a| Violation::Identity { index: label(a) }),
        );
        let cocycle: Vec<Violation> = (0..n * n * n)
            .into_par_iter()
            .filter_map(|k| {
                let (a, b, c) = (k / (n * n), (k / n) % n, k % n);
                let composite = self.map(b, c).compose(self.map(a, b)).ok()?;
                (!self.equivalent(&composite, self.map(a, c))).then(|| Violation::Cocycle {
                    first: label(a),
                    second: label(b),
                    third: label(c),
                })
            })
            .collect();
        out.extend(cocycle);
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// The subsystem on the given indices, in the given order.
    pub fn restrict(&self, labels: &[String]) -> Result<Self> {
        let pos = labels
            .iter()
            .map(|l| {
                self.position(l)
                    .ok_or_else(|| Error::Document(format!("unknown index {l}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut maps = Vec::with_capacity(pos.len() * pos.len());
        for &a in &pos {
            for &b in &pos {
                maps.push(self.map(a, b).clone());
            }
        }
        Ok(TransitiveSystem {
            indices: labels.to_vec(),
            ranks: pos.iter().map(|&a| self.ranks[a]).collect(),
            maps,
            unit_group: self.unit_group,
        })
    }

    /// Same indices, ranks and classes.
    pub fn same_as(&self, other: &Self) -> bool {
        let group = self.unit_group.max(other.unit_group);
        self.indices == other.indices
            && self.ranks == other.ranks
            && self
                .maps
                .iter()
                .zip(&other.maps)
                .all(|(f, g)| f.g_equivalent(g, group).unwrap_or(false))
    }
}

impl TransitiveSystem<BigInt> {
    /// Base change along Z → S; the result is projective over the full unit group.
    pub fn tensor<S: Ring>(&self) -> TransitiveSystem<S> {
        TransitiveSystem {
            indices: self.indices.clone(),
            ranks: self.ranks.clone(),
            maps: self.maps.iter().map(Homomorphism::tensor).collect(),
            unit_group: UnitGroup::FullUnits,
        }
    }
}

fn index_positions(indices: &[String]) -> Result<BTreeMap<String, usize>> {
    let mut position = BTreeMap::new();
    for (i, l) in indices.iter().enumerate() {
        if position.insert(l.clone(), i).is_some() {
            return Err(Error::Document(format!("duplicate index {l}")));
        }
    }
    Ok(position)
}
