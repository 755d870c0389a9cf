//! Systems indexed by embedding tags. Each tag carries a rank-one transitive system
//! over its closures; tags are compared through nesting, directly when one tag is
//! nested in the other and otherwise through a common refinement.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::Rng;

use super::descriptor::{ClosureDescriptor, DiffeoPath};
use super::rank1::ConsistentAssignment;
use super::rewrite::normal_form;
use super::word::{Letter, MorphismWord, Node};
use crate::error::{Error, Result};
use crate::module::Homomorphism;
use crate::ring::{Ring, UnitGroup};
use crate::transys::{SystemMorphism, SystemOfSystems, TransitiveSystem};

/// Embedding tags with a strict nesting relation (`nested(i, j)`: tag `i` sits inside
/// tag `j`), closed under transitivity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestingPoset {
    tags: Vec<String>,
    below: BTreeSet<(usize, usize)>,
}

impl NestingPoset {
    pub fn new(tags: Vec<String>, relations: &[(usize, usize)]) -> Result<Self> {
        let n = tags.len();
        let mut below: BTreeSet<(usize, usize)> = BTreeSet::new();
        for &(i, j) in relations {
            if i >= n || j >= n || i == j {
                return Err(Error::Document(format!("bad nesting relation ({i}, {j})")));
            }
            below.insert((i, j));
        }
        loop {
            let extra: Vec<_> = below
                .iter()
                .flat_map(|&(i, j)| below.iter().filter(move |&&(k, _)| k == j).map(move |&(_, l)| (i, l)))
                .filter(|p| !below.contains(p))
                .collect();
            if extra.is_empty() {
                break;
            }
            below.extend(extra);
        }
        if below.iter().any(|&(i, j)| i == j) {
            return Err(Error::Document("nesting relation has a cycle".into()));
        }
        Ok(NestingPoset { tags, below })
    }

    /// Random poset on `n` tags: a random subset of pairs `i > j` nested in `j`.
    pub fn random<G: Rng>(rng: &mut G, n: usize) -> Self {
        let tags = (0..n).map(|i| format!("phi{i}")).collect();
        let mut rel = Vec::new();
        for i in 0..n {
            for j in 0..i {
                if rng.gen_bool(0.35) {
                    rel.push((i, j));
                }
            }
        }
        NestingPoset::new(tags, &rel).expect("acyclic by construction")
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn nested(&self, inner: usize, outer: usize) -> bool {
        self.below.contains(&(inner, outer))
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        i == j || self.nested(i, j) || self.nested(j, i)
    }

    /// A tag nested in both; fresh unless one is already nested in the other.
    pub fn common_refinement(&self, i: usize, j: usize, salt: usize) -> String {
        if self.nested(j, i) || i == j {
            self.tags[j].clone()
        } else if self.nested(i, j) {
            self.tags[i].clone()
        } else {
            format!("{}&{}#{salt}", self.tags[i], self.tags[j])
        }
    }
}

/// The identification path from tag `i` to tag `j`: the nesting generator when the
/// tags are comparable, otherwise the two generators through `refinement`.
pub fn khm_psi_path(poset: &NestingPoset, i: usize, j: usize, refinement: Option<&str>) -> Result<DiffeoPath> {
    let (a, b) = (&poset.tags[i], &poset.tags[j]);
    if poset.comparable(i, j) {
        return Ok(DiffeoPath::nest(a, b));
    }
    let r = refinement
        .map(str::to_string)
        .unwrap_or_else(|| poset.common_refinement(i, j, 0));
    DiffeoPath::nest(a, &r).then(&DiffeoPath::nest(&r, b))
}

/// Rank-one data over a nesting poset: closures per tag and an assignment of units.
#[derive(Clone, Debug)]
pub struct KhmModel<R: Ring> {
    poset: NestingPoset,
    closures: Vec<Vec<Arc<ClosureDescriptor>>>,
    assignment: ConsistentAssignment<R>,
    group: UnitGroup,
}

impl<R: Ring> KhmModel<R> {
    pub fn new(poset: NestingPoset, closures_per_tag: usize, group: UnitGroup, seed: u64) -> Result<Self> {
        if closures_per_tag == 0 {
            return Err(Error::Precondition("each tag needs a closure".into()));
        }
        let closures = poset
            .tags
            .iter()
            .map(|t| {
                (0..closures_per_tag)
                    .map(|k| ClosureDescriptor::new(&format!("{t}:{k}"), 2, t).map(Arc::new))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(KhmModel {
            poset,
            closures,
            assignment: ConsistentAssignment::new(seed, group),
            group,
        })
    }

    pub fn poset(&self) -> &NestingPoset {
        &self.poset
    }

    fn node(&self, tag: usize, k: usize) -> Node {
        Node::closure(&self.closures[tag][k])
    }

    fn unit(x: R) -> Homomorphism<R> {
        Homomorphism::from_rows(vec![vec![x]]).expect("1x1")
    }

    /// The rank-one system of one tag; maps are values of the canonical letters.
    pub fn inner_system(&self, tag: usize) -> Result<TransitiveSystem<R>> {
        let cs = &self.closures[tag];
        let labels: Vec<String> = cs.iter().map(|c| c.id.clone()).collect();
        let mut maps = BTreeMap::new();
        for a in 0..cs.len() {
            for b in 0..cs.len() {
                let v = if a == b {
                    R::one()
                } else {
                    self.assignment.value(&Letter::Reduced {
                        from: self.node(tag, a),
                        to: self.node(tag, b),
                        via: DiffeoPath::identity(),
                    })?
                };
                maps.insert((labels[a].clone(), labels[b].clone()), Self::unit(v));
            }
        }
        TransitiveSystem::new(labels, vec![1; cs.len()], maps, self.group)
    }

    /// The connector word from closure `a` of tag `i` to closure `c` of tag `j`.
    pub fn connector_word(&self, i: usize, j: usize, a: usize, c: usize, refinement: Option<&str>) -> Result<MorphismWord> {
        let path = khm_psi_path(&self.poset, i, j, refinement)?;
        let letters = vec![
            Letter::Reduced {
                from: self.node(i, a),
                to: self.node(i, 0),
                via: DiffeoPath::identity(),
            },
            Letter::Reduced {
                from: self.node(i, 0),
                to: self.node(j, 0),
                via: path,
            },
            Letter::Reduced {
                from: self.node(j, 0),
                to: self.node(j, c),
                via: DiffeoPath::identity(),
            },
        ];
        MorphismWord::from_letters(letters)
    }

    /// The connector between the systems of tags `i` and `j`, evaluated on normal forms.
    pub fn connector(
        &self,
        inner: &[Arc<TransitiveSystem<R>>],
        i: usize,
        j: usize,
        refinement: Option<&str>,
    ) -> Result<SystemMorphism<R>> {
        let (n, m) = (self.closures[i].len(), self.closures[j].len());
        let mut comps = Vec::with_capacity(n * m);
        for a in 0..n {
            for c in 0..m {
                let nf = normal_form(&self.connector_word(i, j, a, c, refinement)?)?;
                let v = match nf.letters().first() {
                    None => R::one(),
                    Some(l) => self.assignment.exact_value(l),
                };
                comps.push(Self::unit(v));
            }
        }
        SystemMorphism::new(inner[i].clone(), inner[j].clone(), comps)
    }

    /// The system of systems, with connectors through the given refinement salt.
    pub fn build(&self, salt: usize) -> Result<SystemOfSystems<R>> {
        let n = self.poset.tags.len();
        let inner: Vec<Arc<TransitiveSystem<R>>> =
            (0..n).map(|t| self.inner_system(t).map(Arc::new)).collect::<Result<_>>()?;
        let mut connectors = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                let r = self.poset.common_refinement(i, j, salt);
                connectors.insert((i, j), self.connector(&inner, i, j, Some(&r))?);
            }
        }
        SystemOfSystems::new(self.poset.tags.clone(), inner, connectors)
    }
}

/// Outcome of the flattening checks on one poset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KhmReport {
    pub outer_violations: usize,
    pub flat_violations: usize,
    pub refinement_independent: bool,
}

impl KhmReport {
    pub fn ok(&self) -> bool {
        self.outer_violations == 0 && self.flat_violations == 0 && self.refinement_independent
    }
}

/// Validates the outer system and its flattening, and compares connectors built
/// through two different common refinements.
pub fn khm_check<R: Ring>(model: &KhmModel<R>) -> Result<KhmReport> {
    let sos = model.build(0)?;
    let other = model.build(1)?;
    let n = model.poset.tags.len();
    let refinement_independent =
        (0..n).all(|i| (0..n).all(|j| sos.connector(i, j).same_as(other.connector(i, j))));
    let outer_violations = sos.validate_outer().len();
    let flat_violations = sos.flatten()?.validate().len();
    Ok(KhmReport {
        outer_violations,
        flat_violations,
        refinement_independent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::novikov::NovikovElement;
    use num_bigint::BigInt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn nested_tags_use_the_direct_generator() {
        let p = NestingPoset::new(vec!["p".into(), "q".into(), "r".into()], &[(1, 0)]).unwrap();
        assert_eq!(khm_psi_path(&p, 0, 1, None).unwrap(), DiffeoPath::nest("p", "q"));
        let via_x = khm_psi_path(&p, 0, 2, Some("x")).unwrap();
        let via_y = khm_psi_path(&p, 0, 2, Some("y")).unwrap();
        assert_eq!(via_x, via_y);
        assert!(NestingPoset::new(vec!["p".into(), "q".into()], &[(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn random_posets_flatten() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=4 {
            let poset = NestingPoset::random(&mut rng, n);
            let z = KhmModel::<BigInt>::new(poset.clone(), 2, UnitGroup::Signs, 3).unwrap();
            assert!(khm_check(&z).unwrap().ok());
            let nov = KhmModel::<NovikovElement>::new(poset, 2, UnitGroup::Signs, 4).unwrap();
            assert!(khm_check(&nov).unwrap().ok());
        }
    }
}
