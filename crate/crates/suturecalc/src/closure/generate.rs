//! Seeded random instances: closures, gluings, cut-ready auxiliaries and pools.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use super::construct::{GenusStep, PsiOptions, PsiStep};
use super::descriptor::{ClosureDescriptor, ComplementMap, CutData, GluingData};
use super::word::{MorphismWord, Node};
use crate::error::Result;
use crate::mcg::{standard_generators, transitive_map, CurveClass, SpMatrix, TwistLetter, TwistWord};

/// Word of `len` random standard twists.
pub fn random_twist_word<G: Rng>(rng: &mut G, genus: usize, len: usize) -> TwistWord {
    let gens = standard_generators(genus);
    let letters = (0..len)
        .map(|_| TwistLetter {
            curve: gens[rng.gen_range(0..gens.len())].clone(),
            sign: if rng.gen_bool(0.5) { 1 } else { -1 },
        })
        .collect();
    TwistWord { genus, letters }
}

pub fn random_symplectic<G: Rng>(rng: &mut G, genus: usize, len: usize) -> SpMatrix {
    random_twist_word(rng, genus, len).word_action()
}

pub fn random_primitive<G: Rng>(rng: &mut G, genus: usize) -> CurveClass {
    random_symplectic(rng, genus, 6)
        .apply(&CurveClass::a(genus, 1))
        .expect("same genus")
}

/// A symplectic matrix fixing `eta`, conjugated from the stabilizer of `a₁`.
pub fn random_stabilizer<G: Rng>(rng: &mut G, eta: &CurveClass) -> SpMatrix {
    let genus = eta.genus();
    let a1 = CurveClass::a(genus, 1);
    let fixing: Vec<CurveClass> = standard_generators(genus)
        .into_iter()
        .filter(|c| a1.intersection(c).expect("same genus") == 0)
        .collect();
    let mut t = SpMatrix::identity(genus);
    for _ in 0..5 {
        let c = &fixing[rng.gen_range(0..fixing.len())];
        t.twist_left(c, if rng.gen_bool(0.5) { 1 } else { -1 });
    }
    let x = transitive_map(eta, &a1).expect("primitive");
    x.symplectic_inverse().mul(&t).and_then(|m| m.mul(&x)).expect("same genus")
}

pub fn random_closure<G: Rng>(rng: &mut G, id: &str, genus: usize, tag: &str) -> Arc<ClosureDescriptor> {
    let eta = random_primitive(rng, genus);
    Arc::new(ClosureDescriptor::marked(id, genus, tag, eta).expect("valid by construction"))
}

fn complement_map(s: &ClosureDescriptor, t: &ClosureDescriptor) -> ComplementMap {
    if s.complement_tag == t.complement_tag {
        ComplementMap::identity(&s.complement_tag)
    } else {
        ComplementMap {
            label: format!("C[{}>{}]", s.complement_tag, t.complement_tag),
            source_tag: s.complement_tag.clone(),
            target_tag: t.complement_tag.clone(),
        }
    }
}

/// `ψ` with `φ₋ ψ η_s = η_t`, with a random stabilizer factor.
fn random_psi<G: Rng>(rng: &mut G, s: &ClosureDescriptor, t: &ClosureDescriptor, phi_minus: &SpMatrix) -> SpMatrix {
    let genus = s.genus;
    let (m, stab) = match (&s.eta, &t.eta) {
        (Some(e1), Some(e2)) => (
            transitive_map(e1, e2).expect("primitive markings"),
            random_stabilizer(rng, e1),
        ),
        _ => (SpMatrix::identity(genus), random_symplectic(rng, genus, 5)),
    };
    phi_minus
        .symplectic_inverse()
        .mul(&m)
        .and_then(|x| x.mul(&stab))
        .expect("same genus")
}

/// Valid gluing data between two closures of the same genus.
pub fn random_gluing<G: Rng>(
    rng: &mut G,
    source: &Arc<ClosureDescriptor>,
    target: &Arc<ClosureDescriptor>,
) -> Result<Arc<GluingData>> {
    let genus = source.genus;
    let phi_minus = random_symplectic(rng, genus, 6);
    let phi_plus = random_symplectic(rng, genus, 6);
    let psi = random_psi(rng, source, target, &phi_minus);
    Ok(Arc::new(GluingData::new(
        source.clone(),
        target.clone(),
        complement_map(source, target),
        phi_minus,
        phi_plus,
        psi,
    )?))
}

/// Another valid `ψ` for the same gluing.
pub fn other_psi<G: Rng>(rng: &mut G, gluing: &GluingData) -> Result<Arc<GluingData>> {
    let psi = random_psi(rng, gluing.source(), gluing.target(), gluing.phi_minus());
    Ok(Arc::new(gluing.with_psi(psi)?))
}

/// A cut-ready closure of genus `genus` in general position, cut along `X a_g` with the
/// child basis `X e_i`.
pub fn random_cut<G: Rng>(rng: &mut G, id: &str, genus: usize, tag: &str) -> Result<Arc<CutData>> {
    let lower = genus - 1;
    let v = random_primitive(rng, lower).resize(genus);
    let eta_std = v.add(&CurveClass::b(genus, genus));
    let x = random_symplectic(rng, genus, 8);
    let eta = x.apply(&eta_std)?;
    let parent = Arc::new(ClosureDescriptor::marked(id, genus, tag, eta)?);
    let c1 = x.apply(&CurveClass::a(genus, genus))?;
    let basis = (0..2 * lower).map(|j| x.column(j)).collect();
    Ok(Arc::new(CutData::new(parent, c1.clone(), c1.neg(), basis, None)?))
}

/// A genus step from `lower` to `upper` through a fresh auxiliary named `aux_id`.
pub fn random_genus_step<G: Rng>(
    rng: &mut G,
    lower: &Arc<ClosureDescriptor>,
    upper: &Arc<ClosureDescriptor>,
    aux_id: &str,
) -> Result<Arc<GenusStep>> {
    let cut = random_cut(rng, aux_id, upper.genus, &upper.complement_tag)?;
    let lower_leg = random_gluing(rng, lower, cut.child())?;
    let upper_leg = random_gluing(rng, cut.parent(), upper)?;
    Ok(Arc::new(GenusStep::new(
        lower.clone(),
        upper.clone(),
        cut,
        Some(lower_leg),
        Some(upper_leg),
    )?))
}

/// Closures with one fixed step between every pair; the step for `(i, j)` with `i < j`
/// runs from `i` to `j`.
#[derive(Clone, Debug)]
pub struct ClosurePool {
    pub closures: Vec<Arc<ClosureDescriptor>>,
    pub edges: BTreeMap<(usize, usize), PsiStep>,
}

impl ClosurePool {
    pub fn random<G: Rng>(rng: &mut G, genera: &[usize], tag: &str) -> Result<Self> {
        let closures: Vec<_> = genera
            .iter()
            .enumerate()
            .map(|(i, &g)| random_closure(rng, &format!("D{i}"), g, tag))
            .collect();
        let mut edges = BTreeMap::new();
        for i in 0..closures.len() {
            for j in i + 1..closures.len() {
                let (a, b) = (&closures[i], &closures[j]);
                let step = match (a.genus, b.genus) {
                    (x, y) if x == y => PsiStep::Same(random_gluing(rng, a, b)?),
                    (x, y) if y == x + 1 => PsiStep::Up(random_genus_step(rng, a, b, &format!("A{i}{j}"))?),
                    (x, y) if x == y + 1 => PsiStep::Down(random_genus_step(rng, b, a, &format!("A{i}{j}"))?),
                    _ => {
                        return Err(crate::Error::Closure(format!(
                            "pool closures {} and {} differ in genus by more than one",
                            a.id, b.id
                        )))
                    }
                };
                edges.insert((i, j), step);
            }
        }
        Ok(ClosurePool { closures, edges })
    }

    pub fn len(&self) -> usize {
        self.closures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closures.is_empty()
    }

    /// The word of the edge from `i` to `j`; reversed edges use the formal inverse.
    pub fn edge_word(&self, i: usize, j: usize, opts: &PsiOptions) -> Result<MorphismWord> {
        if i < j {
            self.edges[&(i, j)].word(opts)
        } else {
            Ok(self.edges[&(j, i)].word(opts)?.inverse())
        }
    }

    /// Composite word along a sequence of pool indices.
    pub fn path_word(&self, path: &[usize], opts: &PsiOptions) -> Result<MorphismWord> {
        let mut w = MorphismWord::identity(Node::closure(&self.closures[path[0]]));
        for pair in path.windows(2) {
            w = w.then(&self.edge_word(pair[0], pair[1], opts)?)?;
        }
        Ok(w)
    }
}

/// All simple paths from `from` to `to` in the complete graph on `n` vertices.
pub fn simple_paths(n: usize, from: usize, to: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, to: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let last = *path.last().expect("nonempty");
        if last == to {
            out.push(path.clone());
            return;
        }
        for v in 0..n {
            if !path.contains(&v) {
                path.push(v);
                go(n, to, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, to, &mut vec![from], &mut out);
    out
}

/// All simple cycles of length at least two, each listed once up to rotation, as
/// closed vertex sequences starting at their smallest vertex.
pub fn simple_cycles(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for start in 0..n {
        for next in start + 1..n {
            for p in simple_paths(n, next, start) {
                if p.iter().skip(1).take(p.len().saturating_sub(2)).all(|&v| v > start) {
                    let mut cycle = vec![start];
                    cycle.extend(p);
                    out.push(cycle);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn stabilizers_fix_the_marking() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let eta = random_primitive(&mut rng, 3);
            let s = random_stabilizer(&mut rng, &eta);
            assert_eq!(s.apply(&eta).unwrap(), eta);
        }
    }

    #[test]
    fn random_cuts_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let cut = random_cut(&mut rng, "P", 3, "Y").unwrap();
            assert_eq!(cut.child().genus, 2);
        }
    }

    #[test]
    fn path_and_cycle_enumeration() {
        assert_eq!(simple_paths(3, 0, 2).len(), 2);
        // Triangles in K4 counted once per direction, plus 6 back-and-forth 2-cycles.
        let cycles = simple_cycles(4);
        assert!(cycles.iter().all(|c| c.first() == c.last()));
        assert_eq!(cycles.iter().filter(|c| c.len() == 3).count(), 6);
        assert_eq!(cycles.iter().filter(|c| c.len() == 4).count(), 8);
        assert_eq!(cycles.iter().filter(|c| c.len() == 5).count(), 6);
    }
}
