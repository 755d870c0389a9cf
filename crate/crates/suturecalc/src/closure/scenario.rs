//! Seeded coherence instances: pairs of words with equal endpoints that the calculus
//! should identify, and the exhaustive sweep behind the confluence check.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::construct::{diffeo_map, PsiOptions, PsiStep};
use super::descriptor::{ClosureDescriptor, DiffeoPath};
use super::generate::{other_psi, random_closure, random_gluing, random_genus_step, simple_cycles, ClosurePool};
use super::rank1::{evaluate_rank_one, ConsistentAssignment};
use super::rewrite::{coherence_check, local_check, normal_form};
use super::word::{Letter, MorphismWord, Node};
use crate::error::Result;
use crate::mcg::GeneratorSet;
use crate::novikov::NovikovElement;
use crate::ring::{Ring, UnitGroup};

/// Two words with equal endpoints and the relation that should identify them.
#[derive(Clone, Debug)]
pub struct CoherencePair {
    pub label: String,
    pub theorem: &'static str,
    pub left: MorphismWord,
    pub right: MorphismWord,
}

impl CoherencePair {
    pub fn coherent(&self) -> Result<bool> {
        coherence_check(&self.left, &self.right)
    }
}

pub const TRANSITIVITY: &str = "same-genus transitivity";
pub const CHOICE: &str = "independence of the surgery choices";
pub const GENUS_CHOICE: &str = "independence of the cut-ready auxiliary";
pub const CYCLE: &str = "path independence";
pub const FUNCTOR: &str = "functoriality under diffeomorphisms";

/// Deterministic generator for case `case` of a run seeded with `seed`.
pub fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

fn signed() -> PsiOptions {
    PsiOptions::default()
}

fn positive() -> PsiOptions {
    PsiOptions {
        positive_only: true,
        generators: None,
    }
}

/// `Ψ(D → D″)` against `Ψ(D′ → D″) ∘ Ψ(D → D′)` for three genus-2 closures.
pub fn transitivity_pair<G: Rng>(rng: &mut G, label: &str) -> Result<CoherencePair> {
    let d = random_closure(rng, "D", 2, "Y");
    let d1 = random_closure(rng, "D'", 2, "Y");
    let d2 = random_closure(rng, "D''", 2, "Y");
    let direct = random_gluing(rng, &d, &d2)?;
    let first = random_gluing(rng, &d, &d1)?;
    let second = random_gluing(rng, &d1, &d2)?;
    let opts = signed();
    Ok(CoherencePair {
        label: label.to_string(),
        theorem: TRANSITIVITY,
        left: PsiStep::Same(direct).word(&opts)?,
        right: PsiStep::Same(first).word(&opts)?.then(&PsiStep::Same(second).word(&opts)?)?,
    })
}

/// One gluing built with two choices of `ψ` and two factorization modes.
pub fn choice_pair<G: Rng>(rng: &mut G, label: &str) -> Result<CoherencePair> {
    let d = random_closure(rng, "D", 2, "Y");
    let d1 = random_closure(rng, "D'", 2, "Y'");
    let g = random_gluing(rng, &d, &d1)?;
    let h = other_psi(rng, &g)?;
    let custom = PsiOptions {
        positive_only: false,
        generators: Some(GeneratorSet::standard(2)),
    };
    let left = if rng.gen_bool(0.5) { signed() } else { custom };
    Ok(CoherencePair {
        label: label.to_string(),
        theorem: CHOICE,
        left: PsiStep::Same(g).word(&left)?,
        right: PsiStep::Same(h).word(&positive())?,
    })
}

/// A genus step from genus 2 to 3 through two independent auxiliaries.
pub fn genus_choice_pair<G: Rng>(rng: &mut G, label: &str) -> Result<CoherencePair> {
    let lower = random_closure(rng, "D", 2, "Y");
    let upper = random_closure(rng, "D'", 3, "Y");
    let s1 = random_genus_step(rng, &lower, &upper, "A")?;
    let s2 = random_genus_step(rng, &lower, &upper, "B")?;
    Ok(CoherencePair {
        label: label.to_string(),
        theorem: GENUS_CHOICE,
        left: PsiStep::Up(s1).word(&signed())?,
        right: PsiStep::Up(s2).word(&positive())?,
    })
}

/// Every simple cycle of the pool against the identity at its base point.
pub fn cycle_pairs(pool: &ClosurePool, label: &str) -> Result<Vec<CoherencePair>> {
    simple_cycles(pool.len())
        .into_iter()
        .map(|cycle| {
            let left = pool.path_word(&cycle, &signed())?;
            let names: Vec<&str> = cycle.iter().map(|&i| pool.closures[i].id.as_str()).collect();
            Ok(CoherencePair {
                label: format!("{label} {}", names.join(">")),
                theorem: CYCLE,
                right: MorphismWord::identity(left.source().clone()),
                left,
            })
        })
        .collect()
}

fn closure_of<G: Rng>(rng: &mut G, id: &str, manifold: &str, tag: &str) -> Arc<ClosureDescriptor> {
    Arc::new(random_closure(rng, id, 2, tag).as_ref().clone().with_manifold(manifold))
}

/// The map of `f' ∘ f` against the composite of the maps of `f` and `f'`.
pub fn functor_pair<G: Rng>(rng: &mut G, label: &str) -> Result<CoherencePair> {
    let tag = |rng: &mut G| if rng.gen_bool(0.5) { "Y" } else { "Y'" };
    let (t0, t1, t2) = (tag(rng), tag(rng), tag(rng));
    let d = closure_of(rng, "D", "M", t0);
    let d1 = closure_of(rng, "D'", "M'", t1);
    let d2 = closure_of(rng, "D''", "M''", t2);
    let f = DiffeoPath::atomic(&format!("f{}", rng.gen_range(0..4)), "M", "M'");
    let g = DiffeoPath::atomic(&format!("g{}", rng.gen_range(0..4)), "M'", "M''");
    let gf = f.then(&g)?;
    let leg = |rng: &mut G, from: &Arc<ClosureDescriptor>, to: &Arc<ClosureDescriptor>, h: &DiffeoPath| {
        let twisted = Arc::new(to.precompose(h)?);
        random_gluing(rng, from, &twisted).map(PsiStep::Same)
    };
    let direct = leg(rng, &d, &d2, &gf)?;
    let first = leg(rng, &d, &d1, &f)?;
    let second = leg(rng, &d1, &d2, &g)?;
    let opts = signed();
    Ok(CoherencePair {
        label: label.to_string(),
        theorem: FUNCTOR,
        left: diffeo_map(&gf, &d, &d2, &[direct], &opts)?,
        right: diffeo_map(&f, &d, &d1, &[first], &opts)?.then(&diffeo_map(&g, &d1, &d2, &[second], &opts)?)?,
    })
}

/// Whether the two words of a pair evaluate to values differing by an element of
/// `group`, for assignments seeded `0..assignments`.
pub fn rank_one_agrees<R: Ring>(pair: &CoherencePair, group: UnitGroup, assignments: u64) -> Result<bool> {
    for seed in 0..assignments {
        let a = ConsistentAssignment::<R>::new(seed, group);
        let l = evaluate_rank_one(&pair.left, |x| a.value(x))?;
        let r = evaluate_rank_one(&pair.right, |x| a.value(x))?;
        if !R::ratio_in_group(&l, &r, group) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Letters for the confluence sweep: every raw letter of the pool's edge words and
/// their inverses, a unit scalar at each closure, and a reduced letter between every
/// ordered pair of closures.
pub fn sweep_alphabet(pool: &ClosurePool) -> Result<Vec<Letter>> {
    let mut out: Vec<Letter> = Vec::new();
    let mut push = |l: Letter| {
        if !out.contains(&l) {
            out.push(l);
        }
    };
    for step in pool.edges.values() {
        for l in step.word(&signed())?.letters() {
            push(l.clone());
            push(l.inverse());
        }
    }
    for c in &pool.closures {
        push(Letter::UnitScalar {
            at: Node::closure(c),
            unit: -NovikovElement::one(),
        });
        for d in &pool.closures {
            if c != d {
                push(Letter::Reduced {
                    from: Node::closure(c),
                    to: Node::closure(d),
                    via: DiffeoPath::identity(),
                });
            }
        }
    }
    Ok(out)
}

/// Totals of an exhaustive sweep.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub words: usize,
    pub reducts: usize,
    /// The first word (in enumeration order) failing the local check.
    pub first_failure: Option<String>,
}

/// Runs [`local_check`] on every chaining word of length `1..=max_len` over `alphabet`.
pub fn confluence_sweep(alphabet: &[Letter], max_len: usize) -> Result<SweepReport> {
    let mut by_source: HashMap<Node, Vec<usize>> = HashMap::new();
    for (i, l) in alphabet.iter().enumerate() {
        by_source.entry(l.source()).or_default().push(i);
    }
    let starts: Vec<(usize, usize)> = (0..alphabet.len())
        .flat_map(|i| {
            let mut v = vec![(i, usize::MAX)];
            if max_len >= 2 {
                if let Some(next) = by_source.get(&alphabet[i].target()) {
                    v.extend(next.iter().map(|&j| (i, j)));
                }
            }
            v
        })
        .collect();
    let parts: Vec<Result<SweepReport>> = starts
        .par_iter()
        .map(|&(i, j)| {
            let mut report = SweepReport::default();
            let mut word = vec![alphabet[i].clone()];
            if j == usize::MAX {
                check_word(&word, &mut report)?;
                return Ok(report);
            }
            word.push(alphabet[j].clone());
            extend(alphabet, &by_source, &mut word, max_len, &mut report)?;
            Ok(report)
        })
        .collect();
    let mut total = SweepReport::default();
    for p in parts {
        let p = p?;
        total.words += p.words;
        total.reducts += p.reducts;
        if total.first_failure.is_none() {
            total.first_failure = p.first_failure;
        }
    }
    Ok(total)
}

fn check_word(letters: &[Letter], report: &mut SweepReport) -> Result<()> {
    let w = MorphismWord::from_letters(letters.to_vec())?;
    let c = local_check(&w)?;
    report.words += 1;
    report.reducts += c.reducts;
    if !c.ok() && report.first_failure.is_none() {
        report.first_failure = Some(w.to_string());
    }
    Ok(())
}

fn extend(
    alphabet: &[Letter],
    by_source: &HashMap<Node, Vec<usize>>,
    word: &mut Vec<Letter>,
    max_len: usize,
    report: &mut SweepReport,
) -> Result<()> {
    check_word(word, report)?;
    if word.len() == max_len {
        return Ok(());
    }
    let Some(next) = by_source.get(&word.last().expect("nonempty").target()) else {
        return Ok(());
    };
    for &k in next {
        word.push(alphabet[k].clone());
        extend(alphabet, by_source, word, max_len, report)?;
        word.pop();
    }
    Ok(())
}

/// Normal forms of both sides, for reports.
pub fn normal_forms(pair: &CoherencePair) -> Result<(MorphismWord, MorphismWord)> {
    Ok((normal_form(&pair.left)?, normal_form(&pair.right)?))
}
