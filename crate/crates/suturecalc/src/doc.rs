//! JSON documents read and written by the command line front end.
//!
//! Every top-level document may carry `format_version`; only [`FORMAT_VERSION`] is
//! accepted. Ring elements are written in each ring's text format; integers may also
//! be given as JSON numbers.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::closure::{
    xi, ClosureDescriptor, ComplementMap, CutData, DiffeoPath, GenusStep, GluingData, Letter, MorphismWord, Node,
    PsiOptions, PsiStep, ThetaPayload,
};
use crate::error::{Error, Result};
use crate::mcg::{CurveClass, FactorMode, GeneratorSet, SpMatrix, TwistWord};
use crate::module::Homomorphism;
use crate::novikov::NovikovElement;
use crate::ring::{Ring, RingKind, UnitGroup};
use crate::transys::{SystemMorphism, SystemOfSystems, TransitiveSystem};

pub const FORMAT_VERSION: u32 = 1;

pub fn check_version(v: Option<u32>) -> Result<()> {
    match v {
        None | Some(FORMAT_VERSION) => Ok(()),
        Some(v) => Err(Error::Document(format!(
            "format_version {v} is not supported (expected {FORMAT_VERSION})"
        ))),
    }
}

/// A ring element as a JSON number or a string in the ring's text format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryDoc {
    Integer(i64),
    Text(String),
}

impl EntryDoc {
    pub fn parse<R: Ring>(&self) -> Result<R> {
        match self {
            EntryDoc::Integer(n) => Ok(R::from_i64(*n)),
            EntryDoc::Text(s) => R::parse(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<RingKind>,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<EntryDoc>>,
}

impl MatrixDoc {
    pub fn to_hom<R: Ring>(&self) -> Result<Homomorphism<R>> {
        if let Some(k) = self.ring {
            if k != R::KIND {
                return Err(Error::Document(format!("matrix over {k} where {} was expected", R::KIND)));
            }
        }
        if self.entries.len() != self.rows || self.entries.iter().any(|r| r.len() != self.cols) {
            return Err(Error::Dimension(format!(
                "matrix declares {}x{} but its entries do not match",
                self.rows, self.cols
            )));
        }
        let parsed: Vec<Vec<R>> = self
            .entries
            .iter()
            .map(|r| r.iter().map(EntryDoc::parse).collect())
            .collect::<Result<_>>()?;
        Ok(Homomorphism::from_fn(self.rows, self.cols, |i, j| parsed[i][j].clone()))
    }

    pub fn from_hom<R: Ring>(m: &Homomorphism<R>) -> Self {
        MatrixDoc {
            ring: None,
            rows: m.rows(),
            cols: m.cols(),
            entries: m
                .row_vecs()
                .iter()
                .map(|r| r.iter().map(|x| EntryDoc::Text(x.to_string())).collect())
                .collect(),
        }
    }
}

fn split_pair(key: &str) -> Result<(String, String)> {
    key.split_once("->")
        .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
        .ok_or_else(|| Error::Document(format!("map key `{key}` is not of the form a->b")))
}

fn pair_key(a: &str, b: &str) -> String {
    format!("{a}->{b}")
}

/// A transitive system. Missing maps are derived along a spanning tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_version: Option<u32>,
    pub ring: RingKind,
    pub unit_group: UnitGroup,
    pub indices: Vec<String>,
    pub modules: BTreeMap<String, usize>,
    #[serde(default)]
    pub maps: BTreeMap<String, MatrixDoc>,
}

impl SystemDoc {
    pub fn to_system<R: Ring>(&self) -> Result<TransitiveSystem<R>> {
        check_version(self.format_version)?;
        if self.ring != R::KIND {
            return Err(Error::Document(format!("system over {} read as {}", self.ring, R::KIND)));
        }
        let ranks = self
            .indices
            .iter()
            .map(|i| {
                self.modules
                    .get(i)
                    .copied()
                    .ok_or_else(|| Error::Document(format!("no module rank for index {i}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(extra) = self.modules.keys().find(|k| !self.indices.contains(k)) {
            return Err(Error::Document(format!("module {extra} is not an index")));
        }
        let mut given = BTreeMap::new();
        for (key, m) in &self.maps {
            given.insert(split_pair(key)?, m.to_hom()?);
        }
        TransitiveSystem::from_partial(self.indices.clone(), ranks, given, self.unit_group)
    }

    pub fn from_system<R: Ring>(s: &TransitiveSystem<R>) -> Self {
        let n = s.len();
        let mut maps = BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                maps.insert(pair_key(&s.indices()[a], &s.indices()[b]), MatrixDoc::from_hom(s.map(a, b)));
            }
        }
        SystemDoc {
            format_version: Some(FORMAT_VERSION),
            ring: R::KIND,
            unit_group: s.unit_group(),
            indices: s.indices().to_vec(),
            modules: (0..n).map(|i| (s.indices()[i].clone(), s.rank(i))).collect(),
            maps,
        }
    }
}

/// A system of systems: one inner system per outer label and connector components
/// keyed `"outer->outer"`, then `"inner->inner"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemOfSystemsDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_version: Option<u32>,
    pub ring: RingKind,
    pub unit_group: UnitGroup,
    pub outer: Vec<String>,
    pub inner: BTreeMap<String, SystemDoc>,
    #[serde(default)]
    pub connectors: BTreeMap<String, BTreeMap<String, MatrixDoc>>,
}

impl SystemOfSystemsDoc {
    pub fn to_system_of_systems<R: Ring>(&self) -> Result<SystemOfSystems<R>> {
        check_version(self.format_version)?;
        if self.ring != R::KIND {
            return Err(Error::Document(format!("document over {} read as {}", self.ring, R::KIND)));
        }
        let inner: Vec<Arc<TransitiveSystem<R>>> = self
            .outer
            .iter()
            .map(|o| {
                let doc = self
                    .inner
                    .get(o)
                    .ok_or_else(|| Error::Document(format!("no inner system for {o}")))?;
                let s = doc.to_system::<R>()?;
                if s.unit_group() != self.unit_group {
                    return Err(Error::Document(format!("inner system {o} uses another unit group")));
                }
                Ok(Arc::new(s))
            })
            .collect::<Result<_>>()?;
        let position = |label: &str| {
            self.outer
                .iter()
                .position(|o| o == label)
                .ok_or_else(|| Error::Document(format!("unknown outer index {label}")))
        };
        let mut connectors = BTreeMap::new();
        for (key, comps) in &self.connectors {
            let (p, q) = split_pair(key)?;
            let (i, j) = (position(&p)?, position(&q)?);
            let (src, tgt) = (&inner[i], &inner[j]);
            let mut list = Vec::with_capacity(src.len() * tgt.len());
            for a in src.indices() {
                for c in tgt.indices() {
                    let m = comps
                        .get(&pair_key(a, c))
                        .ok_or_else(|| Error::Document(format!("connector {key} lacks component {a}->{c}")))?;
                    list.push(m.to_hom()?);
                }
            }
            connectors.insert((i, j), SystemMorphism::new(src.clone(), tgt.clone(), list)?);
        }
        SystemOfSystems::new(self.outer.clone(), inner, connectors)
    }
}

/// Input of `mcg-factor`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_version: Option<u32>,
    pub matrix: SpMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<CurveClass>>,
    #[serde(default = "default_mode")]
    pub mode: FactorMode,
}

fn default_mode() -> FactorMode {
    FactorMode::Signed
}

impl FactorDoc {
    pub fn generator_set(&self) -> Result<Option<GeneratorSet>> {
        check_version(self.format_version)?;
        self.generators
            .as_ref()
            .map(|c| GeneratorSet::new(self.matrix.genus(), c.clone()))
            .transpose()
    }
}

/// Input of `mcg-act`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_version: Option<u32>,
    pub word: TwistWord,
    #[serde(default)]
    pub curves: Vec<CurveClass>,
}

/// Input of `surgery-build`. Without `split` the whole word is the first part.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurgeryDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_version: Option<u32>,
    pub word: TwistWord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<usize>,
    #[serde(default)]
    pub eliminate_negative: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosureDoc {
    pub id: String,
    pub genus: usize,
    pub complement_tag: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<CurveClass>,
    /// Basepoint label; present exactly for odd closures.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marked_point: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifold: Option<String>,
    #[serde(default, skip_serializing_if = "DiffeoPath::is_identity")]
    pub precomposed: DiffeoPath,
}

impl ClosureDoc {
    pub fn to_descriptor(&self) -> Result<ClosureDescriptor> {
        let mut d = match &self.eta {
            Some(eta) => ClosureDescriptor::marked(&self.id, self.genus, &self.complement_tag, eta.clone())?,
            None => ClosureDescriptor::new(&self.id, self.genus, &self.complement_tag)?,
        };
        if let Some(p) = &self.marked_point {
            d = d.with_odd(p);
        }
        if let Some(m) = &self.manifold {
            d = d.with_manifold(m);
        }
        d.precomposed = self.precomposed.clone();
        d.validate()?;
        Ok(d)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GluingDoc {
    pub id: String,
    pub source: String,
    pub target: String,
    /// Label of the complement identification; the identity when the tags agree.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complement_map: Option<String>,
    pub phi_minus: SpMatrix,
    pub phi_plus: SpMatrix,
    pub psi: SpMatrix,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutDoc {
    pub id: String,
    pub parent: String,
    pub c1: CurveClass,
    pub c2: CurveClass,
    pub child_basis: Vec<CurveClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub child_id: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenusStepDoc {
    pub id: String,
    pub lower: String,
    pub upper: String,
    pub cut: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_leg: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper_leg: Option<String>,
}

/// One step of a word description. Each step starts where the previous one ended.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum StepDoc {
    /// The same-genus word of a gluing.
    Psi(String),
    PsiInverse(String),
    /// A genus step upwards, or its inverse.
    Up(String),
    Down(String),
    Merge(String),
    Split(String),
    /// A unit scalar at the current closure, in Novikov text format.
    Unit(String),
    Relabel { diffeo: DiffeoPath, source: String, target: String },
    /// The comparison from the unmarked version of a marked closure.
    Xi(String),
    XiInverse(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordDoc {
    pub from: String,
    #[serde(default)]
    pub steps: Vec<StepDoc>,
}

/// Closures, the data relating them, and named words over them.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_version: Option<u32>,
    pub closures: Vec<ClosureDoc>,
    #[serde(default)]
    pub cuts: Vec<CutDoc>,
    #[serde(default)]
    pub gluings: Vec<GluingDoc>,
    #[serde(default)]
    pub genus_steps: Vec<GenusStepDoc>,
    #[serde(default)]
    pub words: BTreeMap<String, WordDoc>,
    #[serde(default)]
    pub positive_only: bool,
}

/// A pool with every reference resolved and every record validated.
#[derive(Clone, Debug)]
pub struct Pool {
    pub closures: BTreeMap<String, Arc<ClosureDescriptor>>,
    pub cuts: BTreeMap<String, Arc<CutData>>,
    pub gluings: BTreeMap<String, Arc<GluingData>>,
    pub genus_steps: BTreeMap<String, Arc<GenusStep>>,
    pub options: PsiOptions,
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, what: &str, id: &str) -> Result<&'a T> {
    map.get(id).ok_or_else(|| Error::Document(format!("unknown {what} `{id}`")))
}

fn insert_unique<T>(map: &mut BTreeMap<String, T>, what: &str, id: &str, value: T) -> Result<()> {
    if map.insert(id.to_string(), value).is_some() {
        return Err(Error::Document(format!("duplicate {what} `{id}`")));
    }
    Ok(())
}

impl PoolDoc {
    pub fn resolve(&self) -> Result<Pool> {
        check_version(self.format_version)?;
        let mut closures = BTreeMap::new();
        for c in &self.closures {
            insert_unique(&mut closures, "closure", &c.id, Arc::new(c.to_descriptor()?))?;
        }
        let mut cuts = BTreeMap::new();
        for c in &self.cuts {
            let parent = lookup(&closures, "closure", &c.parent)?.clone();
            let cut = Arc::new(CutData::new(
                parent,
                c.c1.clone(),
                c.c2.clone(),
                c.child_basis.clone(),
                c.child_id.clone(),
            )?);
            let child = cut.child().clone();
            insert_unique(&mut closures, "closure", &child.id.clone(), child)?;
            insert_unique(&mut cuts, "cut", &c.id, cut)?;
        }
        let mut gluings = BTreeMap::new();
        for g in &self.gluings {
            let s = lookup(&closures, "closure", &g.source)?.clone();
            let t = lookup(&closures, "closure", &g.target)?.clone();
            let map = match &g.complement_map {
                None => ComplementMap::identity(&s.complement_tag),
                Some(label) => ComplementMap {
                    label: label.clone(),
                    source_tag: s.complement_tag.clone(),
                    target_tag: t.complement_tag.clone(),
                },
            };
            let data = GluingData::new(s, t, map, g.phi_minus.clone(), g.phi_plus.clone(), g.psi.clone())?;
            insert_unique(&mut gluings, "gluing", &g.id, Arc::new(data))?;
        }
        let mut genus_steps = BTreeMap::new();
        for s in &self.genus_steps {
            let leg = |id: &Option<String>| -> Result<Option<Arc<GluingData>>> {
                id.as_ref().map(|i| lookup(&gluings, "gluing", i).cloned()).transpose()
            };
            let step = GenusStep::new(
                lookup(&closures, "closure", &s.lower)?.clone(),
                lookup(&closures, "closure", &s.upper)?.clone(),
                lookup(&cuts, "cut", &s.cut)?.clone(),
                leg(&s.lower_leg)?,
                leg(&s.upper_leg)?,
            )?;
            insert_unique(&mut genus_steps, "genus step", &s.id, Arc::new(step))?;
        }
        Ok(Pool {
            closures,
            cuts,
            gluings,
            genus_steps,
            options: PsiOptions {
                positive_only: self.positive_only,
                generators: None,
            },
        })
    }
}

impl Pool {
    pub fn closure(&self, id: &str) -> Result<&Arc<ClosureDescriptor>> {
        lookup(&self.closures, "closure", id)
    }

    /// Builds the word described by `doc`, checking that consecutive steps chain.
    pub fn word(&self, doc: &WordDoc) -> Result<MorphismWord> {
        let mut w = MorphismWord::identity(Node::closure(self.closure(&doc.from)?));
        for (i, step) in doc.steps.iter().enumerate() {
            let next = self.step_word(step, w.target())?;
            w = w
                .then(&next)
                .map_err(|e| Error::Chaining(format!("step {i} of word from {}: {e}", doc.from)))?;
        }
        Ok(w)
    }

    fn step_word(&self, step: &StepDoc, at: &Node) -> Result<MorphismWord> {
        let opts = &self.options;
        let gluing = |id: &str| lookup(&self.gluings, "gluing", id);
        let genus_step = |id: &str| lookup(&self.genus_steps, "genus step", id);
        let cut = |id: &str| lookup(&self.cuts, "cut", id);
        Ok(match step {
            StepDoc::Psi(id) => PsiStep::Same(gluing(id)?.clone()).word(opts)?,
            StepDoc::PsiInverse(id) => PsiStep::Same(gluing(id)?.clone()).word(opts)?.inverse(),
            StepDoc::Up(id) => PsiStep::Up(genus_step(id)?.clone()).word(opts)?,
            StepDoc::Down(id) => PsiStep::Down(genus_step(id)?.clone()).word(opts)?,
            StepDoc::Merge(id) => MorphismWord::single(Letter::SpliceMerge { cut: cut(id)?.clone() }),
            StepDoc::Split(id) => MorphismWord::single(Letter::SpliceSplit { cut: cut(id)?.clone() }),
            StepDoc::Unit(text) => MorphismWord::single(Letter::UnitScalar {
                at: at.clone(),
                unit: NovikovElement::parse(text)?,
            }),
            StepDoc::Relabel { diffeo, source, target } => {
                let letter = Letter::Theta {
                    payload: ThetaPayload::Relabel {
                        diffeo: diffeo.clone(),
                        source: self.closure(source)?.clone(),
                        target: self.closure(target)?.clone(),
                    },
                    inverse: false,
                };
                letter.validate()?;
                MorphismWord::single(letter)
            }
            StepDoc::Xi(id) | StepDoc::XiInverse(id) => {
                let c = self.closure(id)?;
                let eta = c
                    .eta
                    .as_ref()
                    .ok_or_else(|| Error::Closure(format!("{id} carries no marking")))?;
                let letter = xi(c, eta)?;
                if matches!(step, StepDoc::XiInverse(_)) {
                    MorphismWord::single(letter.inverse())
                } else {
                    MorphismWord::single(letter)
                }
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// One checked instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    /// The relation or theorem the check instantiates.
    pub theorem: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub format_version: u32,
    pub command: String,
    pub status: Status,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Check>,
}

impl Report {
    /// Status and counterexample follow from the checks.
    pub fn new(command: &str, checks: Vec<Check>) -> Self {
        let counterexample = checks.iter().find(|c| c.status == Status::Fail).cloned();
        Report {
            format_version: FORMAT_VERSION,
            command: command.to_string(),
            status: Status::from_bool(counterexample.is_none()),
            checks,
            counterexample,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn summary(&self) -> String {
        let failed = self.checks.iter().filter(|c| c.status == Status::Fail).count();
        let mut out = format!(
            "{}: {} ({} checks, {} failed)\n",
            self.command,
            if self.passed() { "PASS" } else { "FAIL" },
            self.checks.len(),
            failed
        );
        for c in &self.checks {
            let mark = if c.status == Status::Pass { "ok  " } else { "FAIL" };
            out.push_str(&format!("  {mark} {} [{}]\n", c.label, c.theorem));
            if self.checks.len() <= 10 && !c.details.is_null() {
                out.push_str(&format!("       {}\n", c.details));
            }
        }
        if let Some(c) = &self.counterexample {
            out.push_str(&format!("first counterexample: {}\n{}\n", c.label, c.details));
        }
        out
    }
}
