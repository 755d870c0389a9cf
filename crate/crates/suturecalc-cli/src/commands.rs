use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use suturecalc::closure::generate::{random_twist_word, ClosurePool};
use suturecalc::closure::khm::{khm_check, KhmModel, NestingPoset};
use suturecalc::closure::scenario::{
    case_rng, choice_pair, cycle_pairs, functor_pair, genus_choice_pair, normal_forms, rank_one_agrees,
    transitivity_pair, CoherencePair,
};
use suturecalc::closure::{
    build_surgery, coherence_check, eliminate_negative_twists, evaluate_rank_one, normal_form, Letter,
    MorphismWord, PsiStep,
};
use suturecalc::doc::{
    check_version, Check, FactorDoc, MatrixDoc, PoolDoc, Report, Status, SurgeryDoc, SystemDoc, SystemOfSystemsDoc,
    ActDoc,
};
use suturecalc::mcg::{factor_symplectic, FactorMode};
use suturecalc::novikov::{evaluate_expression, Exponent, NovikovElement};
use suturecalc::ring::{Ring, RingKind, UnitGroup, Zmod2};
use suturecalc::transys::TransitiveSystem;
use suturecalc::Error;

use crate::{Command, Common, Scenario};

/// An input that could not be read or parsed; reported with exit status 2.
#[derive(Debug)]
pub struct InputError {
    location: String,
    message: String,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

type Input<T> = Result<T, InputError>;

fn input_error(location: impl fmt::Display, message: impl fmt::Display) -> InputError {
    InputError {
        location: location.to_string(),
        message: message.to_string(),
    }
}

fn load<T: DeserializeOwned>(path: &Path) -> Input<T> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(path.display(), e))?;
    serde_json::from_str(&text).map_err(|e| {
        input_error(
            format_args!("{}:{}:{}", path.display(), e.line(), e.column()),
            e,
        )
    })
}

/// Errors that mean the document is malformed, as opposed to describing data that
/// fails a check.
fn is_schema_error(e: &Error) -> bool {
    matches!(e, Error::Parse { .. } | Error::Document(_) | Error::Dimension(_) | Error::UnitGroup { .. })
}

/// Separates schema errors (exit 2) from semantic failures, which become checks.
fn classify<T>(location: &str, r: suturecalc::Result<T>) -> Input<Result<T, Error>> {
    match r {
        Err(e) if is_schema_error(&e) => Err(input_error(location, e)),
        other => Ok(other),
    }
}

fn check(label: impl Into<String>, theorem: &str, ok: bool, details: Value) -> Check {
    Check {
        label: label.into(),
        theorem: theorem.to_string(),
        status: Status::from_bool(ok),
        details,
    }
}

fn error_check(label: impl Into<String>, theorem: &str, e: &Error) -> Check {
    check(label, theorem, false, json!({ "error": e.to_string() }))
}

macro_rules! with_ring {
    ($kind:expr, $f:ident ( $($arg:expr),* )) => {
        match $kind {
            RingKind::Integers => $f::<BigInt>($($arg),*),
            RingKind::IntegersMod2 => $f::<Zmod2>($($arg),*),
            RingKind::RationalField => $f::<BigRational>($($arg),*),
            RingKind::NovikovOverIntegers => $f::<NovikovElement>($($arg),*),
        }
    };
}

pub fn run(command: &Command, common: &Common) -> Input<Report> {
    match command {
        Command::RingEval { expression, expect } => ring_eval(expression, expect.as_deref(), common),
        Command::SystemValidate { input } => {
            let doc = system_doc(input, common)?;
            with_ring!(doc.ring, system_validate(&doc, input))
        }
        Command::SystemQuotient { input, base } => {
            let doc = system_doc(input, common)?;
            with_ring!(doc.ring, system_quotient(&doc, input, base.as_deref()))
        }
        Command::SystemTensor { input, target } => {
            let doc = system_doc(input, common)?;
            if doc.ring != RingKind::Integers {
                return Err(input_error(input.display(), "change of rings starts from a system over integers"));
            }
            with_ring!(*target, system_tensor(&doc, input))
        }
        Command::SystemFlatten { input } => {
            let mut doc: SystemOfSystemsDoc = load(input)?;
            if let Some(g) = common.unit_group {
                doc.unit_group = g;
                doc.inner.values_mut().for_each(|s| s.unit_group = g);
            }
            with_ring!(doc.ring, system_flatten(&doc, input))
        }
        Command::McgFactor { input: Some(input), .. } => mcg_factor(input),
        Command::McgFactor { input: None, genus } => mcg_factor_generated(*genus, common),
        Command::McgAct { input } => mcg_act(input),
        Command::SurgeryBuild { input } => surgery_build(input),
        Command::PsiBuild { input } => psi_build(input),
        Command::Coherence { input, generate } => match (input, generate) {
            (Some(input), None) => coherence_file(input),
            (None, Some(kind)) => Ok(coherence_generated(*kind, common)),
            _ => Err(input_error("coherence", "give either an input file or --generate")),
        },
        Command::Rank1Eval {
            input,
            generate,
            ring,
            assignments,
        } => match (input, generate) {
            (Some(input), None) => {
                let doc: Rank1Doc = load(input)?;
                let group = common.unit_group.unwrap_or(doc.unit_group);
                with_ring!(doc.ring, rank1_file(&doc, group, input))
            }
            (None, Some(kind)) => {
                let group = common.unit_group.unwrap_or(UnitGroup::Signs);
                Ok(with_ring!(*ring, rank1_generated(*kind, group, *assignments, common)))
            }
            _ => Err(input_error("rank1-eval", "give either an input file or --generate")),
        },
        Command::KhmCheck { input, ring, max_tags } => match input {
            Some(input) => {
                let doc: KhmDoc = load(input)?;
                let group = common.unit_group.unwrap_or(doc.unit_group);
                with_ring!(doc.ring, khm_file(&doc, group, common.seed, input))
            }
            None => {
                let group = common.unit_group.unwrap_or(UnitGroup::Signs);
                Ok(with_ring!(*ring, khm_generated(group, *max_tags, common)))
            }
        },
    }
}

/// Runs `cases` independent cases in parallel, keeping case order.
fn par_cases(cases: usize, f: impl Fn(usize) -> Vec<Check> + Sync + Send) -> Vec<Check> {
    let parts: Vec<Vec<Check>> = (0..cases).into_par_iter().map(f).collect();
    parts.into_iter().flatten().collect()
}

fn ring_eval(expression: &str, expect: Option<&str>, common: &Common) -> Input<Report> {
    let cutoff = Exponent::from_integer(common.cutoff);
    let value = evaluate_expression(expression, cutoff).map_err(|e| input_error("expression", e))?;
    let truncated = value.truncate(cutoff);
    let mut details = json!({
        "expression": expression,
        "cutoff": common.cutoff,
        "value": value.to_string(),
        "below_cutoff": truncated.known_terms().to_string(),
    });
    let ok = match expect {
        None => true,
        Some(e) => {
            let expected = evaluate_expression(e, cutoff).map_err(|err| input_error("--expect", err))?;
            details["expected"] = json!(e);
            expected.truncate(cutoff).known_terms() == truncated.known_terms()
        }
    };
    Ok(Report::new("ring-eval", vec![check("evaluation", "Novikov arithmetic", ok, details)]))
}

fn system_doc(path: &Path, common: &Common) -> Input<SystemDoc> {
    let mut doc: SystemDoc = load(path)?;
    if let Some(g) = common.unit_group {
        doc.unit_group = g;
    }
    Ok(doc)
}

const AXIOMS: &str = "transitive system axioms";

fn read_system<R: Ring>(doc: &SystemDoc, path: &Path) -> Input<Result<TransitiveSystem<R>, Error>> {
    classify(&path.display().to_string(), doc.to_system::<R>())
}

fn axioms_check<R: Ring>(label: &str, s: &TransitiveSystem<R>) -> Check {
    let violations = s.validate();
    check(
        label,
        AXIOMS,
        violations.is_empty(),
        json!({ "violations": violations }),
    )
}

fn system_validate<R: Ring>(doc: &SystemDoc, path: &Path) -> Input<Report> {
    let c = match read_system::<R>(doc, path)? {
        Ok(s) => axioms_check("system", &s),
        Err(e) => error_check("system", AXIOMS, &e),
    };
    Ok(Report::new("system-validate", vec![c]))
}

fn quotient_details<R: Ring>(q: &suturecalc::transys::QuotientModule<R>) -> Value {
    let ids: BTreeMap<&String, MatrixDoc> = q.identifications.iter().map(|(k, m)| (k, MatrixDoc::from_hom(m))).collect();
    json!({ "base": q.base, "rank": q.module.rank, "identifications": ids })
}

fn system_quotient<R: Ring>(doc: &SystemDoc, path: &Path, base: Option<&str>) -> Input<Report> {
    const QUOTIENT: &str = "quotient module of a strict system";
    let s = match read_system::<R>(doc, path)? {
        Ok(s) => s,
        Err(e) => return Ok(Report::new("system-quotient", vec![error_check("system", AXIOMS, &e)])),
    };
    let mut checks = vec![axioms_check("system", &s)];
    let base = match base {
        Some(b) if s.position(b).is_none() => return Err(input_error("--base", format!("unknown index {b}"))),
        Some(b) => b.to_string(),
        None => s.indices().first().cloned().unwrap_or_default(),
    };
    match s.quotient_module_at(&base) {
        Err(e) => checks.push(error_check("quotient", QUOTIENT, &e)),
        Ok(q) => {
            checks.push(check("quotient", QUOTIENT, true, quotient_details(&q)));
            for other in s.indices() {
                let ok = match (q.transport_to(&s, other), s.quotient_module_at(other)) {
                    (Ok(a), Ok(b)) => a.same_as(&b),
                    _ => false,
                };
                checks.push(check(format!("rebase at {other}"), QUOTIENT, ok, Value::Null));
            }
        }
    }
    Ok(Report::new("system-quotient", checks))
}

fn system_tensor<S: Ring>(doc: &SystemDoc, path: &Path) -> Input<Report> {
    let s = match read_system::<BigInt>(doc, path)? {
        Ok(s) => s,
        Err(e) => return Ok(Report::new("system-tensor", vec![error_check("source", AXIOMS, &e)])),
    };
    let t = s.tensor::<S>();
    let mut target = axioms_check(&format!("over {}", S::KIND), &t);
    target.details["system"] = serde_json::to_value(SystemDoc::from_system(&t)).expect("serializable");
    Ok(Report::new("system-tensor", vec![axioms_check("source", &s), target]))
}

fn system_flatten<R: Ring>(doc: &SystemOfSystemsDoc, path: &Path) -> Input<Report> {
    const FLATTEN: &str = "flattening of a system of systems";
    let sos = match classify(&path.display().to_string(), doc.to_system_of_systems::<R>())? {
        Ok(s) => s,
        Err(e) => return Ok(Report::new("system-flatten", vec![error_check("outer", FLATTEN, &e)])),
    };
    let outer = sos.validate_outer();
    let outer_details: Vec<String> = outer.iter().map(|v| format!("{v:?}")).collect();
    let mut checks = vec![check("outer", FLATTEN, outer.is_empty(), json!({ "violations": outer_details }))];
    match sos.flatten() {
        Err(e) => checks.push(error_check("flattened", FLATTEN, &e)),
        Ok(flat) => {
            let mut c = axioms_check("flattened", &flat);
            c.theorem = FLATTEN.into();
            c.details["system"] = serde_json::to_value(SystemDoc::from_system(&flat)).expect("serializable");
            checks.push(c);
        }
    }
    Ok(Report::new("system-flatten", checks))
}

const ROUND_TRIP: &str = "twist factorization of Sp(2g, Z)";

fn mcg_factor(path: &Path) -> Input<Report> {
    let doc: FactorDoc = load(path)?;
    let gens = classify(&path.display().to_string(), doc.generator_set())?;
    let result = gens.and_then(|g| {
        doc.matrix.require_symplectic()?;
        factor_symplectic(&doc.matrix, g.as_ref(), doc.mode)
    });
    let c = match result {
        Err(e) => error_check("factorization", ROUND_TRIP, &e),
        Ok(word) => {
            let ok = word.word_action() == doc.matrix;
            check(
                "factorization",
                ROUND_TRIP,
                ok,
                json!({ "mode": doc.mode, "length": word.len(), "word": word }),
            )
        }
    };
    Ok(Report::new("mcg-factor", vec![c]))
}

fn mcg_factor_generated(genus: usize, common: &Common) -> Input<Report> {
    if genus == 0 {
        return Err(input_error("--genus", "genus must be positive"));
    }
    let checks = par_cases(common.cases, |i| {
        let mut rng = case_rng(common.seed, i);
        let m = random_twist_word(&mut rng, genus, 30).word_action();
        [FactorMode::Signed, FactorMode::PositiveOnly]
            .into_iter()
            .map(|mode| {
                let label = format!("case {i} {}", serde_json::to_value(mode).expect("mode").as_str().unwrap_or(""));
                match factor_symplectic(&m, None, mode) {
                    Ok(w) if w.word_action() == m => check(label, ROUND_TRIP, true, json!({ "length": w.len() })),
                    Ok(_) => check(label, ROUND_TRIP, false, json!({ "matrix": m })),
                    Err(e) => check(label, ROUND_TRIP, false, json!({ "matrix": m, "error": e.to_string() })),
                }
            })
            .collect()
    });
    Ok(Report::new("mcg-factor", checks))
}

fn mcg_act(path: &Path) -> Input<Report> {
    let doc: ActDoc = load(path)?;
    check_version(doc.format_version).map_err(|e| input_error(path.display(), e))?;
    let loc = path.display().to_string();
    classify(&loc, doc.word.check())?.map_err(|e| input_error(&loc, e))?;
    let m = doc.word.word_action();
    let images = doc
        .curves
        .iter()
        .map(|c| m.apply(c))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| input_error(&loc, e))?;
    let details = json!({
        "matrix": m,
        "images": images,
        "identity_on_homology": m.is_identity(),
        "positive": doc.word.is_positive(),
    });
    Ok(Report::new("mcg-act", vec![check("action", "homology action of twists", true, details)]))
}

fn surgery_build(path: &Path) -> Input<Report> {
    const SURGERY: &str = "surgery presentation of a twist word";
    let doc: SurgeryDoc = load(path)?;
    let loc = path.display().to_string();
    check_version(doc.format_version).map_err(|e| input_error(&loc, e))?;
    classify(&loc, doc.word.check())?.map_err(|e| input_error(&loc, e))?;
    let mut checks = Vec::new();
    let mut word = doc.word.clone();
    if doc.eliminate_negative {
        match eliminate_negative_twists(&doc.word, None) {
            Ok(p) => {
                let ok = p.word_action() == doc.word.word_action()
                    && p.is_positive()
                    && doc.word.then_after(&p.inverse()).is_identity_on_homology();
                checks.push(check("positive rewrite", SURGERY, ok, json!({ "word": p })));
                word = p;
            }
            Err(e) => checks.push(error_check("positive rewrite", SURGERY, &e)),
        }
    }
    let split = doc.split.unwrap_or(word.len());
    if split > word.len() {
        return Err(input_error(&loc, format!("split {split} exceeds the word length {}", word.len())));
    }
    let built = build_surgery(&word, split).and_then(|p| p.validate().map(|_| p));
    checks.push(match built {
        Ok(p) => check(
            "presentation",
            SURGERY,
            true,
            json!({ "entries": p.entries, "text": p.to_string() }),
        ),
        Err(e) => error_check("presentation", SURGERY, &e),
    });
    Ok(Report::new("surgery-build", checks))
}

fn resolve_pool(doc: &PoolDoc, loc: &str) -> Input<Result<suturecalc::doc::Pool, Error>> {
    classify(loc, doc.resolve())
}

fn psi_build(path: &Path) -> Input<Report> {
    const PSI: &str = "canonical comparison maps";
    let doc: PoolDoc = load(path)?;
    let loc = path.display().to_string();
    let pool = match resolve_pool(&doc, &loc)? {
        Ok(p) => p,
        Err(e) => return Ok(Report::new("psi-build", vec![error_check("pool", PSI, &e)])),
    };
    let mut checks = Vec::new();
    for (id, g) in &pool.gluings {
        let label = format!("gluing {id}");
        checks.push(match PsiStep::Same(g.clone()).word(&pool.options) {
            Ok(w) => word_check(label, PSI, &w),
            Err(e) => error_check(label, PSI, &e),
        });
    }
    for (id, s) in &pool.genus_steps {
        let label = format!("genus step {id}");
        checks.push(match PsiStep::Up(s.clone()).word(&pool.options) {
            Ok(w) => word_check(label, PSI, &w),
            Err(e) => error_check(label, PSI, &e),
        });
    }
    for (name, w) in &doc.words {
        let label = format!("word {name}");
        let built = classify(&loc, pool.word(w))?;
        checks.push(match built {
            Ok(w) => word_check(label, PSI, &w),
            Err(e) => error_check(label, PSI, &e),
        });
    }
    Ok(Report::new("psi-build", checks))
}

fn word_check(label: String, theorem: &str, w: &MorphismWord) -> Check {
    match normal_form(w) {
        Ok(nf) => check(
            label,
            theorem,
            true,
            json!({ "letters": w.len(), "word": w.to_string(), "normal_form": nf.to_string() }),
        ),
        Err(e) => check(label, theorem, false, json!({ "word": w.to_string(), "error": e.to_string() })),
    }
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct PairDoc {
    label: String,
    left: String,
    right: String,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct CoherenceDoc {
    #[serde(default)]
    format_version: Option<u32>,
    pool: PoolDoc,
    pairs: Vec<PairDoc>,
}

fn named_word(pool: &suturecalc::doc::Pool, doc: &PoolDoc, name: &str, loc: &str) -> Input<Result<MorphismWord, Error>> {
    let w = doc
        .words
        .get(name)
        .ok_or_else(|| input_error(loc, format!("unknown word `{name}`")))?;
    classify(loc, pool.word(w))
}

const COHERENCE: &str = "equality of normal forms";

fn pair_check(label: String, theorem: &str, left: &MorphismWord, right: &MorphismWord) -> Check {
    let outcome = coherence_check(left, right).and_then(|ok| Ok((ok, normal_form(left)?, normal_form(right)?)));
    match outcome {
        Ok((ok, l, r)) => check(
            label,
            theorem,
            ok,
            json!({ "left_normal_form": l.to_string(), "right_normal_form": r.to_string() }),
        ),
        Err(e) => error_check(label, theorem, &e),
    }
}

fn coherence_file(path: &Path) -> Input<Report> {
    let doc: CoherenceDoc = load(path)?;
    let loc = path.display().to_string();
    check_version(doc.format_version).map_err(|e| input_error(&loc, e))?;
    let pool = match resolve_pool(&doc.pool, &loc)? {
        Ok(p) => p,
        Err(e) => return Ok(Report::new("coherence", vec![error_check("pool", COHERENCE, &e)])),
    };
    let mut checks = Vec::new();
    for p in &doc.pairs {
        let l = named_word(&pool, &doc.pool, &p.left, &loc)?;
        let r = named_word(&pool, &doc.pool, &p.right, &loc)?;
        checks.push(match (l, r) {
            (Ok(l), Ok(r)) => pair_check(p.label.clone(), COHERENCE, &l, &r),
            (Err(e), _) | (_, Err(e)) => error_check(p.label.clone(), COHERENCE, &e),
        });
    }
    Ok(Report::new("coherence", checks))
}

/// The coherence pairs of one generated case.
fn scenario_pairs(kind: Scenario, seed: u64, case: usize) -> Result<Vec<CoherencePair>, Error> {
    let mut rng = case_rng(seed, case);
    let label = format!("case {case}");
    Ok(match kind {
        Scenario::Transitivity => vec![transitivity_pair(&mut rng, &label)?],
        Scenario::Choice => vec![choice_pair(&mut rng, &label)?],
        Scenario::GenusChoice => vec![genus_choice_pair(&mut rng, &label)?],
        Scenario::Functor => vec![functor_pair(&mut rng, &label)?],
        Scenario::Cycle => {
            let size = rng.gen_range(2..=5);
            let genera: Vec<usize> = (0..size).map(|_| rng.gen_range(2..=3)).collect();
            let pool = ClosurePool::random(&mut rng, &genera, "Y")?;
            cycle_pairs(&pool, &label)?
        }
    })
}

fn scenario_name(kind: Scenario) -> &'static str {
    match kind {
        Scenario::Transitivity => "transitivity",
        Scenario::Choice => "choice",
        Scenario::GenusChoice => "genus-choice",
        Scenario::Cycle => "cycle",
        Scenario::Functor => "functor",
    }
}

fn coherence_generated(kind: Scenario, common: &Common) -> Report {
    let checks = par_cases(common.cases, |i| match scenario_pairs(kind, common.seed, i) {
        Err(e) => vec![error_check(format!("case {i}"), scenario_name(kind), &e)],
        Ok(pairs) => pairs
            .iter()
            .map(|p| match normal_forms(p).and_then(|(l, r)| Ok((p.coherent()?, l, r))) {
                Ok((ok, l, r)) => check(
                    p.label.clone(),
                    p.theorem,
                    ok,
                    json!({ "left_normal_form": l.to_string(), "right_normal_form": r.to_string() }),
                ),
                Err(e) => error_check(p.label.clone(), p.theorem, &e),
            })
            .collect(),
    });
    Report::new("coherence", checks)
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct Rank1Doc {
    #[serde(default)]
    format_version: Option<u32>,
    ring: RingKind,
    unit_group: UnitGroup,
    pool: PoolDoc,
    word: String,
    #[serde(default)]
    compare: Option<String>,
    /// Unit per letter kind; kinds not listed evaluate to one.
    #[serde(default)]
    assignment: BTreeMap<String, String>,
}

const RANK_ONE: &str = "rank-one evaluation";

fn rank1_file<R: Ring>(doc: &Rank1Doc, group: UnitGroup, path: &Path) -> Input<Report> {
    let loc = path.display().to_string();
    check_version(doc.format_version).map_err(|e| input_error(&loc, e))?;
    let mut units: BTreeMap<&str, R> = BTreeMap::new();
    for (kind, text) in &doc.assignment {
        let u = R::parse(text).map_err(|e| input_error(&loc, format!("assignment {kind}: {e}")))?;
        units.insert(kind, u);
    }
    let assign = |l: &Letter| -> suturecalc::Result<R> {
        let (kind, flip) = match l.kind() {
            "splice-split" if !units.contains_key("splice-split") => ("splice-merge", true),
            k => (k, l.is_inverted()),
        };
        let u = units.get(kind).cloned().unwrap_or_else(R::one);
        if flip {
            u.exact_inverse().ok_or_else(|| Error::NotAUnit(format!("{kind} is assigned {u}")))
        } else {
            Ok(u)
        }
    };
    let pool = match resolve_pool(&doc.pool, &loc)? {
        Ok(p) => p,
        Err(e) => return Ok(Report::new("rank1-eval", vec![error_check("pool", RANK_ONE, &e)])),
    };
    let word = named_word(&pool, &doc.pool, &doc.word, &loc)?;
    let mut checks = Vec::new();
    let value = word.and_then(|w| Ok((evaluate_rank_one(&w, assign)?, w)));
    let (value, w) = match value {
        Ok(v) => v,
        Err(e) => return Ok(Report::new("rank1-eval", vec![error_check("evaluation", RANK_ONE, &e)])),
    };
    checks.push(check("evaluation", RANK_ONE, true, json!({ "value": value.to_string() })));
    if let Some(name) = &doc.compare {
        let other = named_word(&pool, &doc.pool, name, &loc)?;
        let c = other.and_then(|o| {
            let coherent = coherence_check(&w, &o)?;
            let v = evaluate_rank_one(&o, assign)?;
            let agree = R::ratio_in_group(&value, &v, group);
            Ok(check(
                "comparison",
                "rank-one soundness",
                !coherent || agree,
                json!({ "coherent": coherent, "value": v.to_string(), "equivalent": agree }),
            ))
        });
        checks.push(c.unwrap_or_else(|e| error_check("comparison", "rank-one soundness", &e)));
    }
    Ok(Report::new("rank1-eval", checks))
}

fn rank1_generated<R: Ring>(kind: Scenario, group: UnitGroup, assignments: u64, common: &Common) -> Report {
    let checks = par_cases(common.cases, |i| match scenario_pairs(kind, common.seed, i) {
        Err(e) => vec![error_check(format!("case {i}"), "rank-one soundness", &e)],
        Ok(pairs) => pairs
            .iter()
            .map(|p| {
                let outcome = p.coherent().and_then(|c| Ok(!c || rank_one_agrees::<R>(p, group, assignments)?));
                match outcome {
                    Ok(ok) => check(p.label.clone(), "rank-one soundness", ok, Value::Null),
                    Err(e) => error_check(p.label.clone(), "rank-one soundness", &e),
                }
            })
            .collect(),
    });
    Report::new("rank1-eval", checks)
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct KhmDoc {
    #[serde(default)]
    format_version: Option<u32>,
    ring: RingKind,
    unit_group: UnitGroup,
    tags: Vec<String>,
    /// Pairs `[inner, outer]`.
    #[serde(default)]
    nested: Vec<(String, String)>,
    #[serde(default = "two")]
    closures_per_tag: usize,
}

fn two() -> usize {
    2
}

const KHM: &str = "flattening over nesting posets";

fn khm_case<R: Ring>(label: String, poset: NestingPoset, per_tag: usize, group: UnitGroup, seed: u64) -> Check {
    let result = KhmModel::<R>::new(poset, per_tag, group, seed).and_then(|m| khm_check(&m));
    match result {
        Ok(r) => check(
            label,
            KHM,
            r.ok(),
            json!({
                "outer_violations": r.outer_violations,
                "flat_violations": r.flat_violations,
                "refinement_independent": r.refinement_independent,
            }),
        ),
        Err(e) => error_check(label, KHM, &e),
    }
}

fn khm_file<R: Ring>(doc: &KhmDoc, group: UnitGroup, seed: u64, path: &Path) -> Input<Report> {
    let loc = path.display().to_string();
    check_version(doc.format_version).map_err(|e| input_error(&loc, e))?;
    let pos = |t: &str| {
        doc.tags
            .iter()
            .position(|x| x == t)
            .ok_or_else(|| input_error(&loc, format!("unknown tag `{t}`")))
    };
    let rel = doc
        .nested
        .iter()
        .map(|(a, b)| Ok((pos(a)?, pos(b)?)))
        .collect::<Input<Vec<_>>>()?;
    let poset = NestingPoset::new(doc.tags.clone(), &rel).map_err(|e| input_error(&loc, e))?;
    Ok(Report::new("khm-check", vec![khm_case::<R>("poset".into(), poset, doc.closures_per_tag, group, seed)]))
}

fn khm_generated<R: Ring>(group: UnitGroup, max_tags: usize, common: &Common) -> Report {
    let checks = par_cases(common.cases, |i| {
        let mut rng = case_rng(common.seed, i);
        let n = rng.gen_range(1..=max_tags.max(1));
        let poset = NestingPoset::random(&mut rng, n);
        vec![khm_case::<R>(format!("case {i}"), poset, 2, group, common.seed.wrapping_add(i as u64))]
    });
    Report::new("khm-check", checks)
}
