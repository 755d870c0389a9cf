use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::descriptor::{ClosureDescriptor, ComplementMap, CutData, DiffeoPath, GluingData};
use super::surgery::{build_surgery, SurgeryPresentation};
use crate::error::{Error, Result};
use crate::mcg::{CurveClass, SpMatrix, TwistWord};
use crate::novikov::NovikovElement;

/// The surgery data of one same-genus comparison: the twist words `A` and `B` with
/// `A·B = φ` and `B = ψ⁻¹` on homology.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HandleSegment {
    gluing: Arc<GluingData>,
    a_part: TwistWord,
    b_part: TwistWord,
    surgery: SurgeryPresentation,
}

impl HandleSegment {
    pub fn new(gluing: Arc<GluingData>, a_part: TwistWord, b_part: TwistWord) -> Result<Self> {
        gluing.validate()?;
        let genus = gluing.source().genus;
        if a_part.genus != genus || b_part.genus != genus {
            return Err(Error::Dimension("handle words live on another surface".into()));
        }
        a_part.check()?;
        b_part.check()?;
        let b = b_part.word_action();
        if b.mul(gluing.psi())? != SpMatrix::identity(genus) {
            return Err(Error::Closure("B part does not act as the inverse of psi".into()));
        }
        if a_part.word_action().mul(&b)? != gluing.phi() {
            return Err(Error::Closure("A part and B part do not compose to phi".into()));
        }
        let surgery = build_surgery(&a_part.then_after(&b_part), a_part.len())?;
        Ok(HandleSegment {
            gluing,
            a_part,
            b_part,
            surgery,
        })
    }

    pub fn gluing(&self) -> &Arc<GluingData> {
        &self.gluing
    }

    pub fn a_part(&self) -> &TwistWord {
        &self.a_part
    }

    pub fn b_part(&self) -> &TwistWord {
        &self.b_part
    }

    pub fn surgery(&self) -> &SurgeryPresentation {
        &self.surgery
    }
}

/// An object of the closure groupoid: a closure, or one of the two intermediate
/// surgered manifolds of a handle segment.
#[derive(Clone)]
pub enum Node {
    Closure(Arc<ClosureDescriptor>),
    Surgered { segment: Arc<HandleSegment>, stage: u8 },
}

impl Node {
    pub fn closure(d: &Arc<ClosureDescriptor>) -> Self {
        Node::Closure(d.clone())
    }

    pub fn as_closure(&self) -> Option<&Arc<ClosureDescriptor>> {
        match self {
            Node::Closure(d) => Some(d),
            Node::Surgered { .. } => None,
        }
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Node::Closure(a), Node::Closure(b)) => Arc::ptr_eq(a, b) || a == b,
            (Node::Surgered { segment: s, stage: i }, Node::Surgered { segment: t, stage: j }) => {
                i == j && (Arc::ptr_eq(s, t) || s == t)
            }
            _ => false,
        }
    }
}

impl Eq for Node {}

impl Hash for Node {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Node::Closure(d) => {
                0u8.hash(state);
                d.hash(state);
            }
            Node::Surgered { segment, stage } => {
                1u8.hash(state);
                segment.gluing.hash(state);
                segment.a_part.hash(state);
                segment.b_part.hash(state);
                stage.hash(state);
            }
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Closure(d) => write!(f, "{d}"),
            Node::Surgered { segment, stage } => {
                let g = &segment.gluing;
                write!(f, "{}>{}#{}[{}|{}]", g.source(), g.target(), stage, segment.a_part.len(), segment.b_part.len())
            }
        }
    }
}

impl fmt::Debug for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Payload of a `Θ` letter.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ThetaPayload {
    /// Closes a handle segment onto the target closure of its gluing; `transport` is
    /// the surface identification `φ₋ψ` used on the marking.
    Gluing {
        segment: Arc<HandleSegment>,
        complement_map: ComplementMap,
        transport: SpMatrix,
    },
    /// Identifies `D′_f` with `D′` for a diffeomorphism (or nesting) path `f`.
    Relabel {
        diffeo: DiffeoPath,
        source: Arc<ClosureDescriptor>,
        target: Arc<ClosureDescriptor>,
    },
}

/// Letters of a morphism word. Every letter except `Reduced` is raw.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    /// The map of the cobordism `X₋`, from the surgered manifold to the source closure;
    /// with `inverse` set it runs the other way.
    HandleMinus { segment: Arc<HandleSegment>, inverse: bool },
    /// The map of the cobordism `X₊` between the two surgered manifolds.
    HandlePlus { segment: Arc<HandleSegment>, inverse: bool },
    Theta { payload: ThetaPayload, inverse: bool },
    /// From the cut-open closure to the cut-ready one (raises genus by one).
    SpliceMerge { cut: Arc<CutData> },
    SpliceSplit { cut: Arc<CutData> },
    /// From an unmarked closure to the same closure marked by `eta`.
    XiMerge { closure: Arc<ClosureDescriptor>, eta: CurveClass, inverse: bool },
    /// Multiplication by a unit of the ring at a node.
    UnitScalar { at: Node, unit: NovikovElement },
    /// The canonical morphism between two nodes along a diffeomorphism path.
    Reduced { from: Node, to: Node, via: DiffeoPath },
}

impl Letter {
    pub fn is_raw(&self) -> bool {
        !matches!(self, Letter::Reduced { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Letter::HandleMinus { .. } => "handle-minus",
            Letter::HandlePlus { .. } => "handle-plus",
            Letter::Theta { .. } => "theta",
            Letter::SpliceMerge { .. } => "splice-merge",
            Letter::SpliceSplit { .. } => "splice-split",
            Letter::XiMerge { .. } => "xi-merge",
            Letter::UnitScalar { .. } => "unit-scalar",
            Letter::Reduced { .. } => "reduced",
        }
    }

    /// `(source, target)` ignoring the inverse flag.
    fn forward_ends(&self) -> (Node, Node) {
        match self {
            Letter::HandleMinus { segment, .. } => (
                Node::Surgered { segment: segment.clone(), stage: 0 },
                Node::closure(segment.gluing.source()),
            ),
            Letter::HandlePlus { segment, .. } => (
                Node::Surgered { segment: segment.clone(), stage: 0 },
                Node::Surgered { segment: segment.clone(), stage: 1 },
            ),
            Letter::Theta { payload: ThetaPayload::Gluing { segment, .. }, .. } => (
                Node::Surgered { segment: segment.clone(), stage: 1 },
                Node::closure(segment.gluing.target()),
            ),
            Letter::Theta { payload: ThetaPayload::Relabel { source, target, .. }, .. } => {
                (Node::closure(source), Node::closure(target))
            }
            Letter::SpliceMerge { cut } => (Node::closure(cut.child()), Node::closure(cut.parent())),
            Letter::SpliceSplit { cut } => (Node::closure(cut.parent()), Node::closure(cut.child())),
            Letter::XiMerge { closure, eta, .. } => {
                let mut marked = (**closure).clone();
                marked.eta = Some(eta.clone());
                (Node::closure(closure), Node::Closure(Arc::new(marked)))
            }
            Letter::UnitScalar { at, .. } => (at.clone(), at.clone()),
            Letter::Reduced { from, to, .. } => (from.clone(), to.clone()),
        }
    }

    /// Whether this is the formal inverse of a forward letter.
    pub fn is_inverted(&self) -> bool {
        match self {
            Letter::HandleMinus { inverse, .. }
            | Letter::HandlePlus { inverse, .. }
            | Letter::Theta { inverse, .. }
            | Letter::XiMerge { inverse, .. } => *inverse,
            _ => false,
        }
    }

    pub fn ends(&self) -> (Node, Node) {
        let (s, t) = self.forward_ends();
        if self.is_inverted() {
            (t, s)
        } else {
            (s, t)
        }
    }

    pub fn source(&self) -> Node {
        self.ends().0
    }

    pub fn target(&self) -> Node {
        self.ends().1
    }

    pub fn inverse(&self) -> Letter {
        match self {
            Letter::HandleMinus { segment, inverse } => Letter::HandleMinus {
                segment: segment.clone(),
                inverse: !inverse,
            },
            Letter::HandlePlus { segment, inverse } => Letter::HandlePlus {
                segment: segment.clone(),
                inverse: !inverse,
            },
            Letter::Theta { payload, inverse } => Letter::Theta {
                payload: payload.clone(),
                inverse: !inverse,
            },
            Letter::SpliceMerge { cut } => Letter::SpliceSplit { cut: cut.clone() },
            Letter::SpliceSplit { cut } => Letter::SpliceMerge { cut: cut.clone() },
            Letter::XiMerge { closure, eta, inverse } => Letter::XiMerge {
                closure: closure.clone(),
                eta: eta.clone(),
                inverse: !inverse,
            },
            Letter::UnitScalar { at, unit } => Letter::UnitScalar {
                at: at.clone(),
                unit: unit
                    .monomial_inverse()
                    .unwrap_or_else(|| unit.clone()),
            },
            Letter::Reduced { from, to, via } => Letter::Reduced {
                from: to.clone(),
                to: from.clone(),
                via: via.inverse(),
            },
        }
    }

    /// The diffeomorphism path the letter carries.
    pub fn via(&self) -> DiffeoPath {
        match self {
            Letter::Theta { payload: ThetaPayload::Relabel { diffeo, .. }, inverse } => {
                if *inverse {
                    diffeo.inverse()
                } else {
                    diffeo.clone()
                }
            }
            Letter::Reduced { via, .. } => via.clone(),
            _ => DiffeoPath::identity(),
        }
    }

    /// Checks the letter's bookkeeping. Handle segments and cut data are validated on
    /// construction; the remaining conditions are rechecked here.
    pub fn validate(&self) -> Result<()> {
        match self {
            Letter::Theta { payload: ThetaPayload::Gluing { segment, complement_map, transport }, .. } => {
                let g = segment.gluing();
                let (s, t) = (g.source(), g.target());
                let bad = |m: &str| Err(Error::Closure(format!("theta {} -> {}: {m}", s.id, t.id)));
                if complement_map != g.complement_map() {
                    return bad("complement map differs from the gluing");
                }
                if s.genus != t.genus || s.odd != t.odd {
                    return bad("genus or odd flag mismatch");
                }
                if transport.genus() != s.genus {
                    return bad("transport on the wrong surface");
                }
                if transport.mul(&segment.b_part().word_action())? != *g.phi_minus() {
                    return bad("transport composed with the B part is not phi_minus");
                }
                if let (Some(e1), Some(e2)) = (&s.eta, &t.eta) {
                    if transport.apply(e1)? != *e2 {
                        return bad("transport does not carry the marking");
                    }
                }
                Ok(())
            }
            Letter::Theta { payload: ThetaPayload::Relabel { diffeo, source, target }, .. } => {
                let expected = target.precompose(diffeo)?;
                if expected.precomposed != source.precomposed
                    || expected.manifold != source.manifold
                    || expected.genus != source.genus
                    || expected.complement_tag != source.complement_tag
                    || expected.eta != source.eta
                    || expected.odd != source.odd
                {
                    return Err(Error::Closure(format!(
                        "{} is not {} precomposed with {diffeo}",
                        source.id, target.id
                    )));
                }
                Ok(())
            }
            Letter::XiMerge { closure, eta, .. } => {
                if closure.eta.is_some() {
                    return Err(Error::Closure(format!("xi letter starts at the marked closure {}", closure.id)));
                }
                if eta.genus() != closure.genus || !eta.is_primitive() {
                    return Err(Error::Closure(format!("xi marking {eta} is not a primitive class")));
                }
                Ok(())
            }
            Letter::UnitScalar { unit, .. } => {
                if !unit.is_monomial_unit() {
                    return Err(Error::NotAUnit(unit.to_string()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inv = if self.is_inverted() { "^-1" } else { "" };
        match self {
            Letter::UnitScalar { at, unit } => write!(f, "unit({unit})@{at}"),
            Letter::Reduced { from, to, via } => {
                if via.is_identity() {
                    write!(f, "Psi({from}->{to})")
                } else {
                    write!(f, "Psi({from}->{to} via {via})")
                }
            }
            Letter::Theta { payload: ThetaPayload::Relabel { diffeo, .. }, .. } => {
                let (s, t) = self.forward_ends();
                write!(f, "theta[{diffeo}]({s}->{t}){inv}")
            }
            _ => {
                let (s, t) = self.forward_ends();
                write!(f, "{}({s}->{t}){inv}", self.kind())
            }
        }
    }
}

/// A composable sequence of letters, applied left to right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismWord {
    source: Node,
    target: Node,
    letters: Vec<Letter>,
}

impl MorphismWord {
    pub fn identity(at: Node) -> Self {
        MorphismWord {
            source: at.clone(),
            target: at,
            letters: Vec::new(),
        }
    }

    pub fn from_letters(letters: Vec<Letter>) -> Result<Self> {
        let first = letters
            .first()
            .ok_or_else(|| Error::Chaining("an empty word needs an explicit endpoint".into()))?;
        let source = first.source();
        let target = letters.last().expect("nonempty").target();
        let w = MorphismWord { source, target, letters };
        w.check_chaining()?;
        Ok(w)
    }

    pub fn single(letter: Letter) -> Self {
        let (source, target) = letter.ends();
        MorphismWord {
            source,
            target,
            letters: vec![letter],
        }
    }

    pub fn check_chaining(&self) -> Result<()> {
        let mut at = self.source.clone();
        for (i, l) in self.letters.iter().enumerate() {
            let (s, t) = l.ends();
            if s != at {
                return Err(Error::Chaining(format!("letter {i} starts at {s}, previous ends at {at}")));
            }
            at = t;
        }
        if at != self.target {
            return Err(Error::Chaining(format!("word ends at {at}, declared {}", self.target)));
        }
        Ok(())
    }

    pub fn source(&self) -> &Node {
        &self.source
    }

    pub fn target(&self) -> &Node {
        &self.target
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Self) -> Result<Self> {
        if self.target != next.source {
            return Err(Error::Chaining(format!(
                "word ends at {} but the next starts at {}",
                self.target, next.source
            )));
        }
        let mut letters = self.letters.clone();
        letters.extend(next.letters.iter().cloned());
        Ok(MorphismWord {
            source: self.source.clone(),
            target: next.target.clone(),
            letters,
        })
    }

    /// Formal inverse: reversed letters, each inverted.
    pub fn inverse(&self) -> Self {
        MorphismWord {
            source: self.target.clone(),
            target: self.source.clone(),
            letters: self.letters.iter().rev().map(Letter::inverse).collect(),
        }
    }

    pub fn push(&mut self, letter: Letter) -> Result<()> {
        if letter.source() != self.target {
            return Err(Error::Chaining(format!("{letter} does not start at {}", self.target)));
        }
        self.target = letter.target();
        self.letters.push(letter);
        Ok(())
    }

    /// Same endpoints with other letters; chaining is not rechecked.
    pub(crate) fn with_letters(&self, letters: Vec<Letter>) -> Self {
        MorphismWord {
            source: self.source.clone(),
            target: self.target.clone(),
            letters,
        }
    }
}

impl fmt::Display for MorphismWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "id({})", self.source);
        }
        let parts: Vec<String> = self.letters.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" ; "))
    }
}
