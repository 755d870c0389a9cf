use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mcg::{CurveClass, SpMatrix, SurfaceModel};

/// One step of a diffeomorphism path: a labelled diffeomorphism between manifolds, or
/// the canonical identification between two nested embedding tags.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DiffeoStep {
    Atomic {
        label: String,
        source: String,
        target: String,
        #[serde(default)]
        inverse: bool,
    },
    Nest { from: String, to: String },
}

impl DiffeoStep {
    pub fn start(&self) -> &str {
        match self {
            DiffeoStep::Atomic { source, target, inverse, .. } => {
                if *inverse {
                    target
                } else {
                    source
                }
            }
            DiffeoStep::Nest { from, .. } => from,
        }
    }

    pub fn end(&self) -> &str {
        match self {
            DiffeoStep::Atomic { source, target, inverse, .. } => {
                if *inverse {
                    source
                } else {
                    target
                }
            }
            DiffeoStep::Nest { to, .. } => to,
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            DiffeoStep::Atomic { label, source, target, inverse } => DiffeoStep::Atomic {
                label: label.clone(),
                source: source.clone(),
                target: target.clone(),
                inverse: !inverse,
            },
            DiffeoStep::Nest { from, to } => DiffeoStep::Nest {
                from: to.clone(),
                to: from.clone(),
            },
        }
    }
}

impl fmt::Display for DiffeoStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiffeoStep::Atomic { label, inverse, .. } => {
                write!(f, "{label}{}", if *inverse { "^-1" } else { "" })
            }
            DiffeoStep::Nest { from, to } => write!(f, "nest({from}>{to})"),
        }
    }
}

/// A reduced word in the free groupoid on diffeomorphism labels, where nesting steps
/// compose among themselves. Steps are in order of application.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiffeoPath(Vec<DiffeoStep>);

impl DiffeoPath {
    pub fn identity() -> Self {
        DiffeoPath(Vec::new())
    }

    pub fn atomic(label: &str, source: &str, target: &str) -> Self {
        DiffeoPath(vec![DiffeoStep::Atomic {
            label: label.into(),
            source: source.into(),
            target: target.into(),
            inverse: false,
        }])
    }

    pub fn nest(from: &str, to: &str) -> Self {
        DiffeoPath::identity()
            .then(&DiffeoPath(vec![DiffeoStep::Nest {
                from: from.into(),
                to: to.into(),
            }]))
            .expect("a single step always chains")
    }

    pub fn from_steps(steps: Vec<DiffeoStep>) -> Result<Self> {
        DiffeoPath::identity().then(&DiffeoPath(steps))
    }

    pub fn steps(&self) -> &[DiffeoStep] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn start(&self) -> Option<&str> {
        self.0.first().map(DiffeoStep::start)
    }

    pub fn end(&self) -> Option<&str> {
        self.0.last().map(DiffeoStep::end)
    }

    /// `self` followed by `next`, freely reduced.
    pub fn then(&self, next: &Self) -> Result<Self> {
        let mut out = self.0.clone();
        for step in &next.0 {
            if let Some(top) = out.last() {
                if top.end() != step.start() {
                    return Err(Error::Chaining(format!("diffeomorphism path breaks at {top} then {step}")));
                }
            }
            match (out.last().cloned(), step) {
                (Some(top), s) if top.inverse() == *s => {
                    out.pop();
                }
                (Some(DiffeoStep::Nest { from, .. }), DiffeoStep::Nest { to, .. }) => {
                    out.pop();
                    if from != *to {
                        out.push(DiffeoStep::Nest { from, to: to.clone() });
                    }
                }
                (_, DiffeoStep::Nest { from, to }) if from == to => {}
                _ => out.push(step.clone()),
            }
        }
        Ok(DiffeoPath(out))
    }

    pub fn inverse(&self) -> Self {
        DiffeoPath(self.0.iter().rev().map(DiffeoStep::inverse).collect())
    }
}

impl fmt::Display for DiffeoPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "id");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " . ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DiffeoPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn default_manifold() -> String {
    "M".into()
}

/// Combinatorial record of a closure. The complement of the product region is an
/// opaque tag; the distinguished surface is modelled by its homology.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosureDescriptor {
    pub id: String,
    pub genus: usize,
    pub complement_tag: String,
    pub surface: SurfaceModel,
    /// The marking curve of a marked closure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<CurveClass>,
    #[serde(default)]
    pub odd: bool,
    /// Label of the sutured manifold this closes.
    #[serde(default = "default_manifold")]
    pub manifold: String,
    /// Diffeomorphisms precomposed with the embedding, for closures of the form `D_f`.
    #[serde(default, skip_serializing_if = "DiffeoPath::is_identity")]
    pub precomposed: DiffeoPath,
}

impl ClosureDescriptor {
    pub fn new(id: &str, genus: usize, complement_tag: &str) -> Result<Self> {
        let d = ClosureDescriptor {
            id: id.into(),
            genus,
            complement_tag: complement_tag.into(),
            surface: SurfaceModel::new(genus),
            eta: None,
            odd: false,
            manifold: default_manifold(),
            precomposed: DiffeoPath::identity(),
        };
        d.validate()?;
        Ok(d)
    }

    pub fn marked(id: &str, genus: usize, complement_tag: &str, eta: CurveClass) -> Result<Self> {
        let mut d = Self::new(id, genus, complement_tag)?;
        d.eta = Some(eta);
        d.validate()?;
        Ok(d)
    }

    pub fn with_odd(mut self, marked_point: &str) -> Self {
        self.odd = true;
        self.surface.marked_point = Some(marked_point.into());
        self
    }

    pub fn with_manifold(mut self, manifold: &str) -> Self {
        self.manifold = manifold.into();
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Closure(format!("closure {}: {m}", self.id)));
        if self.genus < 2 {
            return bad(format!("genus {} is below 2", self.genus));
        }
        if self.surface.genus != self.genus {
            return bad("surface genus differs from closure genus".into());
        }
        if self.odd != self.surface.marked_point.is_some() {
            return bad("odd closures carry exactly one marked point".into());
        }
        if let Some(eta) = &self.eta {
            if eta.genus() != self.genus || eta.coords().len() % 2 != 0 {
                return bad(format!("eta {eta} does not live on the surface"));
            }
            if !eta.is_primitive() {
                return bad(format!("eta {eta} is not primitive"));
            }
        }
        Ok(())
    }

    /// The manifold this is a closure of, after precomposition.
    pub fn closes(&self) -> &str {
        self.precomposed.start().unwrap_or(&self.manifold)
    }

    /// The same closure regarded as a closure of the source of `f`.
    pub fn precompose(&self, f: &DiffeoPath) -> Result<Self> {
        if let Some(end) = f.end() {
            if end != self.closes() {
                return Err(Error::Chaining(format!(
                    "{f} ends at {end}, closure {} closes {}",
                    self.id,
                    self.closes()
                )));
            }
        }
        let mut d = self.clone();
        d.precomposed = f.then(&self.precomposed)?;
        d.id = format!("{}*{}", self.id, f);
        Ok(d)
    }

    /// The underlying unmarked closure.
    pub fn unmarked(&self) -> Self {
        let mut d = self.clone();
        d.eta = None;
        d
    }
}

impl fmt::Display for ClosureDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id)?;
        if self.eta.is_none() {
            write!(f, "~")?;
        }
        Ok(())
    }
}

/// Label-level identification of two complement tags.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComplementMap {
    pub label: String,
    pub source_tag: String,
    pub target_tag: String,
}

impl ComplementMap {
    pub fn identity(tag: &str) -> Self {
        ComplementMap {
            label: "id".into(),
            source_tag: tag.into(),
            target_tag: tag.into(),
        }
    }
}

/// Data for a same-genus comparison map: a complement identification together with
/// the two surface identifications and a choice `ψ`. The class `φ = φ₊⁻¹ φ₋` is
/// always derived.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GluingData {
    source: Arc<ClosureDescriptor>,
    target: Arc<ClosureDescriptor>,
    complement_map: ComplementMap,
    phi_minus: SpMatrix,
    phi_plus: SpMatrix,
    psi: SpMatrix,
}

impl GluingData {
    pub fn new(
        source: Arc<ClosureDescriptor>,
        target: Arc<ClosureDescriptor>,
        complement_map: ComplementMap,
        phi_minus: SpMatrix,
        phi_plus: SpMatrix,
        psi: SpMatrix,
    ) -> Result<Self> {
        let g = GluingData {
            source,
            target,
            complement_map,
            phi_minus,
            phi_plus,
            psi,
        };
        g.validate()?;
        Ok(g)
    }

    /// Identity data from a closure to itself.
    pub fn identity(closure: Arc<ClosureDescriptor>) -> Self {
        let id = SpMatrix::identity(closure.genus);
        GluingData {
            complement_map: ComplementMap::identity(&closure.complement_tag),
            source: closure.clone(),
            target: closure,
            phi_minus: id.clone(),
            phi_plus: id.clone(),
            psi: id,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (s, t) = (&*self.source, &*self.target);
        s.validate()?;
        t.validate()?;
        let bad = |m: String| Err(Error::Closure(format!("gluing {} -> {}: {m}", s.id, t.id)));
        if s.genus != t.genus {
            return bad(format!("genus {} differs from {}", s.genus, t.genus));
        }
        if s.odd != t.odd {
            return bad("odd and even closures cannot be glued".into());
        }
        if self.complement_map.source_tag != s.complement_tag
            || self.complement_map.target_tag != t.complement_tag
        {
            return bad(format!(
                "complement map {} goes {} -> {}",
                self.complement_map.label, self.complement_map.source_tag, self.complement_map.target_tag
            ));
        }
        for m in [&self.phi_minus, &self.phi_plus, &self.psi] {
            if m.genus() != s.genus {
                return bad("surface map of the wrong genus".into());
            }
            m.require_symplectic()?;
        }
        match (&s.eta, &t.eta) {
            (None, None) => Ok(()),
            (Some(e1), Some(e2)) => {
                let image = self.transport().apply(e1)?;
                if image != *e2 {
                    return bad(format!("eta condition fails: {e1} is sent to {image}, not {e2}"));
                }
                Ok(())
            }
            _ => bad("marked and unmarked closures cannot be glued".into()),
        }
    }

    pub fn source(&self) -> &Arc<ClosureDescriptor> {
        &self.source
    }

    pub fn target(&self) -> &Arc<ClosureDescriptor> {
        &self.target
    }

    pub fn complement_map(&self) -> &ComplementMap {
        &self.complement_map
    }

    pub fn phi_minus(&self) -> &SpMatrix {
        &self.phi_minus
    }

    pub fn phi_plus(&self) -> &SpMatrix {
        &self.phi_plus
    }

    pub fn psi(&self) -> &SpMatrix {
        &self.psi
    }

    /// `φ₊⁻¹ φ₋`.
    pub fn phi(&self) -> SpMatrix {
        self.phi_plus
            .symplectic_inverse()
            .mul(&self.phi_minus)
            .expect("genus checked on construction")
    }

    /// `φ₋ ψ`, the map carrying the source marking to the target marking.
    pub fn transport(&self) -> SpMatrix {
        self.phi_minus.mul(&self.psi).expect("genus checked on construction")
    }

    /// Same data with another choice of `ψ`.
    pub fn with_psi(&self, psi: SpMatrix) -> Result<Self> {
        let mut g = self.clone();
        g.psi = psi;
        g.validate()?;
        Ok(g)
    }
}

/// A cut-ready closure of genus `g + 1` with its two cutting tori, recorded through
/// the classes `c₁ = −c₂` on the surface, and a symplectic basis of the genus `g`
/// piece that survives the cut.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CutData {
    parent: Arc<ClosureDescriptor>,
    c1: CurveClass,
    c2: CurveClass,
    child_basis: Vec<CurveClass>,
    child: Arc<ClosureDescriptor>,
}

impl CutData {
    pub fn new(
        parent: Arc<ClosureDescriptor>,
        c1: CurveClass,
        c2: CurveClass,
        child_basis: Vec<CurveClass>,
        child_id: Option<String>,
    ) -> Result<Self> {
        parent.validate()?;
        let bad = |m: String| Err(Error::Closure(format!("cut of {}: {m}", parent.id)));
        let g = parent.genus;
        if g < 3 {
            return bad(format!("genus {g} cannot be cut to a closure of genus at least 2"));
        }
        if c1.genus() != g || c2.genus() != g {
            return bad("cutting classes do not live on the surface".into());
        }
        if c1.add(&c2) != CurveClass::zero(g) {
            return bad(format!("cutting classes {c1} and {c2} are not opposite"));
        }
        if !c1.is_primitive() {
            return bad(format!("cutting class {c1} is not primitive"));
        }
        if let Some(eta) = &parent.eta {
            let (i1, i2) = (eta.intersection(&c1)?, eta.intersection(&c2)?);
            if i1.abs() != 1 || i1 + i2 != 0 {
                return bad(format!("eta meets the cutting classes {i1} and {i2} times"));
            }
        }
        if child_basis.len() != 2 * (g - 1) || child_basis.iter().any(|b| b.genus() != g) {
            return bad(format!("child basis needs {} classes on the surface", 2 * (g - 1)));
        }
        for (i, x) in child_basis.iter().enumerate() {
            if x.intersection(&c1)? != 0 {
                return bad(format!("child basis class {x} meets the cutting class"));
            }
            for (j, y) in child_basis.iter().enumerate() {
                let expected = if i % 2 == 0 && j == i + 1 {
                    1
                } else if i % 2 == 1 && i == j + 1 {
                    -1
                } else {
                    0
                };
                if x.intersection(y)? != expected {
                    return bad("child basis is not symplectic".into());
                }
            }
        }
        let child_eta = match &parent.eta {
            None => None,
            Some(eta) => {
                let mut coords = Vec::with_capacity(child_basis.len());
                for pair in child_basis.chunks(2) {
                    coords.push(eta.intersection(&pair[1])?);
                    coords.push(-eta.intersection(&pair[0])?);
                }
                let e = CurveClass(coords);
                if !e.is_primitive() {
                    return bad(format!("induced child marking {e} is not primitive"));
                }
                Some(e)
            }
        };
        let mut child = (*parent).clone();
        child.id = child_id.unwrap_or_else(|| format!("{}/cut", parent.id));
        child.genus = g - 1;
        child.surface.genus = g - 1;
        child.eta = child_eta;
        child.validate()?;
        Ok(CutData {
            parent,
            c1,
            c2,
            child_basis,
            child: Arc::new(child),
        })
    }

    /// Cut along the last handle: `c₁ = a_g`, child basis the first `g − 1` handles.
    pub fn standard(parent: Arc<ClosureDescriptor>) -> Result<Self> {
        let g = parent.genus;
        let c1 = CurveClass::a(g, g);
        let basis = (1..g)
            .flat_map(|i| [CurveClass::a(g, i), CurveClass::b(g, i)])
            .collect();
        CutData::new(parent, c1.clone(), c1.neg(), basis, None)
    }

    pub fn parent(&self) -> &Arc<ClosureDescriptor> {
        &self.parent
    }

    pub fn c1(&self) -> &CurveClass {
        &self.c1
    }

    pub fn c2(&self) -> &CurveClass {
        &self.c2
    }

    pub fn child_basis(&self) -> &[CurveClass] {
        &self.child_basis
    }

    /// The cut-open closure.
    pub fn child(&self) -> &Arc<ClosureDescriptor> {
        &self.child
    }
}

/// The genus `g` closure left after cutting a cut-ready closure.
pub fn cut_open(cut: &CutData) -> ClosureDescriptor {
    (**cut.child()).clone()
}
