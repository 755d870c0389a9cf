use std::sync::Arc;

use super::descriptor::{ClosureDescriptor, CutData, DiffeoPath, GluingData};
use super::word::{HandleSegment, Letter, MorphismWord, Node, ThetaPayload};
use crate::error::{Error, Result};
use crate::mcg::{factor_symplectic, CurveClass, FactorMode, GeneratorSet};

/// How handle words are factored.
#[derive(Clone, Debug, Default)]
pub struct PsiOptions {
    pub positive_only: bool,
    pub generators: Option<GeneratorSet>,
}

impl PsiOptions {
    fn mode(&self) -> FactorMode {
        if self.positive_only {
            FactorMode::PositiveOnly
        } else {
            FactorMode::Signed
        }
    }
}

/// The handle segment of a gluing: `A` factors `φψ` and `B` factors `ψ⁻¹`.
pub fn handle_segment(gluing: &Arc<GluingData>, opts: &PsiOptions) -> Result<Arc<HandleSegment>> {
    let gens = opts.generators.as_ref();
    let a = factor_symplectic(&gluing.phi().mul(gluing.psi())?, gens, opts.mode())?;
    let b = factor_symplectic(&gluing.psi().symplectic_inverse(), gens, opts.mode())?;
    Ok(Arc::new(HandleSegment::new(gluing.clone(), a, b)?))
}

/// `Θ ∘ X₊ ∘ X₋⁻¹` for a same-genus gluing.
pub fn psi_same_genus(gluing: &Arc<GluingData>, opts: &PsiOptions) -> Result<MorphismWord> {
    let segment = handle_segment(gluing, opts)?;
    let theta = ThetaPayload::Gluing {
        segment: segment.clone(),
        complement_map: gluing.complement_map().clone(),
        transport: gluing.transport(),
    };
    MorphismWord::from_letters(vec![
        Letter::HandleMinus {
            segment: segment.clone(),
            inverse: true,
        },
        Letter::HandlePlus { segment, inverse: false },
        Letter::Theta {
            payload: theta,
            inverse: false,
        },
    ])
}

/// A genus `g → g + 1` step through a cut-ready auxiliary closure. A leg is absent
/// when its endpoints already coincide.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GenusStep {
    lower: Arc<ClosureDescriptor>,
    upper: Arc<ClosureDescriptor>,
    cut: Arc<CutData>,
    lower_leg: Option<Arc<GluingData>>,
    upper_leg: Option<Arc<GluingData>>,
}

impl GenusStep {
    pub fn new(
        lower: Arc<ClosureDescriptor>,
        upper: Arc<ClosureDescriptor>,
        cut: Arc<CutData>,
        lower_leg: Option<Arc<GluingData>>,
        upper_leg: Option<Arc<GluingData>>,
    ) -> Result<Self> {
        if upper.genus != lower.genus + 1 {
            return Err(Error::Closure(format!(
                "genus step from {} (genus {}) to {} (genus {})",
                lower.id, lower.genus, upper.id, upper.genus
            )));
        }
        match &lower_leg {
            Some(g) if g.source() != &lower || g.target() != cut.child() => {
                return Err(Error::Closure("lower leg does not join the closure to the cut-open closure".into()))
            }
            None if &lower != cut.child() => {
                return Err(Error::Closure(format!("{} is not the cut-open closure", lower.id)))
            }
            _ => {}
        }
        match &upper_leg {
            Some(g) if g.source() != cut.parent() || g.target() != &upper => {
                return Err(Error::Closure("upper leg does not join the cut-ready closure to the target".into()))
            }
            None if &upper != cut.parent() => {
                return Err(Error::Closure(format!("{} is not the cut-ready closure", upper.id)))
            }
            _ => {}
        }
        Ok(GenusStep {
            lower,
            upper,
            cut,
            lower_leg,
            upper_leg,
        })
    }

    pub fn lower(&self) -> &Arc<ClosureDescriptor> {
        &self.lower
    }

    pub fn upper(&self) -> &Arc<ClosureDescriptor> {
        &self.upper
    }

    pub fn cut(&self) -> &Arc<CutData> {
        &self.cut
    }

    pub fn lower_leg(&self) -> Option<&Arc<GluingData>> {
        self.lower_leg.as_ref()
    }

    pub fn upper_leg(&self) -> Option<&Arc<GluingData>> {
        self.upper_leg.as_ref()
    }
}

/// Same-genus leg, splice merge, same-genus leg.
pub fn psi_genus_step(step: &GenusStep, opts: &PsiOptions) -> Result<MorphismWord> {
    let mut word = match &step.lower_leg {
        Some(g) => psi_same_genus(g, opts)?,
        None => MorphismWord::identity(Node::closure(&step.lower)),
    };
    word.push(Letter::SpliceMerge { cut: step.cut.clone() })?;
    if let Some(g) = &step.upper_leg {
        word = word.then(&psi_same_genus(g, opts)?)?;
    }
    Ok(word)
}

/// One edge of a path of closures.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PsiStep {
    Same(Arc<GluingData>),
    Up(Arc<GenusStep>),
    /// A genus step traversed downwards, as the formal inverse.
    Down(Arc<GenusStep>),
}

impl PsiStep {
    pub fn start(&self) -> &Arc<ClosureDescriptor> {
        match self {
            PsiStep::Same(g) => g.source(),
            PsiStep::Up(s) => &s.lower,
            PsiStep::Down(s) => &s.upper,
        }
    }

    pub fn end(&self) -> &Arc<ClosureDescriptor> {
        match self {
            PsiStep::Same(g) => g.target(),
            PsiStep::Up(s) => &s.upper,
            PsiStep::Down(s) => &s.lower,
        }
    }

    pub fn reversed(&self) -> Option<Self> {
        match self {
            PsiStep::Same(_) => None,
            PsiStep::Up(s) => Some(PsiStep::Down(s.clone())),
            PsiStep::Down(s) => Some(PsiStep::Up(s.clone())),
        }
    }

    pub fn word(&self, opts: &PsiOptions) -> Result<MorphismWord> {
        match self {
            PsiStep::Same(g) => psi_same_genus(g, opts),
            PsiStep::Up(s) => psi_genus_step(s, opts),
            PsiStep::Down(s) => Ok(psi_genus_step(s, opts)?.inverse()),
        }
    }
}

/// Concatenated step words along a path starting at `from`.
pub fn psi_general(from: &Arc<ClosureDescriptor>, steps: &[PsiStep], opts: &PsiOptions) -> Result<MorphismWord> {
    let mut word = MorphismWord::identity(Node::closure(from));
    let mut at = from.clone();
    for (i, step) in steps.iter().enumerate() {
        if step.start() != &at {
            return Err(Error::Chaining(format!(
                "path step {i} starts at {}, previous step ends at {}",
                step.start().id,
                at.id
            )));
        }
        let (g1, g2) = (step.start().genus, step.end().genus);
        if g1.abs_diff(g2) > 1 {
            return Err(Error::Closure(format!("path step {i} changes genus by more than one")));
        }
        word = word.then(&step.word(opts)?)?;
        at = step.end().clone();
    }
    Ok(word)
}

/// The letter `Θ_{D′_f, D′}` together with the closure `D′_f`.
pub fn relabel(f: &DiffeoPath, target: &Arc<ClosureDescriptor>) -> Result<(Arc<ClosureDescriptor>, Letter)> {
    let source = Arc::new(target.precompose(f)?);
    let letter = Letter::Theta {
        payload: ThetaPayload::Relabel {
            diffeo: f.clone(),
            source: source.clone(),
            target: target.clone(),
        },
        inverse: false,
    };
    letter.validate()?;
    Ok((source, letter))
}

/// `Θ_{D′_f, D′} ∘ Ψ_{D, D′_f}`, where `steps` is a path from `D` to `D′_f`.
pub fn diffeo_map(
    f: &DiffeoPath,
    from: &Arc<ClosureDescriptor>,
    to: &Arc<ClosureDescriptor>,
    steps: &[PsiStep],
    opts: &PsiOptions,
) -> Result<MorphismWord> {
    let (twisted, letter) = relabel(f, to)?;
    if from.closes() != twisted.closes() {
        return Err(Error::Closure(format!(
            "{} closes {} but {} closes {}",
            from.id,
            from.closes(),
            twisted.id,
            twisted.closes()
        )));
    }
    let mut word = psi_general(from, steps, opts)?;
    if word.target() != &Node::closure(&twisted) {
        return Err(Error::Chaining(format!("path does not end at {}", twisted.id)));
    }
    word.push(letter)?;
    Ok(word)
}

/// The comparison letter from the unmarked closure to the closure marked by `eta`.
pub fn xi(closure: &Arc<ClosureDescriptor>, eta: &CurveClass) -> Result<Letter> {
    let letter = Letter::XiMerge {
        closure: Arc::new(closure.unmarked()),
        eta: eta.clone(),
        inverse: false,
    };
    letter.validate()?;
    Ok(letter)
}
