//! Closures of sutured manifolds as combinatorial records, the canonical comparison
//! maps between them as formal words, and a rewrite system deciding when two words
//! agree.
//!
//! Agreement is decided on homology and bookkeeping data only: two words are reported
//! coherent when their normal forms coincide, which is weaker than equality of the
//! underlying cobordism maps.

mod construct;
mod descriptor;
pub mod generate;
pub mod khm;
mod rank1;
mod rewrite;
pub mod scenario;
mod surgery;
mod word;

pub use construct::{
    diffeo_map, handle_segment, psi_general, psi_genus_step, psi_same_genus, relabel, xi, GenusStep, PsiOptions,
    PsiStep,
};
pub use descriptor::{cut_open, ClosureDescriptor, ComplementMap, CutData, DiffeoPath, DiffeoStep, GluingData};
pub use rank1::{evaluate_rank_one, sample_group_unit, sample_unit, ConsistentAssignment};
pub use rewrite::{coherence_check, local_check, measure, normal_form, one_step_reducts, reduce_letter, LocalCheck};
pub use surgery::{build_surgery, eliminate_negative_twists, letter_heights, SurgeryEntry, SurgeryPresentation};
pub use word::{HandleSegment, Letter, MorphismWord, Node, ThetaPayload};
