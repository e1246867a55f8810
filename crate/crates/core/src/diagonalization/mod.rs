//! The stage construction of a uniformly c.e. family that defeats a given
//! learner, and everything read off it.

mod cases;
mod construction;
pub mod search;
mod sets;
mod stabilizing;

pub use cases::{adversarial_text, adversarial_text_with, classify_case, separation_level, AdversaryConfig, CaseObservation};
pub use construction::{Change, Construction, ConstructionState, RowDigest};
pub use sets::{
    exclusion_witness_stage, family_member, family_member_with, r_enumerator, r_hat_prefix, r_prefix, r_stage_set,
    LiveConstruction,
};
pub use stabilizing::{check_stabilizing, membership_holds, Condition, StabWitness, Stabilization};
