//! Finite-horizon simulation of a diagonal family that a vacillating learner
//! identifies with two hypotheses in the limit, while no learner can do so
//! when it must also converge in its finite variants.

pub mod criteria;
pub mod diagonalization;
pub mod encodings;
pub mod error;
pub mod harness;
pub mod learners;
pub mod universe;

pub use error::{Error, Result};
