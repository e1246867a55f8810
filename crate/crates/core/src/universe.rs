//! Step-indexed enumerators and the registry that numbers them.
//!
//! A [`Hypothesis`] is a plain natural number. Its residue mod 3 says which
//! kind of entry it names:
//!
//! * `3i`: the `i`-th individually registered enumerator (`0` is the empty set),
//! * `3i + 1`: a self-referential diagonal code, `i = 2⟨learner, e⟩ + variant`,
//! * `3i + 2`: member `y` of indexed family `f`, `i = ⟨f, y⟩`.
//!
//! Diagonal codes are computed rather than allocated, so the learner that
//! outputs `x_e` never needs to mutate the registry and codes do not depend on
//! evaluation order.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, RwLock, Weak};

use serde::{Deserialize, Serialize};

use crate::diagonalization::LiveConstruction;
use crate::encodings::{pair, unpair, FiniteSet};
use crate::error::{Error, Result};
use crate::learners::Learner;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Hypothesis(pub u64);

impl Hypothesis {
    /// Reserved code for the empty set.
    pub const EMPTY: Hypothesis = Hypothesis(0);

    pub fn code(self) -> u64 {
        self.0
    }

    pub fn kind(self) -> CodeKind {
        let index = self.0 / 3;
        match self.0 % 3 {
            0 => CodeKind::Plain(index),
            1 => {
                let (learner, e) = unpair(index / 2);
                let variant = if index.is_multiple_of(2) { Variant::Plain } else { Variant::Hat };
                CodeKind::Diagonal { learner: LearnerId(learner), e, variant }
            }
            _ => {
                let (family, member) = unpair(index);
                CodeKind::Family { family, member }
            }
        }
    }
}

impl fmt::Debug for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h{}", self.0)
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LearnerId(pub u64);

/// Which of the two diagonal sets a code names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `R_e`, the set missing the `a` markers.
    Plain,
    /// `R̂_e`, the set missing the `b` markers.
    Hat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodeKind {
    Plain(u64),
    Diagonal { learner: LearnerId, e: u64, variant: Variant },
    Family { family: u64, member: u64 },
}

/// The code `register_diagonal` hands out, without touching any registry.
pub fn diagonal_code(learner: LearnerId, e: u64, variant: Variant) -> Result<Hypothesis> {
    let key = pair(learner.0, e)?;
    let index = key
        .checked_mul(2)
        .and_then(|k| k.checked_add(matches!(variant, Variant::Hat) as u64))
        .ok_or(Error::Overflow("diagonal code"))?;
    index
        .checked_mul(3)
        .and_then(|c| c.checked_add(1))
        .map(Hypothesis)
        .ok_or(Error::Overflow("diagonal code"))
}

fn family_code(family: u64, member: u64) -> Result<Hypothesis> {
    pair(family, member)?
        .checked_mul(3)
        .and_then(|c| c.checked_add(2))
        .map(Hypothesis)
        .ok_or(Error::Overflow("family code"))
}

/// A monotone stage-indexed generator of a c.e. set: `W_{h,s}`.
pub trait Enumerator: Send + Sync {
    fn stage(&self, s: u64) -> Result<FiniteSet>;
}

/// A finite set, fully present from stage 0.
#[derive(Clone, Debug)]
pub struct FixedSet(pub FiniteSet);

impl Enumerator for FixedSet {
    fn stage(&self, _s: u64) -> Result<FiniteSet> {
        Ok(self.0.clone())
    }
}

/// An enumerator given by a closure. The closure must be monotone in `s`.
pub struct StagedFn<F>(pub F);

impl<F> Enumerator for StagedFn<F>
where
    F: Fn(u64) -> FiniteSet + Send + Sync,
{
    fn stage(&self, s: u64) -> Result<FiniteSet> {
        Ok((self.0)(s))
    }
}

/// Stage-wise union of two enumerators.
pub struct UnionOf(pub Arc<dyn Enumerator>, pub Arc<dyn Enumerator>);

impl Enumerator for UnionOf {
    fn stage(&self, s: u64) -> Result<FiniteSet> {
        Ok(self.0.stage(s)?.union(&self.1.stage(s)?))
    }
}

type FamilyFn = dyn Fn(u64) -> FiniteSet + Send + Sync;

/// An infinite block of codes: member `y` enumerates the fixed set `f(y)`.
#[derive(Clone)]
pub struct IndexedFamily {
    id: u64,
}

impl IndexedFamily {
    pub fn code(&self, member: u64) -> Result<Hypothesis> {
        family_code(self.id, member)
    }
}

thread_local! {
    static ADVANCING: RefCell<Vec<(LearnerId, u64)>> = const { RefCell::new(Vec::new()) };
}

/// Marks a construction as being advanced on this thread until dropped.
pub(crate) struct AdvanceGuard {
    key: (LearnerId, u64),
}

impl AdvanceGuard {
    pub(crate) fn enter(key: (LearnerId, u64), code: u64) -> Result<Self> {
        ADVANCING.with(|stack| {
            let mut stack = stack.borrow_mut();
            if stack.contains(&key) {
                return Err(Error::SelfReference(code));
            }
            stack.push(key);
            Ok(AdvanceGuard { key })
        })
    }
}

impl Drop for AdvanceGuard {
    fn drop(&mut self) {
        ADVANCING.with(|stack| {
            let mut stack = stack.borrow_mut();
            if let Some(pos) = stack.iter().rposition(|k| *k == self.key) {
                stack.remove(pos);
            }
        });
    }
}

/// Append-only numbering of every set in play, plus the learners that
/// diagonal codes refer to.
pub struct Registry {
    this: Weak<Registry>,
    plain: RwLock<Vec<Arc<dyn Enumerator>>>,
    families: RwLock<Vec<Arc<FamilyFn>>>,
    learners: RwLock<Vec<Arc<dyn Learner>>>,
    constructions: Mutex<HashMap<(LearnerId, u64), Arc<LiveConstruction>>>,
    search_budget: u64,
}

/// Default cap on candidate evaluations per bounded search.
pub const DEFAULT_SEARCH_BUDGET: u64 = 200_000;

impl Registry {
    pub fn new() -> Arc<Registry> {
        Self::with_search_budget(DEFAULT_SEARCH_BUDGET)
    }

    pub fn with_search_budget(search_budget: u64) -> Arc<Registry> {
        Arc::new_cyclic(|this| Registry {
            this: this.clone(),
            plain: RwLock::new(vec![Arc::new(FixedSet(FiniteSet::new())) as Arc<dyn Enumerator>]),
            families: RwLock::new(Vec::new()),
            learners: RwLock::new(Vec::new()),
            constructions: Mutex::new(HashMap::new()),
            search_budget,
        })
    }

    pub fn search_budget(&self) -> u64 {
        self.search_budget
    }

    pub fn register(&self, enumerator: Arc<dyn Enumerator>) -> Hypothesis {
        let mut plain = self.plain.write().expect("registry lock poisoned");
        plain.push(enumerator);
        Hypothesis(3 * (plain.len() as u64 - 1))
    }

    pub fn register_set(&self, set: FiniteSet) -> Hypothesis {
        self.register(Arc::new(FixedSet(set)))
    }

    /// Reserves an infinite block of codes; member `y` names the fixed set `f(y)`.
    pub fn register_family<F>(&self, f: F) -> IndexedFamily
    where
        F: Fn(u64) -> FiniteSet + Send + Sync + 'static,
    {
        let mut families = self.families.write().expect("registry lock poisoned");
        families.push(Arc::new(f));
        IndexedFamily { id: families.len() as u64 - 1 }
    }

    pub fn register_learner(&self, learner: Arc<dyn Learner>) -> LearnerId {
        let mut learners = self.learners.write().expect("registry lock poisoned");
        learners.push(learner);
        LearnerId(learners.len() as u64 - 1)
    }

    pub fn learner(&self, id: LearnerId) -> Result<Arc<dyn Learner>> {
        let learners = self.learners.read().expect("registry lock poisoned");
        learners.get(id.0 as usize).cloned().ok_or(Error::UnknownLearner(id.0))
    }

    pub fn learner_count(&self) -> usize {
        self.learners.read().expect("registry lock poisoned").len()
    }

    /// Codes `x_e` / `x̂_e` for the diagonal sets built against `learner`.
    /// Idempotent: the code is a function of the key.
    pub fn register_diagonal(&self, learner: LearnerId, e: u64, variant: Variant) -> Result<Hypothesis> {
        self.learner(learner)?;
        diagonal_code(learner, e, variant)
    }

    /// The shared, lazily advanced construction against `learner` with base `e`.
    pub fn construction(&self, learner: LearnerId, e: u64) -> Result<Arc<LiveConstruction>> {
        let target = self.learner(learner)?;
        let mut map = self.constructions.lock().expect("registry lock poisoned");
        Ok(map
            .entry((learner, e))
            .or_insert_with(|| Arc::new(LiveConstruction::new(learner, target, e, self.search_budget)))
            .clone())
    }

    /// Resolves a code to its enumerator.
    pub fn lookup(&self, h: Hypothesis) -> Result<Arc<dyn Enumerator>> {
        match h.kind() {
            CodeKind::Plain(i) => {
                let plain = self.plain.read().expect("registry lock poisoned");
                plain.get(i as usize).cloned().ok_or(Error::UnregisteredHypothesis(h.0))
            }
            CodeKind::Family { family, member } => {
                let families = self.families.read().expect("registry lock poisoned");
                let f = families.get(family as usize).cloned().ok_or(Error::UnregisteredHypothesis(h.0))?;
                Ok(Arc::new(FixedSet(f(member))))
            }
            CodeKind::Diagonal { learner, e, variant } => {
                self.learner(learner).map_err(|_| Error::UnregisteredHypothesis(h.0))?;
                Ok(Arc::new(DiagonalEnumerator {
                    registry: self.this.clone(),
                    learner,
                    e,
                    variant,
                }))
            }
        }
    }

    /// `W_{h,s}`.
    pub fn enumerate_to(&self, h: Hypothesis, s: u64) -> Result<FiniteSet> {
        match h.kind() {
            CodeKind::Plain(i) => {
                let entry = {
                    let plain = self.plain.read().expect("registry lock poisoned");
                    plain.get(i as usize).cloned().ok_or(Error::UnregisteredHypothesis(h.0))?
                };
                entry.stage(s)
            }
            CodeKind::Family { family, member } => {
                let f = {
                    let families = self.families.read().expect("registry lock poisoned");
                    families.get(family as usize).cloned().ok_or(Error::UnregisteredHypothesis(h.0))?
                };
                Ok(f(member))
            }
            CodeKind::Diagonal { learner, e, variant } => {
                self.learner(learner).map_err(|_| Error::UnregisteredHypothesis(h.0))?;
                self.construction(learner, e)?.diagonal_stage(self, variant, s)
            }
        }
    }

    /// `(W_{h1,s} △ W_{h2,s}) ∩ [0, bound)`.
    pub fn sym_diff_below(&self, h1: Hypothesis, h2: Hypothesis, bound: u64, s: u64) -> Result<FiniteSet> {
        let a = self.enumerate_to(h1, s)?.below(bound);
        let b = self.enumerate_to(h2, s)?.below(bound);
        Ok(a.symmetric_difference(&b))
    }

    /// Every individually registered code issued so far, in issue order.
    pub fn plain_codes(&self) -> Vec<Hypothesis> {
        let n = self.plain.read().expect("registry lock poisoned").len() as u64;
        (0..n).map(|i| Hypothesis(3 * i)).collect()
    }
}

/// The enumerator behind `x_e` / `x̂_e`: the stage-`s` approximation of
/// `R_e` / `R̂_e` published by the construction.
pub struct DiagonalEnumerator {
    registry: Weak<Registry>,
    learner: LearnerId,
    e: u64,
    variant: Variant,
}

impl Enumerator for DiagonalEnumerator {
    fn stage(&self, s: u64) -> Result<FiniteSet> {
        let registry = self.registry.upgrade().expect("registry dropped while in use");
        registry.construction(self.learner, self.e)?.diagonal_stage(&registry, self.variant, s)
    }
}
