//! The diagonal sets `R_e`, `R̂_e` and the family built from them.
//!
//! Two independent routes describe `R_e` at a horizon:
//!
//! * [`r_prefix`] removes the observed `a`-markers directly;
//! * the enumerator behind `x_e` admits `x` once a Σ₁ witness for
//!   `x ≠ a_{e,ℓ}` has appeared for every `ℓ <= x`.

use std::sync::{Arc, Mutex};

use super::construction::Construction;
use crate::encodings::{finite_set_decode, FiniteSet};
use crate::error::Result;
use crate::learners::Learner;
use crate::universe::{diagonal_code, AdvanceGuard, Enumerator, FixedSet, LearnerId, Registry, UnionOf, Variant};

/// `R_e ∩ [0, bound)` (or the hat variant) from the observed markers.
pub fn r_prefix(construction: &Construction, bound: u64, variant: Variant) -> FiniteSet {
    let e = construction.e();
    let markers: FiniteSet = construction
        .a_values(bound.min(construction.stage() + 1))
        .into_iter()
        .flatten()
        .map(|a| match variant {
            Variant::Plain => a,
            Variant::Hat => a + 1,
        })
        .collect();
    (e..bound).filter(|x| !markers.contains(*x)).collect()
}

pub fn r_hat_prefix(construction: &Construction, bound: u64) -> FiniteSet {
    r_prefix(construction, bound, Variant::Hat)
}

/// The stage by which `y ≠ a_{e,ℓ}` has a witness for every `ℓ`, or `None`
/// if some `ℓ` still lacks one at the construction's horizon. `y` must not
/// exceed the horizon.
///
/// For a fixed `ℓ` the witnesses are: `y` odd or `y <= e+ℓ+1`; some row
/// `h <= ℓ` undefined at stage `y`; rows `0..=ℓ` defined and unchanged over
/// stages `y-2..=y` with `y-2 > e+ℓ+1` (so the marker, if any, is earlier);
/// or some row `h <= ℓ` changing after `y`.
pub fn exclusion_witness_stage(c: &Construction, y: u64) -> Option<u64> {
    let e = c.e();
    if y % 2 == 1 || y < e + 2 {
        return Some(y);
    }
    let mut worst = y;
    let mut stable = true;
    let mut next_change: Option<u64> = None;
    for ell in 0..=(y - e - 2) {
        if c.sigma(ell, y).is_none() {
            // rows at or above an undefined one are undefined too
            return Some(worst);
        }
        stable = stable && c.sigma(ell, y - 2).is_some() && !c.changed_at(ell, y - 1) && !c.changed_at(ell, y);
        if let Some(nc) = c.next_change_after(ell, y) {
            next_change = Some(next_change.map_or(nc, |cur| cur.min(nc)));
        }
        if stable && y - 2 >= e + ell + 2 {
            continue;
        }
        worst = worst.max(next_change?);
    }
    Some(worst)
}

/// Witness stages for every `y` up to a construction horizon.
#[derive(Clone, Debug)]
struct ExclusionTable {
    horizon: u64,
    witness: Vec<Option<u64>>,
}

impl ExclusionTable {
    fn build(c: &Construction) -> Self {
        let witness = (0..=c.stage()).map(|y| exclusion_witness_stage(c, y)).collect();
        Self { horizon: c.stage(), witness }
    }

    fn witnessed_by(&self, y: u64, s: u64) -> bool {
        matches!(self.witness[y as usize], Some(w) if w <= s)
    }

    fn stage_set(&self, e: u64, variant: Variant, s: u64) -> FiniteSet {
        debug_assert!(s <= self.horizon);
        (e..=s)
            .filter(|&x| match variant {
                Variant::Plain => self.witnessed_by(x, s),
                Variant::Hat => x == 0 || self.witnessed_by(x - 1, s),
            })
            .collect()
    }
}

/// Stage-`s` output of the enumerator for `R_e` / `R̂_e`, computed straight
/// from a construction advanced to at least `s`.
pub fn r_stage_set(c: &Construction, variant: Variant, s: u64) -> FiniteSet {
    assert!(s <= c.stage(), "construction not advanced to stage {s}");
    (c.e()..=s)
        .filter(|&x| {
            let y = match variant {
                Variant::Plain => x,
                Variant::Hat if x == 0 => return true,
                Variant::Hat => x - 1,
            };
            matches!(exclusion_witness_stage(c, y), Some(w) if w <= s)
        })
        .collect()
}

struct Live {
    construction: Construction,
    table: Option<ExclusionTable>,
}

/// A construction shared through the registry, advanced on demand by
/// whichever enumerator asks for a later stage.
pub struct LiveConstruction {
    key: (LearnerId, u64),
    inner: Mutex<Live>,
}

impl LiveConstruction {
    pub fn new(learner_id: LearnerId, learner: Arc<dyn Learner>, e: u64, search_budget: u64) -> Self {
        Self {
            key: (learner_id, e),
            inner: Mutex::new(Live { construction: Construction::new(learner_id, learner, e, search_budget), table: None }),
        }
    }

    pub fn learner_id(&self) -> LearnerId {
        self.key.0
    }

    pub fn e(&self) -> u64 {
        self.key.1
    }

    pub fn advance_to(&self, registry: &Registry, stage: u64) -> Result<()> {
        let code = diagonal_code(self.key.0, self.key.1, Variant::Plain)?;
        let _guard = AdvanceGuard::enter(self.key, code.0)?;
        let mut live = self.inner.lock().expect("construction lock poisoned");
        if live.construction.stage() < stage {
            live.construction.advance_to(stage, registry)?;
            live.table = None;
        }
        Ok(())
    }

    /// Runs `f` against the construction as it currently stands.
    pub fn with<R>(&self, f: impl FnOnce(&Construction) -> R) -> R {
        let live = self.inner.lock().expect("construction lock poisoned");
        f(&live.construction)
    }

    pub fn stage(&self) -> u64 {
        self.with(Construction::stage)
    }

    /// `W_{x_e,s}` or `W_{x̂_e,s}`.
    pub fn diagonal_stage(&self, registry: &Registry, variant: Variant, s: u64) -> Result<FiniteSet> {
        let code = diagonal_code(self.key.0, self.key.1, variant)?;
        let _guard = AdvanceGuard::enter(self.key, code.0)?;
        let mut live = self.inner.lock().expect("construction lock poisoned");
        let current = live.construction.stage();
        if current < s {
            let target = s.max(current + current / 2).max(16);
            live.construction.advance_to(target, registry)?;
            live.table = None;
        }
        if live.table.is_none() {
            live.table = Some(ExclusionTable::build(&live.construction));
        }
        Ok(live.table.as_ref().unwrap().stage_set(self.key.1, variant, s))
    }
}

/// The enumerator for `R_e` / `R̂_e` against `learner`.
pub fn r_enumerator(registry: &Registry, learner: LearnerId, e: u64, variant: Variant) -> Result<Arc<dyn Enumerator>> {
    registry.lookup(registry.register_diagonal(learner, e, variant)?)
}

/// `R_e ∪ (D_n ∩ [e, ∞))`, or the hat variant.
pub fn family_member(
    registry: &Registry,
    learner: LearnerId,
    e: u64,
    n: u64,
    variant: Variant,
) -> Result<Arc<dyn Enumerator>> {
    family_member_with(registry, learner, e, &finite_set_decode(n), variant)
}

/// [`family_member`] with the finite part given directly.
pub fn family_member_with(
    registry: &Registry,
    learner: LearnerId,
    e: u64,
    finite_part: &FiniteSet,
    variant: Variant,
) -> Result<Arc<dyn Enumerator>> {
    let base = r_enumerator(registry, learner, e, variant)?;
    let extra = finite_part.at_least(e);
    if extra.is_empty() {
        return Ok(base);
    }
    Ok(Arc::new(UnionOf(base, Arc::new(FixedSet(extra)))))
}
