//! The two ways a construction can end, observed at a finite horizon.
//!
//! If some row never settles, a text for `L_e` can be built that keeps
//! changing the learner's mind ([`adversarial_text`]). If every row settles,
//! the hypotheses reachable above `σ_{e,0}` are separated below a finite
//! level ([`separation_level`]).

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::construction::Construction;
use super::search::{least_of_length, visit_extensions, Visit, Window};
use crate::encodings::{FiniteSet, Sequence};
use crate::error::{Error, Result};
use crate::learners::{shape_of, Learner, Shape};
use crate::universe::{Hypothesis, Registry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryConfig {
    /// Extensions may reach `position + window` in length and item value,
    /// and hypotheses are compared below that level at that stage.
    pub window: u64,
    /// Candidate evaluations per step for learners without a shape hint.
    pub budget: u64,
}

impl Default for AdversaryConfig {
    fn default() -> Self {
        Self { window: 8, budget: 10_000 }
    }
}

/// A length-`horizon` prefix of a text for `L_e` that alternates between
/// adding the least missing element and jumping to an extension on which
/// the learner's conjecture visibly changes.
pub fn adversarial_text(registry: &Registry, learner: &dyn Learner, e: u64, horizon: u64) -> Result<Sequence> {
    adversarial_text_with(registry, learner, e, horizon, AdversaryConfig::default())
}

pub fn adversarial_text_with(
    registry: &Registry,
    learner: &dyn Learner,
    e: u64,
    horizon: u64,
    config: AdversaryConfig,
) -> Result<Sequence> {
    let horizon = horizon as usize;
    let mut sigma = Sequence::empty();
    let mut next_fresh = e;
    let shape = shape_of(learner);
    while sigma.len() < horizon {
        while sigma.items().contains(&next_fresh) {
            next_fresh += 1;
        }
        sigma.push(next_fresh);
        if sigma.len() >= horizon || matches!(shape, Shape::Constant(_)) {
            continue;
        }
        let pos = sigma.len() as u64;
        let level = pos + config.window;
        let window = Window { low: e, high: level, max_len: (level as usize).min(horizon) };
        let previous = registry.enumerate_to(learner.decide(&sigma), level)?.below(level);
        let differs = |h: Hypothesis| -> Result<bool> { Ok(registry.enumerate_to(h, level)?.below(level) != previous) };
        let found = match shape {
            Shape::Constant(_) => None,
            Shape::ByLength => {
                let mut found = None;
                for len in sigma.len() + 1..=window.max_len {
                    let h = learner.decide_by_length(len as u64).expect("length-determined learner");
                    if differs(h)? {
                        found = least_of_length(&sigma, window, &FiniteSet::new(), len);
                        break;
                    }
                }
                found
            }
            Shape::General => {
                let mut budget = config.budget;
                let base_len = sigma.len();
                let visit = visit_extensions(&sigma, window, &FiniteSet::new(), &mut budget, |tau| {
                    if tau.len() == base_len {
                        return Ok(ControlFlow::Continue(()));
                    }
                    Ok(if differs(learner.decide(tau))? { ControlFlow::Break(tau.clone()) } else { ControlFlow::Continue(()) })
                })?;
                match visit {
                    Visit::Stopped(tau) => Some(tau),
                    Visit::Exhausted | Visit::BudgetExceeded => None,
                }
            }
        };
        if let Some(tau) = found {
            sigma = tau;
        }
    }
    Ok(sigma.prefix(horizon))
}

/// The least `ℓ` such that any two distinct hypotheses the learner issues
/// above `σ_{e,0}` whose enumerations differ by some stage `t <=
/// stage_bound` already differ below `ℓ` at that stage. Only a lower bound
/// for the level the limit sets need.
pub fn separation_level(registry: &Registry, construction: &Construction, stage_bound: u64) -> Result<u64> {
    let learner = construction.learner().clone();
    if construction.settled_a_value(0).is_none() {
        return Err(Error::NoStableRowZero(construction.e()));
    }
    let sigma0 = construction.current(0).expect("row 0 defined when a_0 is observed").clone();
    let hyps = reachable_hypotheses(learner.as_ref(), &sigma0, construction.e(), stage_bound, registry.search_budget())?;
    let hyps: Vec<Hypothesis> = hyps.into_iter().collect();
    let mut level = 0;
    for t in 0..=stage_bound {
        let sets = hyps.iter().map(|&h| registry.enumerate_to(h, t)).collect::<Result<Vec<_>>>()?;
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                if let Some(x) = sets[i].symmetric_difference(&sets[j]).least() {
                    level = level.max(x + 1);
                }
            }
        }
    }
    Ok(level)
}

/// Hypotheses output on `A(σ, stage_bound)`, one string per length when
/// the learner's shape allows it.
fn reachable_hypotheses(
    learner: &dyn Learner,
    sigma: &Sequence,
    e: u64,
    stage_bound: u64,
    budget: u64,
) -> Result<BTreeSet<Hypothesis>> {
    let mut out = BTreeSet::from([learner.decide(sigma)]);
    match shape_of(learner) {
        Shape::Constant(h) => {
            out.insert(h);
        }
        Shape::ByLength => {
            for len in sigma.len() as u64..=stage_bound {
                out.insert(learner.decide_by_length(len).expect("length-determined learner"));
            }
        }
        Shape::General => {
            let mut budget = budget;
            let _: Visit<()> = visit_extensions(sigma, Window::of_stage(e, stage_bound), &FiniteSet::new(), &mut budget, |tau| {
                out.insert(learner.decide(tau));
                Ok(ControlFlow::Continue(()))
            })?;
        }
    }
    Ok(out)
}

/// Which of the two outcomes a construction appears to be heading for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum CaseObservation {
    /// Row `unstable_row` has no observed marker: the construction stalls there.
    Stalled { unstable_row: u64 },
    /// Every row up to the probe has an observed marker.
    AllRowsSettle { probe: u64 },
}

impl CaseObservation {
    pub fn number(self) -> u8 {
        match self {
            CaseObservation::Stalled { .. } => 1,
            CaseObservation::AllRowsSettle { .. } => 2,
        }
    }
}

/// Looks at rows `0..=probe`, counting a row as settled only if its marker
/// has held for the second half of the run.
pub fn classify_case(construction: &Construction, probe: u64) -> CaseObservation {
    match (0..=probe).find(|&row| construction.settled_a_value(row).is_none()) {
        Some(row) => CaseObservation::Stalled { unstable_row: row },
        None => CaseObservation::AllRowsSettle { probe },
    }
}
