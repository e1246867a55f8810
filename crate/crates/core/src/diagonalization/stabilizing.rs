//! The stabilizing-sequence predicate and its computable approximation `Q`.
//!
//! `σ` is `(e,k)`-stabilizing when, for every `τ ⪰ σ` inside `L_e` and every
//! `t`:
//!
//! 1. `{e, …, e+k} ⊆ content(σ)`,
//! 2. `M(τ) <= |σ|`,
//! 3. `W_{M(σ),|σ|+t} ∩ [0,k) = W_{M(τ),|σ|+t} ∩ [0,k)`.
//!
//! `Q(e,k,σ,s)` restricts `τ` to `A(σ,s)` and `t` to `t <= s`.

use std::collections::HashSet;
use std::ops::ControlFlow;

use serde::Serialize;

use super::search::{visit_extensions, Visit, Window};
use crate::encodings::{FiniteSet, Sequence};
use crate::error::Result;
use crate::learners::{shape_of, Learner, Shape};
use crate::universe::{Hypothesis, Registry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// `{e..=e+k} ⊆ content(σ) ⊆ L_e`.
    Membership,
    /// `M(τ) <= |σ|`.
    Bounded,
    /// Agreement of the two hypotheses below `k`.
    Agreement,
}

impl Condition {
    pub fn number(self) -> u8 {
        match self {
            Condition::Membership => 1,
            Condition::Bounded => 2,
            Condition::Agreement => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabWitness {
    pub tau: Sequence,
    pub t: u64,
    pub violated: Condition,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stabilization {
    Holds,
    Refuted(StabWitness),
    /// The search budget ran out before `A(σ,s)` was exhausted.
    Unresolved,
}

impl Stabilization {
    pub fn holds(&self) -> bool {
        matches!(self, Stabilization::Holds)
    }
}

pub fn membership_holds(e: u64, k: u64, sigma: &Sequence) -> bool {
    let content = sigma.content();
    content.iter().all(|x| x >= e) && (e..=e.saturating_add(k)).all(|x| content.contains(x))
}

/// `Q(e,k,σ,s)`, returning a witness when it fails.
pub fn check_stabilizing(
    registry: &Registry,
    learner: &dyn Learner,
    e: u64,
    k: u64,
    sigma: &Sequence,
    s: u64,
) -> Result<Stabilization> {
    if !membership_holds(e, k, sigma) {
        return Ok(Stabilization::Refuted(StabWitness { tau: sigma.clone(), t: 0, violated: Condition::Membership }));
    }
    let mut budget = registry.search_budget();
    refute_cone(registry, learner, e, k, sigma, learner.decide(sigma), s, &mut budget)
}

/// Conditions 2 and 3 of `Q` for a `σ` whose membership condition is known
/// to hold and whose hypothesis is `h_sigma`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn refute_cone(
    registry: &Registry,
    learner: &dyn Learner,
    e: u64,
    k: u64,
    sigma: &Sequence,
    h_sigma: Hypothesis,
    s: u64,
    budget: &mut u64,
) -> Result<Stabilization> {
    let window = Window::of_stage(e, s);
    if !window.admits(sigma) {
        return Ok(Stabilization::Holds);
    }
    let mut agreement = AgreementCheck::new(registry, sigma.len() as u64, h_sigma, k, s);
    match shape_of(learner) {
        Shape::Constant(h) => Ok(match agreement.refute(h)? {
            Some((violated, t)) => Stabilization::Refuted(StabWitness { tau: sigma.clone(), t, violated }),
            None => Stabilization::Holds,
        }),
        Shape::ByLength => {
            let top = if e <= s { s as usize } else { sigma.len() };
            for len in sigma.len()..=top {
                let h = learner.decide_by_length(len as u64).expect("length-determined learner");
                if let Some((violated, t)) = agreement.refute(h)? {
                    let mut tau = sigma.clone();
                    tau.extend_with(e, len - sigma.len());
                    return Ok(Stabilization::Refuted(StabWitness { tau, t, violated }));
                }
            }
            Ok(Stabilization::Holds)
        }
        Shape::General => {
            let visit = visit_extensions(sigma, window, &FiniteSet::new(), budget, |tau| {
                Ok(match agreement.refute(learner.decide(tau))? {
                    Some((violated, t)) => ControlFlow::Break(StabWitness { tau: tau.clone(), t, violated }),
                    None => ControlFlow::Continue(()),
                })
            })?;
            Ok(match visit {
                Visit::Stopped(w) => Stabilization::Refuted(w),
                Visit::Exhausted => Stabilization::Holds,
                Visit::BudgetExceeded => Stabilization::Unresolved,
            })
        }
    }
}

/// Tests conditions 2 and 3 for one hypothesis against `M(σ)`, caching the
/// stage sets of `M(σ)` and the hypotheses already cleared.
struct AgreementCheck<'a> {
    registry: &'a Registry,
    sigma_len: u64,
    h_sigma: Hypothesis,
    k: u64,
    s: u64,
    sigma_sets: Vec<FiniteSet>,
    cleared: HashSet<Hypothesis>,
}

impl<'a> AgreementCheck<'a> {
    fn new(registry: &'a Registry, sigma_len: u64, h_sigma: Hypothesis, k: u64, s: u64) -> Self {
        Self { registry, sigma_len, h_sigma, k, s, sigma_sets: Vec::new(), cleared: HashSet::new() }
    }

    fn refute(&mut self, h: Hypothesis) -> Result<Option<(Condition, u64)>> {
        if h.0 > self.sigma_len {
            return Ok(Some((Condition::Bounded, 0)));
        }
        if self.k == 0 || h == self.h_sigma || self.cleared.contains(&h) {
            return Ok(None);
        }
        for t in 0..=self.s {
            let stage = self.sigma_len + t;
            if self.sigma_sets.len() as u64 <= t {
                let set = self.registry.enumerate_to(self.h_sigma, stage)?.below(self.k);
                self.sigma_sets.push(set);
            }
            let other = self.registry.enumerate_to(h, stage)?.below(self.k);
            if other != self.sigma_sets[t as usize] {
                return Ok(Some((Condition::Agreement, t)));
            }
        }
        self.cleared.insert(h);
        Ok(None)
    }
}

impl StabWitness {
    /// Re-derives the refutation from scratch.
    pub fn confirms(
        &self,
        registry: &Registry,
        learner: &dyn Learner,
        e: u64,
        k: u64,
        sigma: &Sequence,
        s: u64,
    ) -> Result<bool> {
        if self.violated == Condition::Membership {
            return Ok(!membership_holds(e, k, sigma));
        }
        if !sigma.is_prefix_of(&self.tau) || !Window::of_stage(e, s).admits(&self.tau) || self.t > s {
            return Ok(false);
        }
        let h_tau = learner.decide(&self.tau);
        Ok(match self.violated {
            Condition::Bounded => h_tau.0 > sigma.len() as u64,
            Condition::Agreement => {
                let stage = sigma.len() as u64 + self.t;
                let a = registry.enumerate_to(learner.decide(sigma), stage)?.below(k);
                let b = registry.enumerate_to(h_tau, stage)?.below(k);
                a != b
            }
            Condition::Membership => unreachable!(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{sample_learner, Opaque, SampleKind};
    use crate::diagonalization::search::candidate_strings;
    use std::sync::Arc;

    /// `Q` straight from its definition: every τ in `A(σ,s)`, every `t <= s`.
    fn brute_q(registry: &Registry, learner: &dyn Learner, e: u64, k: u64, sigma: &Sequence, s: u64) -> bool {
        let content = sigma.content();
        if !(e..=e + k).all(|x| content.contains(x)) || content.iter().any(|x| x < e) {
            return false;
        }
        let h_sigma = learner.decide(sigma);
        for tau in candidate_strings(sigma, s, e) {
            let h_tau = learner.decide(&tau);
            if h_tau.0 > sigma.len() as u64 {
                return false;
            }
            for t in 0..=s {
                let stage = sigma.len() as u64 + t;
                let a = registry.enumerate_to(h_sigma, stage).unwrap().below(k);
                let b = registry.enumerate_to(h_tau, stage).unwrap().below(k);
                if a != b {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn q_examples() {
        let registry = Registry::new();
        let zero = registry.learner(sample_learner(SampleKind::ConstantZero, &registry)).unwrap();
        let fresh = registry.learner(sample_learner(SampleKind::FreshEachStep, &registry)).unwrap();

        let ok = check_stabilizing(&registry, zero.as_ref(), 0, 0, &Sequence::from([0]), 5).unwrap();
        assert_eq!(ok, Stabilization::Holds);
        assert!(brute_q(&registry, zero.as_ref(), 0, 0, &Sequence::from([0]), 5));

        for learner in [&zero, &fresh] {
            match check_stabilizing(&registry, learner.as_ref(), 0, 0, &Sequence::empty(), 3).unwrap() {
                Stabilization::Refuted(w) => assert_eq!(w.violated, Condition::Membership),
                other => panic!("expected membership witness, got {other:?}"),
            }
        }

        for s in 3..8 {
            match check_stabilizing(&registry, fresh.as_ref(), 0, 0, &Sequence::from([0]), s).unwrap() {
                Stabilization::Refuted(w) => {
                    assert_eq!(w.violated, Condition::Bounded);
                    assert!(fresh.decide(&w.tau).0 > 1);
                    assert!(w.confirms(&registry, fresh.as_ref(), 0, 0, &Sequence::from([0]), s).unwrap());
                }
                other => panic!("expected bounded witness, got {other:?}"),
            }
        }
    }

    #[test]
    fn shortcut_q_matches_brute_force() {
        let registry = Registry::new();
        let learners: Vec<Arc<dyn Learner>> = SampleKind::ALL
            .into_iter()
            .map(|kind| registry.learner(sample_learner(kind, &registry)).unwrap())
            .collect();
        let sigmas = [
            Sequence::empty(),
            Sequence::from([0]),
            Sequence::from([1]),
            Sequence::from([0, 1]),
            Sequence::from([1, 1, 1, 1, 1, 1]),
            Sequence::from([0, 0, 0, 0, 0, 0, 1]),
            Sequence::from([1, 2, 1, 1, 1, 1]),
        ];
        for learner in &learners {
            let opaque = Opaque(learner.clone());
            for e in 0..2 {
                for k in 0..3 {
                    for sigma in &sigmas {
                        for s in 0..6 {
                            let expected = brute_q(&registry, learner.as_ref(), e, k, sigma, s);
                            let fast = check_stabilizing(&registry, learner.as_ref(), e, k, sigma, s).unwrap();
                            let slow = check_stabilizing(&registry, &opaque, e, k, sigma, s).unwrap();
                            assert_eq!(fast.holds(), expected, "{} e={e} k={k} σ={sigma:?} s={s}", learner.name());
                            assert_eq!(slow.holds(), expected, "opaque {} e={e} k={k} σ={sigma:?} s={s}", learner.name());
                            for verdict in [fast, slow] {
                                if let Stabilization::Refuted(w) = verdict {
                                    assert!(w.confirms(&registry, learner.as_ref(), e, k, sigma, s).unwrap());
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn q_is_antimonotone_in_the_stage() {
        let registry = Registry::new();
        let parity = registry.learner(sample_learner(SampleKind::LengthParity, &registry)).unwrap();
        let sigma = Sequence::from([0, 1, 0, 0, 0, 0]);
        let mut previous = true;
        for s in 0..20 {
            let now = check_stabilizing(&registry, parity.as_ref(), 0, 1, &sigma, s).unwrap().holds();
            assert!(previous || !now);
            previous = now;
        }
        assert!(!previous);
    }
}
