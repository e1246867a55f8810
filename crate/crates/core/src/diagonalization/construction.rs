//! The stage construction of `σ_{e,n,s}` against one learner.
//!
//! Only the newest column is held in full. Every earlier entry is recovered
//! from a per-row change log, which is also what the `a`/`b` markers and the
//! Σ₁ enumeration of `R_e` read from.

use std::sync::Arc;

use serde::Serialize;

use super::search::{least_of_length, visit_extensions, Visit, Window};
use super::stabilizing::{refute_cone, Stabilization};
use crate::encodings::{FiniteSet, Sequence};
use crate::error::Result;
use crate::learners::{shape_of, Learner, Shape};
use crate::universe::{Hypothesis, LearnerId, Registry};

#[derive(Clone, Debug)]
struct Row {
    seq: Arc<Sequence>,
    hyp: Hypothesis,
}

/// Row `n` takes `value` from stage `stage` on (`None` is `?`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Change {
    pub stage: u64,
    pub value: Option<Arc<Sequence>>,
}

pub struct Construction {
    learner_id: LearnerId,
    learner: Arc<dyn Learner>,
    e: u64,
    stage: u64,
    column: Vec<Option<Row>>,
    history: Vec<Vec<Change>>,
    search_budget: u64,
    unresolved: u64,
}

pub type ConstructionState = Construction;

impl Construction {
    /// Stage 0: `σ_{e,0,0}` is the empty string.
    pub fn new(learner_id: LearnerId, learner: Arc<dyn Learner>, e: u64, search_budget: u64) -> Self {
        let empty = Arc::new(Sequence::empty());
        let hyp = learner.decide(&empty);
        Self {
            learner_id,
            learner,
            e,
            stage: 0,
            column: vec![Some(Row { seq: empty.clone(), hyp })],
            history: vec![vec![Change { stage: 0, value: Some(empty) }]],
            search_budget,
            unresolved: 0,
        }
    }

    pub fn learner_id(&self) -> LearnerId {
        self.learner_id
    }

    pub fn learner(&self) -> &Arc<dyn Learner> {
        &self.learner
    }

    pub fn e(&self) -> u64 {
        self.e
    }

    pub fn stage(&self) -> u64 {
        self.stage
    }

    /// Searches abandoned because the candidate budget ran out.
    pub fn unresolved_searches(&self) -> u64 {
        self.unresolved
    }

    pub fn advance_to(&mut self, target: u64, registry: &Registry) -> Result<()> {
        while self.stage < target {
            self.run_stage(registry)?;
        }
        Ok(())
    }

    /// Stage `s+1`: rows `0..=s` in order, each kept, replaced by the least
    /// candidate satisfying `Q`, or set to `?`.
    pub fn run_stage(&mut self, registry: &Registry) -> Result<()> {
        let next = self.stage + 1;
        self.column.push(None);
        self.history.push(Vec::new());
        for n in 0..next as usize {
            if n > 0 && self.column[n - 1].is_none() {
                for m in n..next as usize {
                    self.set(m, None, next);
                }
                break;
            }
            if let Some(row) = self.column[n].clone() {
                if self.survives(&row, n as u64, next, registry)? {
                    continue;
                }
            }
            let base = match n {
                0 => Arc::new(Sequence::empty()),
                _ => self.column[n - 1].as_ref().expect("lower row defined").seq.clone(),
            };
            let found = self.least_candidate(&base, n as u64, next, registry)?;
            self.set(n, found, next);
        }
        self.stage = next;
        Ok(())
    }

    fn survives(&mut self, row: &Row, n: u64, s: u64, registry: &Registry) -> Result<bool> {
        // membership was checked when the row was adopted and cannot change;
        // only the stage-0 empty string skipped that check
        if row.seq.is_empty() {
            return Ok(false);
        }
        let mut budget = self.search_budget;
        match refute_cone(registry, self.learner.as_ref(), self.e, n, &row.seq, row.hyp, s, &mut budget)? {
            Stabilization::Holds => Ok(true),
            Stabilization::Refuted(_) => Ok(false),
            Stabilization::Unresolved => {
                self.unresolved += 1;
                Ok(false)
            }
        }
    }

    fn least_candidate(&mut self, base: &Sequence, n: u64, s: u64, registry: &Registry) -> Result<Option<Row>> {
        let e = self.e;
        let required: FiniteSet = (e..=e + n).collect();
        let window = Window::of_stage(e, s);
        let learner = self.learner.clone();
        let mut budget = self.search_budget;
        match shape_of(learner.as_ref()) {
            Shape::Constant(_) | Shape::ByLength => {
                for len in base.len()..=window.max_len {
                    let Some(tau) = least_of_length(base, window, &required, len) else {
                        continue;
                    };
                    let hyp = learner.decide(&tau);
                    match refute_cone(registry, learner.as_ref(), e, n, &tau, hyp, s, &mut budget)? {
                        Stabilization::Holds => return Ok(Some(Row { seq: Arc::new(tau), hyp })),
                        Stabilization::Refuted(_) => {}
                        Stabilization::Unresolved => {
                            self.unresolved += 1;
                            return Ok(None);
                        }
                    }
                }
                Ok(None)
            }
            Shape::General => {
                let mut inner_budget = self.search_budget;
                let visit = visit_extensions(base, window, &required, &mut budget, |tau| {
                    let hyp = learner.decide(tau);
                    Ok(match refute_cone(registry, learner.as_ref(), e, n, tau, hyp, s, &mut inner_budget)? {
                        Stabilization::Holds => std::ops::ControlFlow::Break(Some(Row { seq: Arc::new(tau.clone()), hyp })),
                        Stabilization::Refuted(_) => std::ops::ControlFlow::Continue(()),
                        Stabilization::Unresolved => std::ops::ControlFlow::Break(None),
                    })
                })?;
                match visit {
                    Visit::Stopped(Some(row)) => Ok(Some(row)),
                    Visit::Exhausted => Ok(None),
                    Visit::Stopped(None) | Visit::BudgetExceeded => {
                        self.unresolved += 1;
                        Ok(None)
                    }
                }
            }
        }
    }

    fn set(&mut self, n: usize, value: Option<Row>, stage: u64) {
        let same = match (&self.column[n], &value) {
            (None, None) => true,
            (Some(a), Some(b)) => a.seq == b.seq,
            _ => false,
        };
        if !same {
            self.history[n].push(Change { stage, value: value.as_ref().map(|r| r.seq.clone()) });
        }
        self.column[n] = value;
    }

    /// `σ_{e,n,s}`; `None` for `?`. Stages past the current one are `None`.
    pub fn sigma(&self, n: u64, s: u64) -> Option<&Sequence> {
        if s > self.stage || n > s {
            return None;
        }
        let log = self.history.get(n as usize)?;
        let idx = log.partition_point(|c| c.stage <= s);
        if idx == 0 {
            return None;
        }
        log[idx - 1].value.as_deref()
    }

    /// The newest column entry for row `n`.
    pub fn current(&self, n: u64) -> Option<&Sequence> {
        self.column.get(n as usize)?.as_ref().map(|r| r.seq.as_ref())
    }

    /// The newest column, `?` as `None`.
    pub fn column(&self) -> Vec<Option<&Sequence>> {
        self.column.iter().map(|r| r.as_ref().map(|r| r.seq.as_ref())).collect()
    }

    /// Column `s` rebuilt from the change log.
    pub fn column_at(&self, s: u64) -> Vec<Option<&Sequence>> {
        (0..=s.min(self.stage)).map(|n| self.sigma(n, s)).collect()
    }

    /// Number of defined rows at the newest stage (they form a prefix).
    pub fn defined_rows(&self) -> u64 {
        self.column.iter().take_while(|r| r.is_some()).count() as u64
    }

    pub fn history(&self, n: u64) -> &[Change] {
        self.history.get(n as usize).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Stage of the most recent change to row `n`.
    pub fn last_change(&self, n: u64) -> Option<u64> {
        self.history(n).last().map(|c| c.stage)
    }

    pub fn changed_at(&self, n: u64, s: u64) -> bool {
        self.history(n).binary_search_by_key(&s, |c| c.stage).is_ok()
    }

    /// First change to row `n` strictly after stage `x`, up to the current stage.
    pub fn next_change_after(&self, n: u64, x: u64) -> Option<u64> {
        let log = self.history(n);
        let idx = log.partition_point(|c| c.stage <= x);
        log.get(idx).map(|c| c.stage)
    }

    /// Observed `a_{e,ℓ}`: the least even `a > e+ℓ+1` such that rows `0..=ℓ`
    /// are defined and constant from stage `a` through the current stage.
    /// Revocable by later stages.
    pub fn observed_a_value(&self, ell: u64) -> Option<u64> {
        self.a_values(ell + 1).pop().flatten()
    }

    pub fn observed_b_value(&self, ell: u64) -> Option<u64> {
        self.observed_a_value(ell).map(|a| a + 1)
    }

    /// Observed `a_{e,ℓ}` for `ℓ < count`.
    pub fn a_values(&self, count: u64) -> Vec<Option<u64>> {
        let mut out = Vec::with_capacity(count as usize);
        let mut settled_since = 0u64;
        let mut all_defined = true;
        for ell in 0..count {
            all_defined = all_defined && ell <= self.stage && self.current(ell).is_some();
            if !all_defined {
                out.push(None);
                continue;
            }
            settled_since = settled_since.max(self.last_change(ell).unwrap_or(0));
            let floor = settled_since.max(self.e + ell + 2);
            let a = floor + floor % 2;
            out.push((a <= self.stage).then_some(a));
        }
        out
    }

    /// Observed `a_{e,ℓ}` that has also held for at least the second half of
    /// the run. A row that moved at the last stage trivially has a literal
    /// marker at a horizon of matching parity; this filters those out.
    pub fn settled_a_value(&self, ell: u64) -> Option<u64> {
        self.observed_a_value(ell).filter(|&a| 2 * a <= self.stage)
    }

    /// Rows `n` at stage `s` where a defined entry fails to extend the defined entry below it.
    pub fn chain_violations(&self, s: u64) -> Vec<u64> {
        let col = self.column_at(s);
        (1..col.len())
            .filter(|&n| match (col[n - 1], col[n]) {
                (Some(lower), Some(upper)) => !lower.is_prefix_of(upper),
                _ => false,
            })
            .map(|n| n as u64)
            .collect()
    }
}

/// One row of a construction digest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowDigest {
    pub n: u64,
    pub value: Option<Sequence>,
    pub last_change: Option<u64>,
    pub changes: usize,
    pub a_value: Option<u64>,
    pub b_value: Option<u64>,
}

impl Construction {
    /// Summary of rows `0..rows` at the current stage.
    pub fn digest(&self, rows: u64) -> Vec<RowDigest> {
        let rows = rows.min(self.stage + 1);
        let a = self.a_values(rows);
        (0..rows)
            .map(|n| RowDigest {
                n,
                value: self.current(n).cloned(),
                last_change: self.last_change(n),
                changes: self.history(n).len(),
                a_value: a[n as usize],
                b_value: a[n as usize].map(|v| v + 1),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagonalization::stabilizing::check_stabilizing;
    use crate::learners::{sample_learner, Opaque, SampleKind};

    fn build(kind: SampleKind, e: u64, horizon: u64) -> (Arc<Registry>, Construction) {
        let registry = Registry::new();
        let id = sample_learner(kind, &registry);
        let mut c = Construction::new(id, registry.learner(id).unwrap(), e, registry.search_budget());
        c.advance_to(horizon, &registry).unwrap();
        (registry, c)
    }

    #[test]
    fn stage_zero_holds_only_the_empty_string() {
        let registry = Registry::new();
        let id = sample_learner(SampleKind::ConstantZero, &registry);
        let c = Construction::new(id, registry.learner(id).unwrap(), 0, 10);
        assert_eq!(c.stage(), 0);
        assert_eq!(c.column(), vec![Some(&Sequence::empty())]);
        assert_eq!(c.sigma(0, 0), Some(&Sequence::empty()));
    }

    #[test]
    fn constant_zero_rows_settle_on_initial_segments() {
        let (_, c) = build(SampleKind::ConstantZero, 0, 50);
        for n in 0..40u64 {
            let expected: Sequence = (0..=n).collect();
            assert_eq!(c.current(n), Some(&expected), "row {n}");
            assert_eq!(c.last_change(n), Some(n + 1));
        }
        assert_eq!(c.defined_rows(), 50);
        assert!(c.current(50).is_none());
    }

    #[test]
    fn constant_zero_a_values() {
        let (registry, mut c) = build(SampleKind::ConstantZero, 0, 40);
        // row ℓ is born at stage ℓ+1 and never moves, so a_ℓ = least even >= ℓ+2
        let expected: Vec<Option<u64>> = (0..10u64).map(|l| Some(l + 2 + l % 2)).collect();
        assert_eq!(c.a_values(10), expected);
        c.advance_to(80, &registry).unwrap();
        assert_eq!(c.a_values(10), expected);
        for l in 0..10 {
            let a = c.observed_a_value(l).unwrap();
            assert_eq!(a % 2, 0);
            assert!(a > l + 1);
            assert_eq!(c.observed_b_value(l), Some(a + 1));
        }
    }

    #[test]
    fn fresh_each_step_never_settles() {
        let (_, c) = build(SampleKind::FreshEachStep, 0, 100);
        assert_eq!(c.defined_rows(), 0);
        assert!(c.a_values(20).iter().all(Option::is_none));
        for s in 1..=100 {
            assert!(c.sigma(0, s).is_none());
        }
    }

    #[test]
    fn length_parity_settles_row_zero_only() {
        let (_, c) = build(SampleKind::LengthParity, 0, 60);
        assert!(c.settled_a_value(0).is_some());
        // the literal marker sits on the last stage
        assert_eq!(c.observed_a_value(1), Some(60));
        assert!(c.settled_a_value(1).is_none());
        // row 1 is forced to the longest admissible string, so it moves every stage
        for s in 20..=60 {
            assert_eq!(c.sigma(1, s).map(Sequence::len), Some(s as usize));
            assert!(c.changed_at(1, s));
        }
        assert_eq!(c.defined_rows(), 2);
    }

    #[test]
    fn chain_invariant_and_q_recheck() {
        for kind in SampleKind::ALL {
            for e in 0..3 {
                let (registry, c) = build(kind, e, 60);
                let learner = c.learner().clone();
                for s in 0..=60 {
                    assert!(c.chain_violations(s).is_empty(), "{kind:?} e={e} s={s}");
                }
                for (n, entry) in c.column().into_iter().enumerate() {
                    if let Some(sigma) = entry {
                        let q = check_stabilizing(&registry, learner.as_ref(), e, n as u64, sigma, 60).unwrap();
                        assert!(q.holds(), "{kind:?} e={e} row {n}");
                    }
                }
            }
        }
    }

    #[test]
    fn shortcut_construction_matches_exhaustive_construction() {
        for kind in SampleKind::ALL {
            for e in 0..2 {
                let registry = Registry::new();
                let id = sample_learner(kind, &registry);
                let learner = registry.learner(id).unwrap();
                let mut fast = Construction::new(id, learner.clone(), e, u64::MAX);
                let mut slow = Construction::new(id, Arc::new(Opaque(learner)), e, u64::MAX);
                for _ in 0..7 {
                    fast.run_stage(&registry).unwrap();
                    slow.run_stage(&registry).unwrap();
                    assert_eq!(fast.column(), slow.column(), "{kind:?} e={e} stage {}", fast.stage());
                }
                assert_eq!(slow.unresolved_searches(), 0);
            }
        }
    }

    #[test]
    fn column_history_round_trips() {
        let (registry, mut c) = build(SampleKind::LengthParity, 1, 10);
        let mut columns = vec![];
        for _ in 0..15 {
            c.run_stage(&registry).unwrap();
            columns.push(c.column().into_iter().map(|x| x.cloned()).collect::<Vec<_>>());
        }
        for (i, col) in columns.iter().enumerate() {
            let s = 11 + i as u64;
            let rebuilt: Vec<_> = c.column_at(s).into_iter().map(|x| x.cloned()).collect();
            assert_eq!(&rebuilt, col);
        }
    }
}
