//! Length-lexicographic enumeration of the finite string sets the
//! construction quantifies over.

use std::collections::HashMap;
use std::ops::ControlFlow;

use crate::encodings::{FiniteSet, Sequence};
use crate::error::Result;

/// Strings `τ ⪰ base` with every item in `[low, high]` and `|τ| <= max_len`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub low: u64,
    pub high: u64,
    pub max_len: usize,
}

impl Window {
    /// The window of `A(·, s)` over `L_e`.
    pub fn of_stage(e: u64, s: u64) -> Self {
        Self { low: e, high: s, max_len: s as usize }
    }

    pub fn admits(&self, sigma: &Sequence) -> bool {
        sigma.len() <= self.max_len && sigma.items().iter().all(|&x| self.low <= x && x <= self.high)
    }

    fn has_values(&self) -> bool {
        self.low <= self.high
    }
}

#[derive(Debug, PartialEq, Eq)]
pub enum Visit<T> {
    Stopped(T),
    Exhausted,
    BudgetExceeded,
}

/// `A(σ, s)`, listed in full and in length-lex order. Exponential; meant for
/// small `s`.
pub fn candidate_strings(sigma: &Sequence, s: u64, e: u64) -> Vec<Sequence> {
    let mut out = Vec::new();
    let mut budget = u64::MAX;
    let visit: Result<Visit<()>> = visit_extensions(sigma, Window::of_stage(e, s), &FiniteSet::new(), &mut budget, |tau| {
        out.push(tau.clone());
        Ok(ControlFlow::Continue(()))
    });
    visit.expect("listing cannot fail");
    out
}

/// Calls `f` on every string in the window above `base` that contains
/// `required`, shortest first and lexicographically within a length.
/// Each call consumes one unit of `budget`.
pub fn visit_extensions<T, F>(
    base: &Sequence,
    window: Window,
    required: &FiniteSet,
    budget: &mut u64,
    mut f: F,
) -> Result<Visit<T>>
where
    F: FnMut(&Sequence) -> Result<ControlFlow<T>>,
{
    if !window.admits(base) {
        return Ok(Visit::Exhausted);
    }
    let mut counts: HashMap<u64, u32> = required.iter().map(|x| (x, 0)).collect();
    let mut missing = required.len();
    for &x in base.items() {
        if let Some(c) = counts.get_mut(&x) {
            if *c == 0 {
                missing -= 1;
            }
            *c += 1;
        }
    }
    let mut work = base.clone();
    for len in base.len()..=window.max_len {
        let free = len - base.len();
        if free > 0 && !window.has_values() {
            break;
        }
        if free < missing {
            continue;
        }
        let mut state = Dfs { window, counts: &mut counts, missing, budget: &mut *budget };
        match state.run(&mut work, free, &mut f)? {
            Visit::Exhausted => {}
            other => return Ok(other),
        }
        debug_assert_eq!(work.len(), base.len());
    }
    Ok(Visit::Exhausted)
}

struct Dfs<'a> {
    window: Window,
    counts: &'a mut HashMap<u64, u32>,
    missing: usize,
    budget: &'a mut u64,
}

impl Dfs<'_> {
    fn run<T, F>(&mut self, work: &mut Sequence, free: usize, f: &mut F) -> Result<Visit<T>>
    where
        F: FnMut(&Sequence) -> Result<ControlFlow<T>>,
    {
        if free == 0 {
            if self.missing > 0 {
                return Ok(Visit::Exhausted);
            }
            if *self.budget == 0 {
                return Ok(Visit::BudgetExceeded);
            }
            *self.budget -= 1;
            return Ok(match f(work)? {
                ControlFlow::Break(t) => Visit::Stopped(t),
                ControlFlow::Continue(()) => Visit::Exhausted,
            });
        }
        let mut v = self.window.low;
        loop {
            let mut filled = false;
            if let Some(c) = self.counts.get_mut(&v) {
                if *c == 0 {
                    filled = true;
                    self.missing -= 1;
                }
                *c += 1;
            }
            let result = if self.missing < free {
                work.push(v);
                let r = self.run(work, free - 1, f);
                work.pop();
                Some(r)
            } else {
                None
            };
            if let Some(c) = self.counts.get_mut(&v) {
                *c -= 1;
                if filled {
                    self.missing += 1;
                }
            }
            if let Some(r) = result {
                match r? {
                    Visit::Exhausted => {}
                    other => return Ok(other),
                }
            }
            if v == self.window.high {
                break;
            }
            v += 1;
        }
        Ok(Visit::Exhausted)
    }
}

/// The length-lex least string of exactly `len` items in the window above
/// `base` that contains `required`.
pub fn least_of_length(base: &Sequence, window: Window, required: &FiniteSet, len: usize) -> Option<Sequence> {
    if len < base.len() || len > window.max_len || !window.admits(base) {
        return None;
    }
    let have = base.content();
    let missing: Vec<u64> = required.iter().filter(|x| !have.contains(*x)).collect();
    let free = len - base.len();
    if free < missing.len() {
        return None;
    }
    if free > 0 && !window.has_values() {
        return None;
    }
    if missing.iter().any(|&x| x < window.low || x > window.high) {
        return None;
    }
    let mut tau = base.clone();
    for _ in 0..free - missing.len() {
        tau.push(window.low);
    }
    for x in missing {
        tau.push(x);
    }
    Some(tau)
}
