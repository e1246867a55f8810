//! Finite-horizon checks for vacillatory identification.
//!
//! A learner identifies a set from a text when, from some point on, its
//! outputs lie in a set `S` of at most `j` codes, each enumerating the
//! content up to `i` errors (`Fex`). The stricter `Fext` also asks the codes
//! in `S` to enumerate one and the same set. Neither can be decided from a
//! finite prefix, so verdicts are three-valued and every failure carries a
//! witness that [`Witness::recheck`] re-derives from scratch.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::encodings::{FiniteSet, Sequence};
use crate::error::{Error, Result};
use crate::learners::Learner;
use crate::universe::{Hypothesis, Registry};

/// A finite prefix of a text, together with the set it is meant to list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Text {
    pub target: Hypothesis,
    items: Vec<u64>,
}

impl Text {
    pub fn from_sequence(target: Hypothesis, items: Sequence) -> Self {
        Self { target, items: items.items().to_vec() }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[u64] {
        &self.items
    }

    pub fn at(&self, n: usize) -> u64 {
        self.items[n]
    }

    /// `text ↾ n`.
    pub fn prefix(&self, n: usize) -> Sequence {
        Sequence::from(self.items[..n.min(self.items.len())].to_vec())
    }

    pub fn content_prefix(&self, n: usize) -> FiniteSet {
        self.items[..n.min(self.items.len())].iter().copied().collect()
    }
}

/// The first `len` items of the text that lists `W_h` in order of discovery
/// (ascending within a stage), padding with the least element once the
/// enumeration has produced nothing new for `2·len + 16` stages.
pub fn canonical_text(registry: &Registry, h: Hypothesis, len: usize) -> Result<Text> {
    canonical_text_after(registry, h, &Sequence::empty(), len)
}

/// As [`canonical_text`], but starting with `lead` (whose content must lie
/// in `W_h` for the result to be a text for it).
pub fn canonical_text_after(registry: &Registry, h: Hypothesis, lead: &Sequence, len: usize) -> Result<Text> {
    let mut items: Vec<u64> = lead.items().iter().copied().take(len).collect();
    let mut seen = FiniteSet::new();
    let stage_cap = 2 * len as u64 + 16;
    let mut stage = 0;
    while items.len() < len && stage <= stage_cap {
        let now = registry.enumerate_to(h, stage)?;
        for x in now.difference(&seen).iter() {
            if items.len() < len {
                items.push(x);
            }
        }
        seen = now;
        stage += 1;
    }
    if items.len() < len {
        let pad = match seen.least().or_else(|| lead.min_item()) {
            Some(x) => x,
            None => return Err(Error::EmptyText(h.0)),
        };
        items.resize(len, pad);
    }
    Ok(Text { target: h, items })
}

/// Outputs of a learner on every prefix of a text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub learner: String,
    pub outputs: Vec<Hypothesis>,
}

impl Trace {
    pub fn horizon(&self) -> u64 {
        self.outputs.len().saturating_sub(1) as u64
    }

    pub fn distinct(&self) -> BTreeSet<Hypothesis> {
        self.outputs.iter().copied().collect()
    }

    /// Distinct outputs at positions `from..=to`.
    pub fn outputs_between(&self, from: u64, to: u64) -> BTreeSet<Hypothesis> {
        let to = (to as usize).min(self.outputs.len().saturating_sub(1));
        if from as usize > to {
            return BTreeSet::new();
        }
        self.outputs[from as usize..=to].iter().copied().collect()
    }
}

/// `learner(text ↾ n)` for `n = 0..=horizon`. The text is cut at its length
/// if shorter.
pub fn run_learner(learner: &dyn Learner, text: &Text, horizon: u64) -> Trace {
    let top = (horizon as usize).min(text.len());
    let outputs = (0..=top).map(|n| learner.decide(&text.prefix(n))).collect();
    Trace { learner: learner.name(), outputs }
}

/// A finite error allowance, or `*` for "finitely many".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Allowance {
    Finite(u64),
    Star,
}

impl Allowance {
    pub fn exceeded_by(self, count: usize) -> bool {
        matches!(self, Allowance::Finite(i) if count as u64 > i)
    }
}

impl fmt::Display for Allowance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Allowance::Finite(i) => write!(f, "{i}"),
            Allowance::Star => write!(f, "*"),
        }
    }
}

impl FromStr for Allowance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "*" => Ok(Allowance::Star),
            other => other
                .parse()
                .map(Allowance::Finite)
                .map_err(|_| Error::InvalidConfig(format!("allowance must be a natural or '*', got {other:?}"))),
        }
    }
}

impl Serialize for Allowance {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Allowance::Finite(i) => serializer.serialize_u64(*i),
            Allowance::Star => serializer.serialize_str("*"),
        }
    }
}

impl<'de> Deserialize<'de> for Allowance {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(i) => Ok(Allowance::Finite(i)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckParams {
    pub i: Allowance,
    pub j: Allowance,
    pub horizon: u64,
    pub settle: u64,
    /// Only elements below this are compared.
    pub bound: u64,
}

impl CheckParams {
    /// Settle point at half the horizon, element bound at a quarter.
    pub fn new(i: Allowance, j: Allowance, horizon: u64) -> Self {
        Self { i, j, horizon, settle: horizon / 2, bound: (horizon / 4).max(1) }
    }

    pub fn with_settle(self, settle: u64) -> Self {
        Self { settle, ..self }
    }

    pub fn with_bound(self, bound: u64) -> Self {
        Self { bound, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    PassAtHorizon,
    FailWitnessed,
    Inconclusive,
}

/// Why a check failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `j + 1` distinct outputs at or after the settle point.
    TooManyHypotheses { j: u64, positions: Vec<u64>, hypotheses: Vec<Hypothesis> },
    /// More than `i` elements below the bound sit on the same side of
    /// `W_h` versus the text content at every checkpoint.
    ContentMismatch { hypothesis: Hypothesis, i: u64, bound: u64, checkpoints: Vec<u64>, elements: Vec<u64> },
    /// `element` is in `W_{present,t}` but not `W_{absent,t}` at every checkpoint.
    PairwiseMismatch { present: Hypothesis, absent: Hypothesis, element: u64, checkpoints: Vec<u64> },
}

impl Witness {
    /// Re-derives the failure from the trace, the text and the registry.
    pub fn recheck(&self, registry: &Registry, trace: &Trace, text: &Text, settle: u64) -> Result<bool> {
        match self {
            Witness::TooManyHypotheses { j, positions, hypotheses } => {
                let distinct: BTreeSet<_> = hypotheses.iter().collect();
                Ok(positions.len() == hypotheses.len()
                    && distinct.len() == hypotheses.len()
                    && hypotheses.len() as u64 > *j
                    && positions.iter().zip(hypotheses).all(|(&p, h)| {
                        p >= settle && trace.outputs.get(p as usize) == Some(h)
                    }))
            }
            Witness::ContentMismatch { hypothesis, i, bound, checkpoints, elements } => {
                if elements.len() as u64 <= *i || !trace.outputs[settle as usize..].contains(hypothesis) {
                    return Ok(false);
                }
                let sides = checkpoint_sides(registry, *hypothesis, text, *bound, checkpoints)?;
                Ok(elements.iter().all(|x| sides.get(x).is_some_and(|s| s.is_some())))
            }
            Witness::PairwiseMismatch { present, absent, element, checkpoints } => {
                let tail = &trace.outputs[settle as usize..];
                if !tail.contains(present) || !tail.contains(absent) || checkpoints.is_empty() {
                    return Ok(false);
                }
                for &t in checkpoints {
                    let a = registry.enumerate_to(*present, t)?;
                    let b = registry.enumerate_to(*absent, t)?;
                    if !a.contains(*element) || b.contains(*element) {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Distinct outputs from the settle point on.
    pub hypotheses: Vec<Hypothesis>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Verdict {
    fn new(status: Status, hypotheses: &BTreeSet<Hypothesis>) -> Self {
        Self { status, witness: None, hypotheses: hypotheses.iter().copied().collect(), notes: Vec::new() }
    }

    fn fail(witness: Witness, hypotheses: &BTreeSet<Hypothesis>) -> Self {
        Self { witness: Some(witness), ..Self::new(Status::FailWitnessed, hypotheses) }
    }

    fn inconclusive(note: impl Into<String>, hypotheses: &BTreeSet<Hypothesis>) -> Self {
        Self { notes: vec![note.into()], ..Self::new(Status::Inconclusive, hypotheses) }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::PassAtHorizon
    }

    pub fn failed(&self) -> bool {
        self.status == Status::FailWitnessed
    }
}

/// For every `x < bound` that is on one side of `W_h` versus the text
/// content at the first checkpoint: `Some(true)` if it stays in `W_h` only,
/// `Some(false)` if it stays in the content only, `None` if it moves.
fn checkpoint_sides(
    registry: &Registry,
    h: Hypothesis,
    text: &Text,
    bound: u64,
    checkpoints: &[u64],
) -> Result<BTreeMap<u64, Option<bool>>> {
    let mut sides: BTreeMap<u64, Option<bool>> = BTreeMap::new();
    for (idx, &t) in checkpoints.iter().enumerate() {
        let w = registry.enumerate_to(h, t)?.below(bound);
        let c = text.content_prefix(t as usize).below(bound);
        let now: BTreeMap<u64, bool> =
            w.difference(&c).iter().map(|x| (x, true)).chain(c.difference(&w).iter().map(|x| (x, false))).collect();
        if idx == 0 {
            sides = now.into_iter().map(|(x, s)| (x, Some(s))).collect();
        } else {
            for (x, side) in sides.iter_mut() {
                if now.get(x) != side.as_ref() {
                    *side = None;
                }
            }
        }
    }
    Ok(sides)
}

/// `|(W_{h,t} △ content(text ↾ t)) ∩ [0,b)|` strictly increases along
/// `(b,t) = (B/4,H/4), (B/2,H/2), (B,H)` and ends nonzero.
fn content_gap_grows(registry: &Registry, h: Hypothesis, text: &Text, bound: u64, horizon: u64) -> Result<bool> {
    let mut sizes = Vec::new();
    for div in [4, 2, 1] {
        let (b, t) = (bound / div, horizon / div);
        let w = registry.enumerate_to(h, t)?.below(b);
        let c = text.content_prefix(t as usize).below(b);
        sizes.push(w.symmetric_difference(&c).len());
    }
    Ok(sizes.windows(2).all(|w| w[0] < w[1]))
}

fn pairwise_gap_grows(registry: &Registry, a: Hypothesis, b: Hypothesis, bound: u64, horizon: u64) -> Result<bool> {
    let mut sizes = Vec::new();
    for div in [4, 2, 1] {
        sizes.push(registry.sym_diff_below(a, b, bound / div, horizon / div)?.len());
    }
    Ok(sizes.windows(2).all(|w| w[0] < w[1]))
}

fn preconditions(trace: &Trace, text: &Text, p: &CheckParams) -> Option<&'static str> {
    if p.horizon == 0 {
        Some("horizon 0: nothing can settle")
    } else if p.settle >= p.horizon {
        Some("settle point is not before the horizon")
    } else if trace.horizon() < p.horizon || (text.len() as u64) < p.horizon {
        Some("trace or text shorter than the horizon")
    } else {
        None
    }
}

/// The `Fex^i_j` check at `(settle, horizon)`.
pub fn check_txtfex(registry: &Registry, trace: &Trace, text: &Text, p: &CheckParams) -> Result<Verdict> {
    if let Some(reason) = preconditions(trace, text, p) {
        let s = trace.outputs_between(p.settle, p.horizon);
        return Ok(Verdict::inconclusive(reason, &s));
    }
    let s = trace.outputs_between(p.settle, p.horizon);
    if let Allowance::Finite(j) = p.j {
        if s.len() as u64 > j {
            let mut positions = Vec::new();
            let mut hypotheses = Vec::new();
            for pos in p.settle..=p.horizon {
                let h = trace.outputs[pos as usize];
                if !hypotheses.contains(&h) {
                    positions.push(pos);
                    hypotheses.push(h);
                    if hypotheses.len() as u64 > j {
                        break;
                    }
                }
            }
            return Ok(Verdict::fail(Witness::TooManyHypotheses { j, positions, hypotheses }, &s));
        }
    }
    let checkpoints = vec![p.horizon / 2, p.horizon];
    let mut notes = Vec::new();
    for &a in &s {
        match p.i {
            Allowance::Finite(i) => {
                let sides = checkpoint_sides(registry, a, text, p.bound, &checkpoints)?;
                let elements: Vec<u64> = sides.iter().filter(|(_, s)| s.is_some()).map(|(x, _)| *x).collect();
                if elements.len() as u64 > i {
                    let elements = elements[..=i as usize].to_vec();
                    let witness =
                        Witness::ContentMismatch { hypothesis: a, i, bound: p.bound, checkpoints: checkpoints.clone(), elements };
                    return Ok(Verdict::fail(witness, &s));
                }
            }
            Allowance::Star => {
                if content_gap_grows(registry, a, text, p.bound, p.horizon)? {
                    notes.push(format!("difference between W_{a} and the text content grows with the bound"));
                }
            }
        }
    }
    if p.j == Allowance::Star {
        let late = trace.outputs_between((p.settle + p.horizon).div_ceil(2), p.horizon);
        if late != s {
            notes.push("outputs after the settle point have not stabilized".into());
        }
    }
    Ok(if notes.is_empty() {
        Verdict::new(Status::PassAtHorizon, &s)
    } else {
        Verdict { notes, ..Verdict::new(Status::Inconclusive, &s) }
    })
}

/// The `Fext^i_j` check: [`check_txtfex`] plus agreement of every pair of
/// codes in `S`. Never passes when `check_txtfex` does not.
pub fn check_txtfext(registry: &Registry, trace: &Trace, text: &Text, p: &CheckParams) -> Result<Verdict> {
    let base = check_txtfex(registry, trace, text, p)?;
    if base.failed() || preconditions(trace, text, p).is_some() {
        return Ok(base);
    }
    let s: BTreeSet<Hypothesis> = base.hypotheses.iter().copied().collect();
    let checkpoints = vec![p.horizon / 4, p.horizon / 2, p.horizon];
    let mut notes = base.notes.clone();
    let codes: Vec<Hypothesis> = s.iter().copied().collect();
    for (idx, &a) in codes.iter().enumerate() {
        for &b in &codes[idx + 1..] {
            for (present, absent) in [(a, b), (b, a)] {
                let mut persistent: Option<FiniteSet> = None;
                for &t in &checkpoints {
                    let only = registry.enumerate_to(present, t)?.difference(&registry.enumerate_to(absent, t)?).below(p.bound);
                    persistent = Some(match persistent {
                        None => only,
                        Some(prev) => prev.intersection(&only),
                    });
                }
                if let Some(element) = persistent.and_then(|set| set.least()) {
                    let witness = Witness::PairwiseMismatch { present, absent, element, checkpoints: checkpoints.clone() };
                    return Ok(Verdict::fail(witness, &s));
                }
            }
            if pairwise_gap_grows(registry, a, b, p.bound, p.horizon)? {
                notes.push(format!("W_{a} and W_{b} drift apart as the bound grows"));
            }
        }
    }
    Ok(if notes.is_empty() && base.passed() {
        Verdict::new(Status::PassAtHorizon, &s)
    } else {
        Verdict { notes, ..Verdict::new(Status::Inconclusive, &s) }
    })
}
