//! Learners: total maps from finite sequences to hypothesis codes.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::encodings::{FiniteSet, Sequence};
use crate::universe::{diagonal_code, Hypothesis, IndexedFamily, LearnerId, Registry, Variant};

pub trait Learner: Send + Sync {
    fn name(&self) -> String;

    fn decide(&self, sigma: &Sequence) -> Hypothesis;

    /// `Some(h)` if the learner outputs `h` on every sequence.
    fn constant_output(&self) -> Option<Hypothesis> {
        None
    }

    /// `Some(h)` if the output on every sequence of length `len` is `h`.
    /// Searches over extensions use this to visit one string per length.
    fn decide_by_length(&self, _len: u64) -> Option<Hypothesis> {
        None
    }
}

impl fmt::Debug for dyn Learner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Learner({})", self.name())
    }
}

/// How a learner's output can be predicted without calling `decide` on every string.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Constant(Hypothesis),
    ByLength,
    General,
}

pub fn shape_of(learner: &dyn Learner) -> Shape {
    if let Some(h) = learner.constant_output() {
        Shape::Constant(h)
    } else if learner.decide_by_length(0).is_some() {
        Shape::ByLength
    } else {
        Shape::General
    }
}

/// `m_σ` and `n_σ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuessFeatures {
    pub m_sigma: Option<u64>,
    pub n_sigma: Option<u64>,
}

pub fn guess_features(sigma: &Sequence) -> GuessFeatures {
    let content = sigma.content();
    let Some(m) = content.least() else {
        return GuessFeatures::default();
    };
    let mut y = m.checked_add(1);
    while let Some(v) = y {
        if !content.contains(v) {
            break;
        }
        y = v.checked_add(1);
    }
    GuessFeatures { m_sigma: Some(m), n_sigma: y }
}

/// The vacillating learner for the diagonal family: guess `e` as the least
/// element seen, then pick `x_e` or `x̂_e` by the parity of the first gap
/// above it.
#[derive(Clone, Debug)]
pub struct PaperLearner {
    target: LearnerId,
}

impl PaperLearner {
    /// `target` is the learner whose diagonal family this learner identifies.
    pub fn new(target: LearnerId) -> Self {
        Self { target }
    }

    pub fn target(&self) -> LearnerId {
        self.target
    }
}

impl Learner for PaperLearner {
    fn name(&self) -> String {
        format!("paper(target={})", self.target.0)
    }

    fn decide(&self, sigma: &Sequence) -> Hypothesis {
        let GuessFeatures { m_sigma: Some(e), n_sigma: Some(n) } = guess_features(sigma) else {
            return Hypothesis::EMPTY;
        };
        let variant = if n % 2 == 0 { Variant::Plain } else { Variant::Hat };
        // Codes past u64 fall into the catch-all branch.
        diagonal_code(self.target, e, variant).unwrap_or(Hypothesis::EMPTY)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    ConstantZero,
    FreshEachStep,
    LengthParity,
}

impl SampleKind {
    pub const ALL: [SampleKind; 3] = [SampleKind::ConstantZero, SampleKind::FreshEachStep, SampleKind::LengthParity];

    pub fn as_str(self) -> &'static str {
        match self {
            SampleKind::ConstantZero => "constant_zero",
            SampleKind::FreshEachStep => "fresh_each_step",
            SampleKind::LengthParity => "length_parity",
        }
    }

    pub fn parse(name: &str) -> Option<SampleKind> {
        Self::ALL.into_iter().find(|k| k.as_str() == name.replace('-', "_"))
    }
}

#[derive(Clone, Debug)]
pub struct ConstantZero;

impl Learner for ConstantZero {
    fn name(&self) -> String {
        "constant_zero".into()
    }

    fn decide(&self, _sigma: &Sequence) -> Hypothesis {
        Hypothesis::EMPTY
    }

    fn constant_output(&self) -> Option<Hypothesis> {
        Some(Hypothesis::EMPTY)
    }
}

/// Outputs a code for `{|σ|}` drawn from a private indexed family, so every
/// length gets a new hypothesis.
#[derive(Clone)]
pub struct FreshEachStep {
    family: IndexedFamily,
}

impl FreshEachStep {
    pub fn new(registry: &Registry) -> Self {
        Self { family: registry.register_family(FiniteSet::singleton) }
    }
}

impl Learner for FreshEachStep {
    fn name(&self) -> String {
        "fresh_each_step".into()
    }

    fn decide(&self, sigma: &Sequence) -> Hypothesis {
        self.family.code(sigma.len() as u64).expect("sequence length beyond code range")
    }

    fn decide_by_length(&self, len: u64) -> Option<Hypothesis> {
        Some(self.family.code(len).expect("sequence length beyond code range"))
    }
}

/// Alternates between codes for `{0}` (even length) and `{1}` (odd length).
#[derive(Clone, Debug)]
pub struct LengthParity {
    even: Hypothesis,
    odd: Hypothesis,
}

impl LengthParity {
    pub fn new(registry: &Registry) -> Self {
        Self {
            even: registry.register_set(FiniteSet::singleton(0)),
            odd: registry.register_set(FiniteSet::singleton(1)),
        }
    }

    pub fn codes(&self) -> (Hypothesis, Hypothesis) {
        (self.even, self.odd)
    }
}

impl Learner for LengthParity {
    fn name(&self) -> String {
        "length_parity".into()
    }

    fn decide(&self, sigma: &Sequence) -> Hypothesis {
        self.decide_by_length(sigma.len() as u64).unwrap()
    }

    fn decide_by_length(&self, len: u64) -> Option<Hypothesis> {
        Some(if len.is_multiple_of(2) { self.even } else { self.odd })
    }
}

/// Builds a sample adversary, registers whatever sets it needs, and
/// registers the learner itself.
pub fn sample_learner(kind: SampleKind, registry: &Registry) -> LearnerId {
    let learner: Arc<dyn Learner> = match kind {
        SampleKind::ConstantZero => Arc::new(ConstantZero),
        SampleKind::FreshEachStep => Arc::new(FreshEachStep::new(registry)),
        SampleKind::LengthParity => Arc::new(LengthParity::new(registry)),
    };
    registry.register_learner(learner)
}

/// A learner given by a closure, with no structural hints.
pub struct FnLearner<F> {
    name: String,
    f: F,
}

impl<F> FnLearner<F>
where
    F: Fn(&Sequence) -> Hypothesis + Send + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self { name: name.into(), f }
    }
}

impl<F> Learner for FnLearner<F>
where
    F: Fn(&Sequence) -> Hypothesis + Send + Sync,
{
    fn name(&self) -> String {
        self.name.clone()
    }

    fn decide(&self, sigma: &Sequence) -> Hypothesis {
        (self.f)(sigma)
    }
}

/// Forwards `decide` but hides the structural hints, forcing exhaustive search.
pub struct Opaque(pub Arc<dyn Learner>);

impl Learner for Opaque {
    fn name(&self) -> String {
        format!("opaque({})", self.0.name())
    }

    fn decide(&self, sigma: &Sequence) -> Hypothesis {
        self.0.decide(sigma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::universe::CodeKind;

    #[test]
    fn guess_feature_examples() {
        assert_eq!(
            guess_features(&Sequence::from([4, 5, 7])),
            GuessFeatures { m_sigma: Some(4), n_sigma: Some(6) }
        );
        assert_eq!(guess_features(&Sequence::empty()), GuessFeatures::default());
        assert_eq!(
            guess_features(&Sequence::from([5, 6])),
            GuessFeatures { m_sigma: Some(5), n_sigma: Some(7) }
        );
        assert_eq!(
            guess_features(&Sequence::from([9, 3, 3])),
            GuessFeatures { m_sigma: Some(3), n_sigma: Some(4) }
        );
    }

    #[test]
    fn paper_learner_examples() {
        let registry = Registry::new();
        let target = sample_learner(SampleKind::ConstantZero, &registry);
        let m = PaperLearner::new(target);
        assert_eq!(m.decide(&Sequence::from([4, 5, 7])), registry.register_diagonal(target, 4, Variant::Plain).unwrap());
        assert_eq!(m.decide(&Sequence::from([5, 6])), registry.register_diagonal(target, 5, Variant::Hat).unwrap());
        assert_eq!(m.decide(&Sequence::empty()), Hypothesis::EMPTY);
    }

    #[test]
    fn paper_learner_large_values_fall_through() {
        let m = PaperLearner::new(LearnerId(3));
        assert_eq!(m.decide(&Sequence::from([u64::MAX - 5])), Hypothesis::EMPTY);
        assert_eq!(m.decide(&Sequence::from([u64::MAX])), Hypothesis::EMPTY);
    }

    #[test]
    fn sample_learner_examples() {
        let registry = Registry::new();
        let zero = registry.learner(sample_learner(SampleKind::ConstantZero, &registry)).unwrap();
        let fresh = registry.learner(sample_learner(SampleKind::FreshEachStep, &registry)).unwrap();
        let parity = registry.learner(sample_learner(SampleKind::LengthParity, &registry)).unwrap();

        for sigma in [Sequence::empty(), Sequence::from([1, 2, 3])] {
            assert_eq!(zero.decide(&sigma), Hypothesis::EMPTY);
        }

        let a = fresh.decide(&Sequence::from([1]));
        let b = fresh.decide(&Sequence::from([1, 2]));
        assert_ne!(a, b);
        assert!(matches!(a.kind(), CodeKind::Family { .. }));
        assert_eq!(registry.enumerate_to(b, 0).unwrap(), FiniteSet::singleton(2));

        let odd = parity.decide(&Sequence::from([1]));
        let even = parity.decide(&Sequence::from([1, 2]));
        assert_ne!(odd, even);
        assert_eq!(registry.enumerate_to(even, 0).unwrap(), FiniteSet::singleton(0));
        assert_eq!(registry.enumerate_to(odd, 0).unwrap(), FiniteSet::singleton(1));
    }

    #[test]
    fn shapes() {
        let registry = Registry::new();
        let zero = registry.learner(sample_learner(SampleKind::ConstantZero, &registry)).unwrap();
        let parity = registry.learner(sample_learner(SampleKind::LengthParity, &registry)).unwrap();
        assert_eq!(shape_of(zero.as_ref()), Shape::Constant(Hypothesis::EMPTY));
        assert_eq!(shape_of(parity.as_ref()), Shape::ByLength);
        assert_eq!(shape_of(&Opaque(parity)), Shape::General);
        assert_eq!(shape_of(&PaperLearner::new(LearnerId(0))), Shape::General);
    }

    #[test]
    fn sample_kind_names_round_trip() {
        for kind in SampleKind::ALL {
            assert_eq!(SampleKind::parse(kind.as_str()), Some(kind));
        }
        assert_eq!(SampleKind::parse("fresh-each-step"), Some(SampleKind::FreshEachStep));
        assert_eq!(SampleKind::parse("paper"), None);
    }
}
