//! The acceptance checks, each returning counts and the first violation found.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::commands::{cmd_construct, cmd_learn, register_base_set};
use super::config::{ExperimentConfig, Fault, LearnerKind};
use super::report::CriterionResult;
use crate::criteria::{
    canonical_text, check_txtfex, check_txtfext, run_learner, Allowance, CheckParams, Status, Text, Verdict,
};
use crate::diagonalization::{adversarial_text, check_stabilizing, family_member, r_prefix, Construction};
use crate::encodings::{finite_set_decode, finite_set_encode, pair, unpair, FiniteSet};
use crate::error::Result;
use crate::learners::{sample_learner, Learner, PaperLearner, SampleKind};
use crate::universe::{Hypothesis, Registry, StagedFn, Variant};

pub const CRITERIA: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

pub fn criterion_name(id: u8) -> &'static str {
    match id {
        1 => "encoding round trips",
        2 => "enumerator monotonicity",
        3 => "construction chain invariant",
        4 => "all rows settle (constant_zero)",
        5 => "construction stalls (fresh_each_step)",
        6 => "two-code learner identifies the family",
        7 => "marker and enumerator routes agree",
        8 => "strict check implies loose check",
        9 => "reports are reproducible",
        _ => "unknown",
    }
}

/// Outcome of one criterion before it is stamped with its id and name.
#[derive(Debug, Default)]
struct Tally {
    checked: u64,
    violations: u64,
    detail: String,
    witness: Option<String>,
}

impl Tally {
    fn violation(&mut self, what: impl FnOnce() -> String) {
        self.violations += 1;
        if self.witness.is_none() {
            self.witness = Some(what());
        }
    }
}

pub fn run_criterion(id: u8, config: &ExperimentConfig) -> CriterionResult {
    let start = Instant::now();
    let outcome = match id {
        1 => encodings(),
        2 => monotonicity(config.inject_fault),
        3 => chain_invariant(),
        4 => all_rows_settle(),
        5 => stalled_construction(),
        6 => paper_learner_family(),
        7 => oracle_equivalence(),
        8 => containment(config.seed, config.scenarios),
        9 => reproducible(),
        _ => Ok(Tally { violations: 1, detail: "no such criterion".into(), ..Default::default() }),
    };
    let tally = outcome.unwrap_or_else(|err| Tally {
        violations: 1,
        detail: "aborted".into(),
        witness: Some(err.to_string()),
        ..Default::default()
    });
    CriterionResult {
        id,
        name: criterion_name(id).into(),
        passed: tally.violations == 0,
        checked: tally.checked,
        violations: tally.violations,
        detail: tally.detail,
        witness: tally.witness,
        elapsed_ms: config.timing.then(|| start.elapsed().as_millis() as u64),
    }
}

fn encodings() -> Result<Tally> {
    let mut t = Tally::default();
    for x in 0..100 {
        for y in 0..100 {
            t.checked += 1;
            if unpair(pair(x, y)?) != (x, y) {
                t.violation(|| format!("unpair(pair({x},{y})) != ({x},{y})"));
            }
        }
    }
    for z in 0..10_000 {
        t.checked += 1;
        let (x, y) = unpair(z);
        if pair(x, y)? != z {
            t.violation(|| format!("pair(unpair({z})) != {z}"));
        }
    }
    for n in 0..4096 {
        t.checked += 1;
        if finite_set_encode(&finite_set_decode(n))? != n {
            t.violation(|| format!("D_{n} does not round trip"));
        }
    }
    t.detail = "pair/unpair on [0,100)^2 and [0,10000), D_n for n < 4096".into();
    Ok(t)
}

/// Every code a registry holds after the sample learners, the two-code
/// learner and their diagonal sets have been set up.
fn populated_registry(fault: Option<Fault>) -> Result<(Arc<Registry>, Vec<Hypothesis>)> {
    let registry = Registry::new();
    let mut codes = Vec::new();
    let mut adversaries = Vec::new();
    for kind in SampleKind::ALL {
        let id = sample_learner(kind, &registry);
        adversaries.push(id);
        registry.register_learner(Arc::new(PaperLearner::new(id)));
        let learner = registry.learner(id)?;
        // whatever the learner outputs on short inputs
        for len in 0..20u64 {
            codes.push(learner.decide(&(0..len).collect()));
        }
    }
    registry.register_set(FiniteSet::from([2, 3, 5, 7]));
    register_base_set(&registry, 1);
    if fault == Some(Fault::NonMonotoneEnumerator) {
        registry.register(Arc::new(StagedFn(|s: u64| if s.is_multiple_of(2) { (0..=s).collect() } else { FiniteSet::new() })));
    }
    codes.extend(registry.plain_codes());
    for id in adversaries {
        for e in 0..2 {
            for variant in [Variant::Plain, Variant::Hat] {
                codes.push(registry.register_diagonal(id, e, variant)?);
            }
        }
    }
    let codes: BTreeSet<Hypothesis> = codes.into_iter().collect();
    Ok((registry, codes.into_iter().collect()))
}

fn monotonicity(fault: Option<Fault>) -> Result<Tally> {
    let (registry, codes) = populated_registry(fault)?;
    let mut t = Tally::default();
    for &h in &codes {
        let mut previous = registry.enumerate_to(h, 0)?;
        for s in 0..500 {
            let next = registry.enumerate_to(h, s + 1)?;
            t.checked += 1;
            if let Some(x) = previous.difference(&next).least() {
                t.violation(|| format!("code {h}: {x} in W_(h,{s}) but not in W_(h,{})", s + 1));
            }
            previous = next;
        }
    }
    t.detail = format!("{} codes, stages 0..500", codes.len());
    Ok(t)
}

fn construction(kind: SampleKind, e: u64, horizon: u64) -> Result<(Arc<Registry>, Construction)> {
    let registry = Registry::new();
    let id = sample_learner(kind, &registry);
    let mut c = Construction::new(id, registry.learner(id)?, e, registry.search_budget());
    c.advance_to(horizon, &registry)?;
    Ok((registry, c))
}

fn chain_invariant() -> Result<Tally> {
    let mut t = Tally::default();
    let horizon = 500;
    for kind in [SampleKind::ConstantZero, SampleKind::LengthParity] {
        for e in 0..3 {
            let (registry, c) = construction(kind, e, horizon)?;
            for s in 0..=horizon {
                t.checked += 1;
                if let Some(&n) = c.chain_violations(s).first() {
                    t.violation(|| format!("{} e={e}: row {n} does not extend row {} at stage {s}", kind.as_str(), n - 1));
                }
            }
            for (n, entry) in c.column().into_iter().enumerate() {
                let Some(sigma) = entry else { continue };
                t.checked += 1;
                let q = check_stabilizing(&registry, c.learner().as_ref(), e, n as u64, sigma, horizon)?;
                if !q.holds() {
                    t.violation(|| format!("{} e={e}: row {n} = {sigma:?} fails Q at {horizon}: {q:?}", kind.as_str()));
                }
            }
            if c.unresolved_searches() > 0 {
                t.violation(|| format!("{} e={e}: {} searches ran out of budget", kind.as_str(), c.unresolved_searches()));
            }
        }
    }
    t.detail = "constant_zero and length_parity, e in {0,1,2}, horizon 500".into();
    Ok(t)
}

fn all_rows_settle() -> Result<Tally> {
    let mut t = Tally::default();
    let registry = Registry::new();
    let id = sample_learner(SampleKind::ConstantZero, &registry);
    let live = registry.construction(id, 0)?;
    live.advance_to(&registry, 2000)?;

    let x0 = registry.register_diagonal(id, 0, Variant::Plain)?;
    let x0_hat = registry.register_diagonal(id, 0, Variant::Hat)?;
    let sizes: Vec<usize> =
        [50, 100, 200].iter().map(|&b| registry.sym_diff_below(x0, x0_hat, b, 2000).map(|d| d.len())).collect::<Result<_>>()?;
    t.checked += 1;
    if sizes[0] == 0 || !sizes.windows(2).all(|w| w[0] < w[1]) {
        t.violation(|| format!("symmetric differences below 50, 100, 200: {sizes:?}"));
    }

    let before: Vec<_> = live.with(|c| (0..=5).map(|l| (c.settled_a_value(l), c.current(l).cloned())).collect());
    live.advance_to(&registry, 4000)?;
    let after: Vec<_> = live.with(|c| (0..=5).map(|l| (c.settled_a_value(l), c.current(l).cloned())).collect());
    for (ell, ((a, row), (a2, row2))) in before.iter().zip(&after).enumerate() {
        let ell = ell as u64;
        t.checked += 1;
        match a {
            Some(a) if a % 2 == 0 && *a > ell + 1 && Some(*a) == *a2 && row == row2 => {}
            _ => t.violation(|| format!("row {ell}: marker {a:?} at 2000, {a2:?} at 4000")),
        }
    }
    t.detail = format!("rows 0..=5 settled; symmetric differences {sizes:?}");
    Ok(t)
}

fn stalled_construction() -> Result<Tally> {
    let mut t = Tally::default();
    let (registry, c) = construction(SampleKind::FreshEachStep, 0, 200)?;
    t.checked += 1;
    if let Some(ell) = c.a_values(201).iter().position(Option::is_some) {
        t.violation(|| format!("row {ell} has a marker"));
    }
    let learner = c.learner().clone();
    let text = adversarial_text(&registry, learner.as_ref(), 0, 100)?;
    let text = Text::from_sequence(register_base_set(&registry, 0), text);
    let trace = run_learner(learner.as_ref(), &text, 100);
    let distinct = trace.distinct().len();
    t.checked += 1;
    if distinct < 50 {
        t.violation(|| format!("only {distinct} distinct hypotheses"));
    }
    let params = CheckParams::new(Allowance::Star, Allowance::Finite(10), 100);
    let verdict = check_txtfext(&registry, &trace, &text, &params)?;
    t.checked += 1;
    let rechecked = match &verdict.witness {
        Some(w) => w.recheck(&registry, &trace, &text, params.settle)?,
        None => false,
    };
    if verdict.status != Status::FailWitnessed || !rechecked {
        t.violation(|| format!("txtfext with j=10: {:?}", verdict.status));
    }
    t.detail = format!("{distinct} distinct hypotheses on a length-100 adversarial text");
    Ok(t)
}

/// Finite parts used for family members.
pub const SAMPLE_FINITE_PARTS: [u64; 10] = [0, 1, 2, 5, 6, 12, 40, 255, 1 << 20, (1 << 40) | 9];

fn paper_learner_family() -> Result<Tally> {
    let mut t = Tally::default();
    let horizon = 500;
    for kind in [SampleKind::ConstantZero, SampleKind::FreshEachStep] {
        let registry = Registry::new();
        let id = sample_learner(kind, &registry);
        let paper = PaperLearner::new(id);
        let allowed: BTreeSet<Hypothesis> =
            [Variant::Plain, Variant::Hat].iter().map(|&v| registry.register_diagonal(id, 0, v)).collect::<Result<_>>()?;
        for n in SAMPLE_FINITE_PARTS {
            for variant in [Variant::Plain, Variant::Hat] {
                let code = registry.register(family_member(&registry, id, 0, n, variant)?);
                let text = canonical_text(&registry, code, horizon as usize)?;
                let trace = run_learner(&paper, &text, horizon);
                for settle in [horizon / 4, horizon / 2, 3 * horizon / 4] {
                    let params = CheckParams::new(Allowance::Star, Allowance::Finite(2), horizon).with_settle(settle);
                    let v = check_txtfex(&registry, &trace, &text, &params)?;
                    t.checked += 1;
                    let inside = v.hypotheses.iter().all(|h| allowed.contains(h));
                    if !v.passed() || !inside {
                        t.violation(|| {
                            format!("{} n={n} {variant:?} settle {settle}: {:?} {:?}", kind.as_str(), v.status, v.hypotheses)
                        });
                    }
                }
            }
        }
    }
    t.detail = "40 members (2 constructions, 10 finite parts, 2 variants), settle points 125/250/375, horizon 500".into();
    Ok(t)
}

fn oracle_equivalence() -> Result<Tally> {
    let mut t = Tally::default();
    let horizon = 400;
    for kind in SampleKind::ALL {
        for e in 0..2 {
            let registry = Registry::new();
            let id = sample_learner(kind, &registry);
            let live = registry.construction(id, e)?;
            live.advance_to(&registry, horizon)?;
            for variant in [Variant::Plain, Variant::Hat] {
                let code = registry.register_diagonal(id, e, variant)?;
                let enumerated = registry.enumerate_to(code, horizon)?.below(50);
                let marked = live.with(|c| r_prefix(c, 50, variant));
                t.checked += 1;
                if enumerated != marked {
                    t.violation(|| {
                        format!("{} e={e} {variant:?}: enumerator {enumerated:?} vs markers {marked:?}", kind.as_str())
                    });
                }
            }
        }
    }
    t.detail = format!("all sample learners, e in {{0,1}}, both variants, bound 50, horizon {horizon}");
    Ok(t)
}

/// Where the text of a random scenario comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum TextSource {
    FamilyMember { n: u64, variant: Variant },
    BaseSet,
    Finite { set: FiniteSet },
    Adversarial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RandomScenario {
    pub learner: LearnerKind,
    pub adversary: SampleKind,
    pub e: u64,
    pub text: TextSource,
    pub params: CheckParams,
}

impl RandomScenario {
    pub fn sample(rng: &mut impl Rng) -> Self {
        let learners = [LearnerKind::ConstantZero, LearnerKind::FreshEachStep, LearnerKind::LengthParity, LearnerKind::Paper];
        let learner = learners[rng.gen_range(0..learners.len())];
        let adversary = SampleKind::ALL[rng.gen_range(0..3)];
        let e = rng.gen_range(0..3);
        let text = match rng.gen_range(0..4) {
            0 => TextSource::FamilyMember {
                n: rng.gen_range(0..256),
                variant: if rng.gen_bool(0.5) { Variant::Plain } else { Variant::Hat },
            },
            1 => TextSource::BaseSet,
            2 => {
                let mut set: FiniteSet = (0..rng.gen_range(1..6)).map(|_| e + rng.gen_range(0..10)).collect();
                set.insert(e);
                TextSource::Finite { set }
            }
            _ => TextSource::Adversarial,
        };
        let allowance = |rng: &mut dyn rand::RngCore, star_odds: f64, hi: u64| {
            if rng.gen_bool(star_odds) {
                Allowance::Star
            } else {
                Allowance::Finite(rng.gen_range(0..=hi))
            }
        };
        let i = allowance(rng, 0.4, 3);
        let j = match allowance(rng, 0.25, 3) {
            Allowance::Finite(0) => Allowance::Finite(1),
            other => other,
        };
        let horizon = rng.gen_range(40..=160);
        let settle = rng.gen_range(0..horizon);
        let bound = rng.gen_range(1..=horizon / 2);
        RandomScenario { learner, adversary, e, text, params: CheckParams { i, j, horizon, settle, bound } }
    }

    /// Both verdicts, with every witness re-checked.
    pub fn evaluate(&self) -> Result<(Verdict, Verdict, bool)> {
        let registry = Registry::new();
        let adversary = sample_learner(self.adversary, &registry);
        let learner: Arc<dyn Learner> = match self.learner.sample() {
            Some(kind) => registry.learner(sample_learner(kind, &registry))?,
            None => Arc::new(PaperLearner::new(adversary)),
        };
        let len = self.params.horizon as usize;
        let text = match &self.text {
            TextSource::FamilyMember { n, variant } => {
                let code = registry.register(family_member(&registry, adversary, self.e, *n, *variant)?);
                canonical_text(&registry, code, len)?
            }
            TextSource::BaseSet => canonical_text(&registry, register_base_set(&registry, self.e), len)?,
            TextSource::Finite { set } => canonical_text(&registry, registry.register_set(set.clone()), len)?,
            TextSource::Adversarial => {
                let seq = adversarial_text(&registry, learner.as_ref(), self.e, self.params.horizon)?;
                Text::from_sequence(register_base_set(&registry, self.e), seq)
            }
        };
        let trace = run_learner(learner.as_ref(), &text, self.params.horizon);
        let fex = check_txtfex(&registry, &trace, &text, &self.params)?;
        let fext = check_txtfext(&registry, &trace, &text, &self.params)?;
        let mut witnesses_hold = true;
        for v in [&fex, &fext] {
            if let Some(w) = &v.witness {
                witnesses_hold &= w.recheck(&registry, &trace, &text, self.params.settle)?;
            }
        }
        Ok((fex, fext, witnesses_hold))
    }
}

fn containment(seed: u64, scenarios: u64) -> Result<Tally> {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fext_passes = 0;
    for k in 0..scenarios {
        let scenario = RandomScenario::sample(&mut rng);
        let (fex, fext, witnesses_hold) = scenario.evaluate()?;
        t.checked += 1;
        fext_passes += fext.passed() as u64;
        if fext.passed() && !fex.passed() {
            t.violation(|| format!("scenario {k}: txtfext passed but txtfex gave {:?}: {scenario:?}", fex.status));
        }
        if !witnesses_hold {
            t.violation(|| format!("scenario {k}: a witness does not re-check: {scenario:?}"));
        }
    }
    t.detail = format!("{scenarios} scenarios from seed {seed}; {fext_passes} strict passes");
    Ok(t)
}

fn reproducible() -> Result<Tally> {
    let mut t = Tally::default();
    let configs = [
        ExperimentConfig { learner: LearnerKind::LengthParity, horizon: 120, ..Default::default() },
        ExperimentConfig { learner: LearnerKind::Paper, horizon: 120, member: 6, ..Default::default() },
    ];
    for config in &configs {
        t.checked += 1;
        let first = cmd_construct(config)?.to_json() + &cmd_learn(config)?.to_json();
        let second = cmd_construct(config)?.to_json() + &cmd_learn(config)?.to_json();
        if first != second {
            t.violation(|| format!("{:?} reports differ between runs", config.learner));
        }
    }
    t.detail = "construct and learn reports compared byte for byte; the whole suite is compared by the test harness".into();
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fault_injection_is_caught() {
        let clean = run_criterion(2, &ExperimentConfig::default());
        assert!(clean.passed, "{clean:?}");
        let faulty = run_criterion(2, &ExperimentConfig { inject_fault: Some(Fault::NonMonotoneEnumerator), ..Default::default() });
        assert!(!faulty.passed);
        assert!(faulty.witness.unwrap().contains("but not in"));
    }

    #[test]
    fn random_scenarios_are_seeded() {
        let a: Vec<_> = (0..5).map({
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            move |_| RandomScenario::sample(&mut rng)
        }).collect();
        let b: Vec<_> = (0..5).map({
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            move |_| RandomScenario::sample(&mut rng)
        }).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn small_criteria_pass() {
        for id in [1, 7, 9] {
            let r = run_criterion(id, &ExperimentConfig::default());
            assert!(r.passed, "{r:?}");
            assert!(r.elapsed_ms.is_none());
        }
    }
}
