use std::sync::Arc;

use super::config::{register_learners, ExperimentConfig, LearnerKind};
use super::report::*;
use super::suite;
use crate::criteria::{canonical_text, canonical_text_after, check_txtfex, check_txtfext, run_learner, CheckParams, Text};
use crate::diagonalization::{
    adversarial_text, classify_case, family_member, family_member_with, r_prefix, separation_level, CaseObservation,
    LiveConstruction,
};
use crate::encodings::{finite_set_decode, FiniteSet};
use crate::error::Result;
use crate::learners::Learner;
use crate::universe::{Hypothesis, LearnerId, Registry, StagedFn, Variant};

/// Rows inspected when deciding which way a construction is going.
const CASE_PROBE: u64 = 4;
/// Rows listed in a construction digest.
const DIGEST_ROWS: u64 = 64;

pub fn run(command: Command, config: &ExperimentConfig) -> Result<Report> {
    match command {
        Command::Construct => cmd_construct(config),
        Command::Learn => cmd_learn(config),
        Command::Check => cmd_check(config),
        Command::Family => cmd_family(config),
        Command::Suite => cmd_suite(config),
    }
}

fn advanced(config: &ExperimentConfig, registry: &Registry, adversary: LearnerId) -> Result<Arc<LiveConstruction>> {
    let live = registry.construction(adversary, config.base_e)?;
    live.advance_to(registry, config.horizon)?;
    Ok(live)
}

/// Advances the adversary's construction to the horizon and digests it.
pub fn cmd_construct(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let registry = Registry::new();
    let (adversary, _) = register_learners(config, &registry);
    let live = advanced(config, &registry, adversary)?;
    let bound = config.bound();
    let body = live.with(|c| ConstructionReport {
        learner: c.learner().name(),
        e: c.e(),
        stage: c.stage(),
        defined_rows: c.defined_rows(),
        unresolved_searches: c.unresolved_searches(),
        case: classify_case(c, CASE_PROBE),
        rows: c.digest((c.defined_rows() + 1).min(DIGEST_ROWS)),
        bound,
        r_prefix: r_prefix(c, bound, Variant::Plain),
        r_hat_prefix: r_prefix(c, bound, Variant::Hat),
    });
    let failures = live.with(|c| {
        (0..=c.stage())
            .filter(|&s| !c.chain_violations(s).is_empty())
            .map(|s| format!("chain invariant broken at stage {s}"))
            .collect()
    });
    Ok(Report::new(Command::Construct, config, Body::Construction(body), failures))
}

/// Runs the learner on one text per scenario at a single settle point.
pub fn cmd_learn(config: &ExperimentConfig) -> Result<Report> {
    let settle = config.settle.unwrap_or(config.horizon / 2);
    let (body, failures) = scenario_report(config, &[settle])?;
    Ok(Report::new(Command::Learn, config, Body::Learn(body), failures))
}

/// As `learn`, sweeping the settle point.
pub fn cmd_check(config: &ExperimentConfig) -> Result<Report> {
    let (body, failures) = scenario_report(config, &config.settle_points())?;
    Ok(Report::new(Command::Check, config, Body::Check(body), failures))
}

struct Scenario {
    learner: Arc<dyn Learner>,
    case: Option<CaseObservation>,
    texts: Vec<(String, Text)>,
}

fn build_scenario(config: &ExperimentConfig, registry: &Registry) -> Result<Scenario> {
    let (adversary, learner_id) = register_learners(config, registry);
    let learner = registry.learner(learner_id)?;
    let e = config.base_e;
    let len = config.horizon as usize;
    if config.learner == LearnerKind::Paper {
        let member = family_member(registry, adversary, e, config.member, config.variant)?;
        let code = registry.register(member);
        let label = format!("member n={} {:?} of the family against {}", config.member, config.variant, config.target.as_str());
        return Ok(Scenario { learner, case: None, texts: vec![(label, canonical_text(registry, code, len)?)] });
    }
    let live = advanced(config, registry, adversary)?;
    let case = live.with(|c| classify_case(c, CASE_PROBE));
    let texts = match case {
        CaseObservation::Stalled { unstable_row } => {
            let base = register_base_set(registry, e);
            let text = adversarial_text(registry, learner.as_ref(), e, config.horizon)?;
            vec![(format!("adversarial text for L_{e} (row {unstable_row} unsettled)"), Text::from_sequence(base, text))]
        }
        CaseObservation::AllRowsSettle { .. } => {
            let (level, sigma) = live.with(|c| -> Result<_> {
                let level = separation_level(registry, c, config.horizon)?;
                let row = level.min(c.defined_rows().saturating_sub(1));
                Ok((level, c.current(row).cloned().unwrap_or_default()))
            })?;
            let mut texts = Vec::new();
            for variant in [Variant::Plain, Variant::Hat] {
                let member = family_member_with(registry, adversary, e, &sigma.content(), variant)?;
                let code = registry.register(member);
                let label = format!("text extending sigma_{level} for content(sigma_{level}) ∪ {variant:?} set");
                texts.push((label, canonical_text_after(registry, code, &sigma, len)?));
            }
            texts
        }
    };
    Ok(Scenario { learner, case: Some(case), texts })
}

fn scenario_report(config: &ExperimentConfig, settles: &[u64]) -> Result<(ScenarioReport, Vec<String>)> {
    config.validate()?;
    let registry = Registry::new();
    let scenario = build_scenario(config, &registry)?;
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for (label, text) in scenario.texts {
        let trace = run_learner(scenario.learner.as_ref(), &text, config.horizon);
        let mut verdicts = Vec::new();
        for &settle in settles {
            let params = CheckParams::new(config.i, config.j, config.horizon).with_settle(settle).with_bound(config.bound());
            let txtfex = check_txtfex(&registry, &trace, &text, &params)?;
            let txtfext = check_txtfext(&registry, &trace, &text, &params)?;
            match config.learner {
                LearnerKind::Paper if txtfex.failed() => {
                    failures.push(format!("{label}: txtfex failed at settle {settle}"));
                }
                LearnerKind::Paper => {}
                _ if txtfext.passed() => {
                    failures.push(format!("{label}: adversary passed txtfext on its own family at settle {settle}"));
                }
                _ => {}
            }
            verdicts.push(SettleVerdicts { settle, bound: params.bound, txtfex, txtfext });
        }
        runs.push(LearnRun {
            label,
            target: text.target,
            text_prefix: text.items()[..text.len().min(64)].to_vec(),
            trace: TraceSummary::of(&trace),
            verdicts,
        });
    }
    Ok((ScenarioReport { learner: scenario.learner.name(), case: scenario.case, runs }, failures))
}

/// Prefixes of the first `family_size` members, both variants.
pub fn cmd_family(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let registry = Registry::new();
    let (adversary, _) = register_learners(config, &registry);
    let live = advanced(config, &registry, adversary)?;
    let bound = config.bound();
    let e = config.base_e;
    let mut members = Vec::new();
    for n in 0..config.family_size {
        for variant in [Variant::Plain, Variant::Hat] {
            let member = family_member(&registry, adversary, e, n, variant)?;
            members.push(MemberPrefix {
                n,
                variant,
                finite_part: finite_set_decode(n).at_least(e),
                prefix: member.stage(config.horizon)?.below(bound),
            });
        }
    }
    let body = FamilyReport { learner: live.with(|c| c.learner().name()), e, stage: live.stage(), bound, members };
    Ok(Report::new(Command::Family, config, Body::Family(body), Vec::new()))
}

pub fn cmd_suite(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let criteria: Vec<CriterionResult> = suite::CRITERIA.iter().map(|&id| suite::run_criterion(id, config)).collect();
    let failures: Vec<String> =
        criteria.iter().filter(|c| !c.passed).map(|c| format!("criterion {} ({}) failed", c.id, c.name)).collect();
    let passed = criteria.iter().filter(|c| c.passed).count();
    let body = SuiteReport { passed, failed: criteria.len() - passed, criteria };
    Ok(Report::new(Command::Suite, config, Body::Suite(body), failures))
}

/// A code for `L_e = [e, ∞)`.
pub fn register_base_set(registry: &Registry, e: u64) -> Hypothesis {
    registry.register(Arc::new(StagedFn(move |s: u64| (e..=e + s).collect::<FiniteSet>())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::Status;
    use crate::error::Error;

    fn config(learner: LearnerKind, horizon: u64) -> ExperimentConfig {
        ExperimentConfig { learner, horizon, ..Default::default() }
    }

    #[test]
    fn construct_reports() {
        let report = cmd_construct(&config(LearnerKind::ConstantZero, 200)).unwrap();
        assert!(report.ok());
        let Body::Construction(body) = &report.body else { panic!() };
        assert_eq!(body.stage, 200);
        assert!(body.rows.iter().take(10).all(|r| r.a_value.is_some_and(|a| a % 2 == 0)));

        let report = cmd_construct(&config(LearnerKind::FreshEachStep, 200)).unwrap();
        let Body::Construction(body) = &report.body else { panic!() };
        assert!(body.rows.iter().all(|r| r.a_value.is_none()));

        let report = cmd_construct(&config(LearnerKind::ConstantZero, 0)).unwrap();
        let Body::Construction(body) = &report.body else { panic!() };
        assert_eq!(body.rows.len(), 1);
        assert_eq!(body.rows[0].value, Some(crate::encodings::Sequence::empty()));
    }

    #[test]
    fn paper_learner_passes_on_a_family_member() {
        let report = cmd_learn(&ExperimentConfig { horizon: 300, member: 5, ..Default::default() }).unwrap();
        assert!(report.ok(), "{:?}", report.failures);
        let Body::Learn(body) = &report.body else { panic!() };
        assert_eq!(body.runs[0].verdicts[0].txtfex.status, Status::PassAtHorizon);
    }

    #[test]
    fn adversaries_never_pass_the_strict_check_on_their_own_family() {
        for learner in [LearnerKind::ConstantZero, LearnerKind::FreshEachStep, LearnerKind::LengthParity] {
            let report = cmd_check(&config(learner, 200)).unwrap();
            assert!(report.ok(), "{learner:?}: {:?}", report.failures);
            let Body::Check(body) = &report.body else { panic!() };
            for run in &body.runs {
                assert_eq!(run.verdicts.len(), 3);
                assert!(run.verdicts.iter().all(|v| !v.txtfext.passed()), "{learner:?} {}", run.label);
            }
        }
    }

    #[test]
    fn horizon_zero_is_inconclusive() {
        for learner in [LearnerKind::Paper, LearnerKind::FreshEachStep] {
            let report = cmd_learn(&config(learner, 0)).unwrap();
            let Body::Learn(body) = &report.body else { panic!() };
            let run = &body.runs[0];
            assert_eq!(run.trace.horizon, 0);
            assert_eq!(run.verdicts[0].txtfex.status, Status::Inconclusive);
        }
    }

    #[test]
    fn family_listing() {
        let cfg = ExperimentConfig { learner: LearnerKind::ConstantZero, horizon: 100, family_size: 4, ..Default::default() };
        let report = cmd_family(&cfg).unwrap();
        let Body::Family(body) = &report.body else { panic!() };
        assert_eq!(body.members.len(), 8);
        // member 2 adds D_2 = {1}, which R_0 already has
        assert_eq!(body.members[0].prefix, body.members[4].prefix);
        assert!(body.members[2].prefix.contains(0));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let cfg = ExperimentConfig { horizon: 10, bound: Some(50), ..Default::default() };
        assert!(matches!(cmd_construct(&cfg), Err(Error::InvalidConfig(_))));
    }
}
