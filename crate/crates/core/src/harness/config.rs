use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::criteria::Allowance;
use crate::error::{Error, Result};
use crate::learners::{PaperLearner, SampleKind};
use crate::universe::{LearnerId, Registry, Variant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    ConstantZero,
    FreshEachStep,
    LengthParity,
    /// The two-code learner for the diagonal family built against `target`.
    Paper,
}

impl LearnerKind {
    pub fn sample(self) -> Option<SampleKind> {
        match self {
            LearnerKind::ConstantZero => Some(SampleKind::ConstantZero),
            LearnerKind::FreshEachStep => Some(SampleKind::FreshEachStep),
            LearnerKind::LengthParity => Some(SampleKind::LengthParity),
            LearnerKind::Paper => None,
        }
    }

    pub fn parse(name: &str) -> Option<LearnerKind> {
        if name == "paper" {
            return Some(LearnerKind::Paper);
        }
        SampleKind::parse(name).map(|k| match k {
            SampleKind::ConstantZero => LearnerKind::ConstantZero,
            SampleKind::FreshEachStep => LearnerKind::FreshEachStep,
            SampleKind::LengthParity => LearnerKind::LengthParity,
        })
    }
}

/// Deliberate corruption used to check that the suite notices it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Registers an enumerator that drops elements at odd stages.
    NonMonotoneEnumerator,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub learner: LearnerKind,
    /// Adversary whose diagonal family is used when `learner` is `paper`.
    pub target: SampleKind,
    pub base_e: u64,
    pub horizon: u64,
    /// Element bound for comparisons; defaults to a quarter of the horizon.
    pub bound: Option<u64>,
    /// Settle point; defaults to a sweep over quarters of the horizon.
    pub settle: Option<u64>,
    pub seed: u64,
    /// Index `n` of the finite part `D_n` of the family member under test.
    pub member: u64,
    pub variant: Variant,
    pub i: Allowance,
    pub j: Allowance,
    /// Members listed by `family`.
    pub family_size: u64,
    /// Random scenarios in the containment check of `suite`.
    pub scenarios: u64,
    pub out: Option<PathBuf>,
    /// Record wall-clock times (makes reports differ between runs).
    pub timing: bool,
    pub inject_fault: Option<Fault>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            learner: LearnerKind::Paper,
            target: SampleKind::ConstantZero,
            base_e: 0,
            horizon: 200,
            bound: None,
            settle: None,
            seed: 0,
            member: 0,
            variant: Variant::Plain,
            i: Allowance::Star,
            j: Allowance::Finite(2),
            family_size: 8,
            scenarios: 100,
            out: None,
            timing: false,
            inject_fault: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: Self = serde_json::from_str(&text)?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(bound) = self.bound {
            if bound > self.horizon {
                return Err(Error::InvalidConfig(format!("bound {bound} exceeds horizon {}", self.horizon)));
            }
        }
        if let Some(settle) = self.settle {
            if settle > self.horizon {
                return Err(Error::InvalidConfig(format!("settle point {settle} exceeds horizon {}", self.horizon)));
            }
        }
        if self.family_size > 64 {
            return Err(Error::InvalidConfig("family_size is limited to 64 members".into()));
        }
        Ok(())
    }

    pub fn bound(&self) -> u64 {
        self.bound.unwrap_or((self.horizon / 4).max(1))
    }

    /// The settle points to evaluate.
    pub fn settle_points(&self) -> Vec<u64> {
        match self.settle {
            Some(s) => vec![s],
            None => {
                let h = self.horizon;
                let mut points = vec![h / 4, h / 2, 3 * h / 4];
                points.dedup();
                points
            }
        }
    }

    /// The adversary whose construction the command works on.
    pub fn adversary(&self) -> SampleKind {
        self.learner.sample().unwrap_or(self.target)
    }
}

/// Registers the adversary and, for `paper`, the learner aimed at it.
/// Returns `(adversary, learner under test)`.
pub fn register_learners(config: &ExperimentConfig, registry: &Registry) -> (LearnerId, LearnerId) {
    let adversary = crate::learners::sample_learner(config.adversary(), registry);
    let learner = match config.learner {
        LearnerKind::Paper => registry.register_learner(std::sync::Arc::new(PaperLearner::new(adversary))),
        _ => adversary,
    };
    (adversary, learner)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_defaults() {
        let config = ExperimentConfig { horizon: 50, bound: Some(10), ..Default::default() };
        let json = serde_json::to_string(&config).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, config);
        let sparse: ExperimentConfig = serde_json::from_str(r#"{"learner": "length_parity", "i": 1}"#).unwrap();
        assert_eq!(sparse.learner, LearnerKind::LengthParity);
        assert_eq!(sparse.i, Allowance::Finite(1));
        assert_eq!(sparse.horizon, 200);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"horizn": 5}"#).is_err());
    }

    #[test]
    fn validation() {
        assert!(ExperimentConfig::default().validate().is_ok());
        let bad = ExperimentConfig { horizon: 10, bound: Some(11), ..Default::default() };
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        let bad = ExperimentConfig { horizon: 10, settle: Some(20), ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn settle_sweep() {
        let config = ExperimentConfig { horizon: 100, ..Default::default() };
        assert_eq!(config.settle_points(), vec![25, 50, 75]);
        let fixed = ExperimentConfig { settle: Some(40), ..config };
        assert_eq!(fixed.settle_points(), vec![40]);
    }

    #[test]
    fn learner_names() {
        assert_eq!(LearnerKind::parse("paper"), Some(LearnerKind::Paper));
        assert_eq!(LearnerKind::parse("fresh-each-step"), Some(LearnerKind::FreshEachStep));
        assert_eq!(LearnerKind::parse("nope"), None);
    }
}
