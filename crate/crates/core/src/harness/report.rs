use std::path::Path;

use serde::Serialize;

use super::config::ExperimentConfig;
use crate::criteria::{Trace, Verdict};
use crate::diagonalization::{CaseObservation, RowDigest};
use crate::encodings::FiniteSet;
use crate::error::Result;
use crate::universe::{Hypothesis, Variant};

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Construct,
    Learn,
    Check,
    Family,
    Suite,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: Command,
    pub config: ExperimentConfig,
    #[serde(flatten)]
    pub body: Body,
    /// Required checks that did not hold; the process exits nonzero if any.
    pub failures: Vec<String>,
}

impl Report {
    pub fn new(command: Command, config: &ExperimentConfig, body: Body, failures: Vec<String>) -> Self {
        Self { schema_version: SCHEMA_VERSION, command, config: config.clone(), body, failures }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Body {
    Construction(ConstructionReport),
    Learn(ScenarioReport),
    Check(ScenarioReport),
    Family(FamilyReport),
    Suite(SuiteReport),
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionReport {
    pub learner: String,
    pub e: u64,
    pub stage: u64,
    pub defined_rows: u64,
    pub unresolved_searches: u64,
    pub case: CaseObservation,
    pub rows: Vec<RowDigest>,
    pub bound: u64,
    pub r_prefix: FiniteSet,
    pub r_hat_prefix: FiniteSet,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub learner: String,
    pub case: Option<CaseObservation>,
    pub runs: Vec<LearnRun>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LearnRun {
    pub label: String,
    pub target: Hypothesis,
    pub text_prefix: Vec<u64>,
    pub trace: TraceSummary,
    pub verdicts: Vec<SettleVerdicts>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SettleVerdicts {
    pub settle: u64,
    pub bound: u64,
    pub txtfex: Verdict,
    pub txtfext: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceSummary {
    pub horizon: u64,
    pub distinct_outputs: usize,
    pub mind_changes: usize,
    pub last_outputs: Vec<Hypothesis>,
}

impl TraceSummary {
    pub fn of(trace: &Trace) -> Self {
        let outputs = &trace.outputs;
        Self {
            horizon: trace.horizon(),
            distinct_outputs: trace.distinct().len(),
            mind_changes: outputs.windows(2).filter(|w| w[0] != w[1]).count(),
            last_outputs: outputs[outputs.len().saturating_sub(8)..].to_vec(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub learner: String,
    pub e: u64,
    pub stage: u64,
    pub bound: u64,
    pub members: Vec<MemberPrefix>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MemberPrefix {
    pub n: u64,
    pub variant: Variant,
    pub finite_part: FiniteSet,
    pub prefix: FiniteSet,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub passed: usize,
    pub failed: usize,
    pub criteria: Vec<CriterionResult>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub checked: u64,
    pub violations: u64,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}
