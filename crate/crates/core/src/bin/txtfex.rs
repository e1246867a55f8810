use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use txtfex::criteria::Allowance;
use txtfex::harness::{run, Command, ExperimentConfig, LearnerKind};
use txtfex::learners::SampleKind;
use txtfex::universe::Variant;

#[derive(Parser)]
#[command(version, about = "Run the diagonal construction, learners and identification checks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Advance a construction to the horizon and print its table digest.
    Construct(Flags),
    /// Run a learner on the scenario's texts and check both criteria.
    Learn(Flags),
    /// Like `learn`, sweeping the settle point.
    Check(Flags),
    /// List prefixes of family members.
    Family(Flags),
    /// Run every acceptance check.
    Suite(Flags),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Plain,
    Hat,
}

#[derive(Args)]
struct Flags {
    /// JSON config file; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// constant_zero, fresh_each_step, length_parity or paper.
    #[arg(long)]
    learner: Option<String>,
    /// Adversary whose family the paper learner is run on.
    #[arg(long)]
    target: Option<String>,
    #[arg(long = "base-e")]
    base_e: Option<u64>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    bound: Option<u64>,
    #[arg(long)]
    settle: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Index n of the finite part D_n of the family member.
    #[arg(long)]
    member: Option<u64>,
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Error allowance: a natural or '*'.
    #[arg(short = 'i', long = "errors")]
    i: Option<String>,
    /// Vacillation allowance: a natural or '*'.
    #[arg(short = 'j', long = "codes")]
    j: Option<String>,
    #[arg(long = "family-size")]
    family_size: Option<u64>,
    #[arg(long)]
    scenarios: Option<u64>,
    /// Record timings in the report (breaks byte-for-byte reproducibility).
    #[arg(long)]
    timing: bool,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Flags {
    fn into_config(self) -> anyhow::Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(name) = &self.learner {
            config.learner = LearnerKind::parse(name).ok_or_else(|| anyhow::anyhow!("unknown learner {name:?}"))?;
        }
        if let Some(name) = &self.target {
            config.target = SampleKind::parse(name).ok_or_else(|| anyhow::anyhow!("unknown target {name:?}"))?;
        }
        config.base_e = self.base_e.unwrap_or(config.base_e);
        config.horizon = self.horizon.unwrap_or(config.horizon);
        config.bound = self.bound.or(config.bound);
        config.settle = self.settle.or(config.settle);
        config.seed = self.seed.unwrap_or(config.seed);
        config.member = self.member.unwrap_or(config.member);
        if let Some(v) = self.variant {
            config.variant = match v {
                VariantArg::Plain => Variant::Plain,
                VariantArg::Hat => Variant::Hat,
            };
        }
        if let Some(i) = &self.i {
            config.i = i.parse::<Allowance>()?;
        }
        if let Some(j) = &self.j {
            config.j = j.parse::<Allowance>()?;
        }
        config.family_size = self.family_size.unwrap_or(config.family_size);
        config.scenarios = self.scenarios.unwrap_or(config.scenarios);
        config.timing |= self.timing;
        config.out = self.out.or(config.out);
        config.validate()?;
        Ok(config)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = match cli.command {
        Cmd::Construct(f) => (Command::Construct, f),
        Cmd::Learn(f) => (Command::Learn, f),
        Cmd::Check(f) => (Command::Check, f),
        Cmd::Family(f) => (Command::Family, f),
        Cmd::Suite(f) => (Command::Suite, f),
    };
    match execute(command, flags) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command, flags: Flags) -> anyhow::Result<bool> {
    let config = flags.into_config()?;
    let report = run(command, &config)?;
    match &config.out {
        Some(path) => {
            report.write_to(path)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{}", report.to_json()),
    }
    for failure in &report.failures {
        eprintln!("FAIL: {failure}");
    }
    Ok(report.ok())
}
