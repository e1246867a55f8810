//! Driving the harness from code and writing its JSON reports.

use txtfex::harness::{cmd_check, cmd_construct, Body, ExperimentConfig, LearnerKind};

fn main() -> txtfex::Result<()> {
    let config = ExperimentConfig { learner: LearnerKind::LengthParity, horizon: 120, ..Default::default() };

    let report = cmd_construct(&config)?;
    if let Body::Construction(c) = &report.body {
        println!("{} rows, case {:?}", c.defined_rows, c.case);
    }

    let report = cmd_check(&config)?;
    if let Body::Check(s) = &report.body {
        for run in &s.runs {
            let statuses: Vec<_> = run.verdicts.iter().map(|v| (v.settle, v.txtfex.status, v.txtfext.status)).collect();
            println!("{}: {statuses:?}", run.label);
        }
    }
    println!("ok: {}", report.ok());

    let path = std::env::temp_dir().join("txtfex-check.json");
    report.write_to(&path)?;
    println!("wrote {} ({} bytes)", path.display(), report.to_json().len());
    Ok(())
}
