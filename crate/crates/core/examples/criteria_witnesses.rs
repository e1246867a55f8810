//! Checking a trace against both criteria and re-verifying failure witnesses.

use txtfex::criteria::{canonical_text, check_txtfex, check_txtfext, run_learner, Allowance, CheckParams};
use txtfex::encodings::FiniteSet;
use txtfex::learners::{FnLearner, Learner};
use txtfex::universe::Registry;

fn main() -> txtfex::Result<()> {
    let registry = Registry::new();
    let evens = registry.register_set((0..40).filter(|x| x % 2 == 0).collect());
    let small = registry.register_set((0..40).filter(|x| x % 2 == 0 && *x != 6).collect());
    let odds = registry.register_set((1..40).step_by(2).collect::<FiniteSet>());
    let text = canonical_text(&registry, evens, 200)?;

    // alternates between a one-error variant and the right set
    let wobbly = FnLearner::new("wobbly", move |s: &txtfex::encodings::Sequence| if s.len().is_multiple_of(2) { evens } else { small });
    // settles on the wrong set
    let wrong = FnLearner::new("wrong", move |_: &txtfex::encodings::Sequence| odds);

    for learner in [&wobbly as &dyn Learner, &wrong] {
        let trace = run_learner(learner, &text, 200);
        for (i, j) in [(Allowance::Finite(0), Allowance::Finite(2)), (Allowance::Finite(1), Allowance::Finite(2))] {
            let params = CheckParams::new(i, j, 200);
            for (name, verdict) in [
                ("txtfex ", check_txtfex(&registry, &trace, &text, &params)?),
                ("txtfext", check_txtfext(&registry, &trace, &text, &params)?),
            ] {
                print!("{:6} i={i} j={j} {name}: {:?}", learner.name(), verdict.status);
                if let Some(w) = &verdict.witness {
                    print!(" {w:?} (recheck {})", w.recheck(&registry, &trace, &text, params.settle)?);
                }
                println!();
            }
        }
    }
    Ok(())
}
