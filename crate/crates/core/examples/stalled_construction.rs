//! A learner that changes its mind on every input stalls the construction,
//! and an adversarial text for L_e makes it emit a new code at every step.

use std::collections::BTreeSet;

use txtfex::diagonalization::{adversarial_text, classify_case};
use txtfex::learners::{sample_learner, SampleKind};
use txtfex::universe::Registry;

fn main() -> txtfex::Result<()> {
    let registry = Registry::new();
    let id = sample_learner(SampleKind::FreshEachStep, &registry);
    let live = registry.construction(id, 1)?;
    live.advance_to(&registry, 200)?;
    live.with(|c| println!("rows defined {}, {:?}", c.defined_rows(), classify_case(c, 4)));

    let learner = registry.learner(id)?;
    let text = adversarial_text(&registry, learner.as_ref(), 1, 40)?;
    let outputs: BTreeSet<_> = (0..=text.len()).map(|n| learner.decide(&text.prefix(n))).collect();
    println!("text {:?}", text.items());
    println!("{} prefixes, {} distinct hypotheses", text.len() + 1, outputs.len());
    Ok(())
}
