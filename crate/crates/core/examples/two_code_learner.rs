//! The learner that guesses from the least item and the number of items
//! below it identifies members of the family with at most two codes.

use txtfex::criteria::{canonical_text, check_txtfex, run_learner, Allowance, CheckParams};
use txtfex::diagonalization::family_member;
use txtfex::encodings::Sequence;
use txtfex::learners::{guess_features, sample_learner, Learner, PaperLearner, SampleKind};
use txtfex::universe::{Registry, Variant};

fn main() -> txtfex::Result<()> {
    let registry = Registry::new();
    let adversary = sample_learner(SampleKind::LengthParity, &registry);
    let m = PaperLearner::new(adversary);

    for items in [vec![], vec![3, 1, 4], vec![2, 5, 2, 0, 0]] {
        let sigma = Sequence::from(items);
        println!("{:?}: {:?} -> {}", sigma.items(), guess_features(&sigma), m.decide(&sigma));
    }

    let horizon = 400;
    for (n, variant) in [(0, Variant::Plain), (6, Variant::Hat)] {
        let code = registry.register(family_member(&registry, adversary, 0, n, variant)?);
        let text = canonical_text(&registry, code, horizon)?;
        let trace = run_learner(&m, &text, horizon as u64);
        let params = CheckParams::new(Allowance::Star, Allowance::Finite(2), horizon as u64);
        let verdict = check_txtfex(&registry, &trace, &text, &params)?;
        println!("member n={n} {variant:?}: {:?}, codes after settling {:?}", verdict.status, verdict.hypotheses);
    }
    Ok(())
}
