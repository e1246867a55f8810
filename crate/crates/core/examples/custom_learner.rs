//! Running the construction against a closure learner with no structural
//! hints. Every extension in the stage window is searched, which is
//! exponential in the stage, so the horizon stays small and a low budget
//! leaves searches unresolved.

use std::sync::Arc;

use txtfex::diagonalization::{classify_case, Construction};
use txtfex::encodings::Sequence;
use txtfex::learners::FnLearner;
use txtfex::universe::{Hypothesis, Registry};

fn main() -> txtfex::Result<()> {
    for budget in [50, 500_000] {
        run(budget)?;
    }
    Ok(())
}

fn run(budget: u64) -> txtfex::Result<()> {
    let registry = Registry::with_search_budget(budget);
    let a = registry.register_set([0, 1].into_iter().collect());
    let b = registry.register_set([0, 2].into_iter().collect());
    // locks onto `b` once an item of 3 or more has been seen
    let learner = Arc::new(FnLearner::new("locks-at-3", move |s: &Sequence| match s.max_item() {
        Some(x) if x >= 3 => b,
        Some(_) => a,
        None => Hypothesis::EMPTY,
    }));
    let id = registry.register_learner(learner.clone());

    let mut c = Construction::new(id, learner, 0, registry.search_budget());
    c.advance_to(11, &registry)?;
    println!("budget {budget}: rows {}, unresolved searches {}, {:?}", c.defined_rows(), c.unresolved_searches(), classify_case(&c, 3));
    for row in c.digest(6) {
        println!("  row {}: {:?} a={:?}", row.n, row.value.map(|s| s.items().to_vec()), row.a_value);
    }
    Ok(())
}
