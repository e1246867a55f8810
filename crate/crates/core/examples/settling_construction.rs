//! A learner that never changes its mind lets every row settle, and the two
//! diagonal sets it is defeated on come apart at every marker.

use txtfex::diagonalization::{classify_case, r_prefix};
use txtfex::learners::{sample_learner, SampleKind};
use txtfex::universe::{Registry, Variant};

fn main() -> txtfex::Result<()> {
    let registry = Registry::new();
    let id = sample_learner(SampleKind::ConstantZero, &registry);
    let live = registry.construction(id, 0)?;
    live.advance_to(&registry, 300)?;

    live.with(|c| {
        println!("stage {}, {} rows defined, {:?}", c.stage(), c.defined_rows(), classify_case(c, 4));
        for row in c.digest(6) {
            println!("  row {:>2}: {:?} a={:?}", row.n, row.value.as_ref().map(|s| s.items().to_vec()), row.a_value);
        }
        let plain = r_prefix(c, 30, Variant::Plain);
        let hat = r_prefix(c, 30, Variant::Hat);
        println!("R_0  below 30: {:?}", plain.to_vec());
        println!("R^_0 below 30: {:?}", hat.to_vec());
        println!("differ on    : {:?}", plain.symmetric_difference(&hat).to_vec());
    });
    Ok(())
}
