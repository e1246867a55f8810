//! The diagonal sets computed two ways: from the construction's markers and
//! from the registered enumerator that only sees finite stages.

use txtfex::diagonalization::{family_member, r_prefix};
use txtfex::encodings::finite_set_decode;
use txtfex::learners::{sample_learner, SampleKind};
use txtfex::universe::{Registry, Variant};

fn main() -> txtfex::Result<()> {
    let registry = Registry::new();
    let id = sample_learner(SampleKind::LengthParity, &registry);
    let bound = 40;

    for variant in [Variant::Plain, Variant::Hat] {
        let code = registry.register_diagonal(id, 0, variant)?;
        let enumerated = registry.enumerate_to(code, 400)?.below(bound);
        let live = registry.construction(id, 0)?;
        let from_markers = live.with(|c| r_prefix(c, bound, variant));
        println!("{variant:?} ({code}): {:?}", enumerated.to_vec());
        println!("  agrees with markers: {}", enumerated == from_markers);
    }

    for n in 0..4 {
        let member = family_member(&registry, id, 0, n, Variant::Plain)?;
        println!("D_{n} = {:?}: {:?}", finite_set_decode(n).to_vec(), member.stage(400)?.below(12).to_vec());
    }
    Ok(())
}
