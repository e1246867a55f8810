//! Pairing, canonical finite sets and the length-lex order on sequences.

use txtfex::encodings::{finite_set_decode, finite_set_encode, pair, seq_compare, unpair, Sequence};

fn main() -> txtfex::Result<()> {
    for (x, y) in [(0, 0), (3, 4), (10, 0)] {
        let z = pair(x, y)?;
        println!("<{x},{y}> = {z}, unpairs to {:?}", unpair(z));
    }

    for n in [0, 5, 12, 255] {
        let d = finite_set_decode(n);
        println!("D_{n} = {:?} (index back: {})", d.to_vec(), finite_set_encode(&d)?);
    }

    let a = Sequence::from(vec![2, 0]);
    let b = Sequence::from(vec![0, 0, 1]);
    println!("{:?} vs {:?}: {:?}", a.items(), b.items(), seq_compare(&a, &b));
    println!("content of both: {:?}", a.concat(&b).content().to_vec());

    // overflow is reported, not wrapped
    println!("pair(u64::MAX, 1) -> {:?}", pair(u64::MAX, 1).map_err(|e| e.to_string()));
    Ok(())
}
