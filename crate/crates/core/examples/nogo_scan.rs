//! Fixed-bit scan: for odd `n` every routing permutation leaves some receiver
//! with a message-independent state.
//!
//! ```bash
//! cargo run --example nogo_scan
//! ```

use rrqc::nogo::{fixed_bit_scan, routed_channel_state_scan, PermutationPair};
use rrqc::protocols::MessageState;
use rrqc::random::rng;

fn main() -> rrqc::Result<()> {
    for n in 2..=7 {
        let rep = fixed_bit_scan(n)?;
        println!(
            "n = {n}: {:>6} cells, {:>4} counterexamples, alternating even cycles: {}",
            rep.cells,
            rep.counterexamples.len(),
            rep.structure_holds()
        );
    }

    let tau = PermutationPair::cycle(3);
    let rep = routed_channel_state_scan(&tau, &MessageState::haar(&mut rng(1)))?;
    println!("\ntau = {:?}", tau.one_based());
    for b in &rep.branches {
        println!(
            "  b = {}  witness {:?}  message-independent receivers {:?}",
            b.witness.bit_string(),
            b.witness.index.map(|j| j + 1),
            b.message_independent.iter().map(|j| j + 1).collect::<Vec<_>>()
        );
    }
    println!("simulation agrees with witnesses: {}", rep.all_agree());
    Ok(())
}
