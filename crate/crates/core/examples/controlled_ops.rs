//! Definite-order controlled operations reach fidelity 1 as well, but only with
//! `n - 1` nonlocal CNOTs from a third party, which the transcript flags.
//!
//! ```bash
//! cargo run --example controlled_ops
//! ```

use rrqc::protocols::{run_controlled_ops_protocol, MessageState};
use rrqc::random::rng;

fn main() -> rrqc::Result<()> {
    let msg = MessageState::haar(&mut rng(9));
    for n in 1..=4 {
        let run = run_controlled_ops_protocol(&msg, n, n)?;
        let t = &run.branches[0].transcript;
        let ops: Vec<String> = t
            .nonlocal_operations()
            .map(|op| format!("{} on {:?} by {}", op.label(), op.factors(), op.actor()))
            .collect();
        println!("n = {n}: min fidelity {:.12}, nonlocal {:?}", run.min_fidelity(), ops);
    }
    Ok(())
}
