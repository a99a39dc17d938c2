//! GHZ-encode a message, deliver it noiselessly and let receiver `x` retrieve it.
//!
//! ```bash
//! cargo run --example noiseless_ghz
//! ```

use rrqc::protocols::{ghz_encode, run_noiseless_protocol, MessageState, OutcomePolicy};
use rrqc::qcore::c;

fn main() -> rrqc::Result<()> {
    let msg = MessageState::new(c(0.6, 0.0), c(0.0, 0.8))?;
    let ghz = ghz_encode(&msg, 3)?;
    for (i, a) in ghz.amplitudes().iter().enumerate().filter(|(_, a)| a.norm() > 0.0) {
        println!("|{i:03b}>: {a}");
    }

    for x in 1..=3 {
        let run = run_noiseless_protocol(&msg, 3, x, OutcomePolicy::Exhaustive)?;
        println!("x = {x}: {} branches, min fidelity {:.12}", run.branches.len(), run.min_fidelity());
        for b in &run.branches {
            let outcomes: Vec<usize> = b.outcome_branch.iter().map(|o| o.outcome).collect();
            println!("    outcomes {outcomes:?}  p = {:.3}  F = {:.12}", b.probability, b.fidelity);
        }
    }
    Ok(())
}
