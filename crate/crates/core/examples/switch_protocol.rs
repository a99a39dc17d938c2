//! Perfect random-receiver communication through two uses of an
//! entanglement-breaking channel placed in a superposition of orders.
//!
//! ```bash
//! cargo run --example switch_protocol
//! ```

use rrqc::protocols::{run_switch_protocol, Event, MessageState, OutcomePolicy, Party};
use rrqc::random::rng;

fn main() -> rrqc::Result<()> {
    let msg = MessageState::haar(&mut rng(42));
    println!("message alpha = {:.4}, beta = {:.4}", msg.alpha(), msg.beta());

    for n in 2..=4 {
        for x in 1..=n {
            let run = run_switch_protocol(&msg, n, x, OutcomePolicy::Exhaustive)?;
            println!("n = {n} x = {x}: {:>2} branches, min fidelity {:.12}", run.branches.len(), run.min_fidelity());
        }
    }

    // n = 5 with one sampled branch
    let run = run_switch_protocol(&msg, 5, 3, OutcomePolicy::Sample(7))?;
    println!("n = 5 x = 3 (sampled): fidelity {:.12}", run.branches[0].fidelity);

    let run = run_switch_protocol(&msg, 3, 2, OutcomePolicy::Exhaustive)?;
    let t = &run.branches[0].transcript;
    println!("\ntranscript of one branch (n = 3, x = 2):");
    for e in t.events() {
        match e {
            Event::Transmission(tr) => println!("  transmit via {}", tr.channel),
            Event::LocalMeasurement(m) => println!("  {} measures factor {} in {:?} basis -> {}", m.party(), m.factor(), m.basis(), m.outcome()),
            Event::ClassicalMessage(m) => println!("  {} -> {:?}: bits {:?}", m.from, m.to.iter().map(|p| p.to_string()).collect::<Vec<_>>(), m.bits),
            Event::LocalUnitary(u) => println!("  {} applies a local unitary on {:?}", u.party(), u.factors()),
            Event::NonlocalOperation(op) => println!("  nonlocal {} by {}", op.label(), op.actor()),
        }
    }
    println!("control-holder bits: {}", t.bits_sent_by(Party::ControlHolder));
    Ok(())
}
