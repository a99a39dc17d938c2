//! The same GHZ pipeline with both channel uses in a fixed order: the message
//! is fully dephased and fidelity drops to `|α|⁴ + |β|⁴`.
//!
//! ```bash
//! cargo run --example definite_order_baseline
//! ```

use rrqc::protocols::{run_definite_order_baseline, run_switch_protocol, MessageState, OutcomePolicy};
use rrqc::random::rng;

fn main() -> rrqc::Result<()> {
    let plus = MessageState::plus();
    println!("|+>: baseline {:.6}", run_definite_order_baseline(&plus, 2, 1)?.mean_fidelity());
    println!("|+>: switch   {:.6}", run_switch_protocol(&plus, 2, 1, OutcomePolicy::Exhaustive)?.mean_fidelity());

    let mut r = rng(7);
    let samples = 5000;
    let mut total = 0.0;
    for _ in 0..samples {
        total += run_definite_order_baseline(&MessageState::haar(&mut r), 2, 1)?.mean_fidelity();
    }
    println!("Haar mean over {samples}: {:.4} (expected 2/3)", total / samples as f64);
    Ok(())
}
