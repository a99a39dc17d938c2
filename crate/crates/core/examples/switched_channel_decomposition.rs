//! Closed-form decomposition of switched Pauli channels, checked against the
//! Kraus-level SWITCH.
//!
//! ```bash
//! cargo run --example switched_channel_decomposition
//! ```

use rrqc::channels::PauliChannel;
use rrqc::qswitch::{closed_form_deviation, closed_form_nxy_n, closed_form_two_party, SwitchedChannel};
use rrqc::random::rng;

fn show(label: &str, sw: &SwitchedChannel) {
    println!("{label}");
    println!("  p+ = {:.6}", sw.p_plus);
    for (s, w) in sw.c_plus.terms() {
        println!("    C+ {s}: {w:.6}");
    }
    println!("  p- = {:.6}", sw.p_minus);
    for (s, w) in sw.c_minus.terms() {
        println!("    C- {s}: {w:.6}");
    }
}

fn main() -> rrqc::Result<()> {
    for n in 1..=3 {
        let sw = closed_form_nxy_n(n)?;
        show(&format!("SWITCH(N_XY^{n}, N_XY^{n})"), &sw);
        let chans = vec![PauliChannel::nxy(); n];
        println!("  Choi deviation from Kraus construction: {:.2e}", closed_form_deviation(&sw, &chans, &chans)?);
    }

    let mut r = rng(3);
    let (e1, e2) = (PauliChannel::random(&mut r), PauliChannel::random(&mut r));
    let sw = closed_form_two_party(&e1, &e2)?;
    show(&format!("random two-party channel {:?} x {:?}", e1.weights(), e2.weights()), &sw);
    println!("  Choi deviation: {:.2e}", closed_form_deviation(&sw, &[e1, e2], &[e1, e2])?);
    Ok(())
}
