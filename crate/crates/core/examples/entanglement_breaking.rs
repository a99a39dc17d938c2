//! PPT certification of entanglement breaking for single-qubit Pauli channels.
//!
//! ```bash
//! cargo run --example entanglement_breaking
//! ```

use rrqc::channels::{choi, compose, is_entanglement_breaking_qubit, PauliChannel};

fn main() -> rrqc::Result<()> {
    let channels = [
        ("identity", PauliChannel::identity()),
        ("N_XY", PauliChannel::nxy()),
        ("N_XY . N_XY", compose(&PauliChannel::nxy(), &PauliChannel::nxy())),
        ("dephasing", PauliChannel::dephasing()),
        ("uniform", PauliChannel::uniform()),
        ("weak dephasing", PauliChannel::new([0.9, 0.0, 0.0, 0.1])?),
    ];
    for (name, ch) in channels {
        let v = is_entanglement_breaking_qubit(&choi(&ch.kraus())?)?;
        println!(
            "{name:<15} {:?}  EB = {:<5}  min PT eigenvalue {:+.4}",
            ch.weights(),
            v.entanglement_breaking,
            v.min_pt_eigenvalue
        );
    }
    Ok(())
}
