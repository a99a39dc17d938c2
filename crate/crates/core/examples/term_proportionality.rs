//! A composite channel acts as the identity exactly when every Kraus product
//! is a multiple of the identity.
//!
//! ```bash
//! cargo run --example term_proportionality
//! ```

use rrqc::channels::PauliChannel;
use rrqc::nogo::check_term_proportionality;
use rrqc::qcore::Operator;
use rrqc::random::{random_unitary, rng};

fn main() -> rrqc::Result<()> {
    let id = vec![Operator::identity(&[2])];
    let x = vec![Operator::pauli_x()];
    let u = random_unitary(&mut rng(5), &[2]);

    let cases = [
        ("identity", check_term_proportionality(&id, &id, &id)?),
        ("dephasing", check_term_proportionality(&id, &PauliChannel::dephasing().kraus(), &id)?),
        ("X alone", check_term_proportionality(&id, &x, &id)?),
        ("X undone by X", check_term_proportionality(&x, &x, &id)?),
        ("U undone by U^dagger", check_term_proportionality(&[u.dagger()], &[u], &id)?),
    ];
    for (name, rep) in cases {
        println!("{name:<22} pass = {:<5} sum |lambda|^2 = {:.6}  max residual {:.3e}", rep.pass, rep.weight, rep.max_residual());
    }
    Ok(())
}
