//! Random-receiver quantum communication with the quantum SWITCH.
//!
//! A sender distributes one qubit to `n` receivers over entanglement-breaking
//! `N_XY` channels; the receiver that must end up holding the message is chosen
//! only afterwards. This crate simulates the channels and protocols at the
//! density-matrix level and checks the claims that go with them:
//!
//! - [`qcore`]: dense operators, states, partial trace, measurement, fidelity.
//! - [`channels`]: Pauli channels, Choi matrices, PPT entanglement-breaking test.
//! - [`qswitch`]: the SWITCH of two channels, generic and in closed form for Pauli products.
//! - [`protocols`]: an LOCC runtime with locality enforcement, and the four protocols.
//! - [`nogo`]: the fixed-bit scan for controlled routing and the term-proportionality check.
//! - [`cli`]: reports behind the `rrqc` binary.

pub mod channels;
pub mod cli;
pub mod error;
pub mod nogo;
pub mod protocols;
pub mod qcore;
pub mod qswitch;
pub mod random;

pub use error::{Error, Result};
