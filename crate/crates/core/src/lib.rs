//! Simulation and analysis of the ping-pong quantum communication protocol.
//!
//! The crate is split along the protocol's layers:
//!
//! * [`quantum`] — small pure-state simulator (Bell basis, Pauli noise,
//!   computational measurement, Helstrom discrimination).
//! * [`info`] — binary entropy, the mutual-information formulas for the
//!   attacks, and the detection-probability security threshold.
//! * [`attacks`] — eavesdropper strategies acting on the travel qubit.
//! * [`pingpong`] — round state machine and seeded Monte Carlo sessions.
//! * [`gf2`] / [`qkd`] — binary linear codes, nested CSS pairs, coset keys
//!   and the noisy-channel key distribution protocol built on top of them.

pub mod attacks;
mod error;
pub mod gf2;
pub mod info;
pub mod pingpong;
pub mod qkd;
pub mod quantum;
pub mod rng;

pub use error::{Error, Result};
