//! Grover-assisted proof-of-work mining on a dense state-vector simulator.
//!
//! The crate is layered bottom-up:
//!
//! * [`statevector`] holds `2^q` complex amplitudes and applies the gate set
//!   `{H, X, SWAP, MCX}`.
//! * [`circuit`] is the reversible gate IR plus the XOR / AND / NOT / rotate
//!   constructions used to express a hash function as a circuit.
//! * [`toyhash`] is a small parameterised sponge hash with a classical
//!   reference and an equivalent reversible circuit.
//! * [`miner`] runs the nonce-register Grover search: hash, threshold oracle,
//!   uncompute, diffusion.
//! * [`chain`] is a toy proof-of-work chain with a brute-force miner.
//! * [`estimate`] compares classical and quantum mining cost at full scale.
//!
//! Basis index `b` encodes qubit `k` as bit `k` of `b` throughout.

pub mod chain;
pub mod circuit;
pub mod error;
pub mod estimate;
pub mod miner;
pub mod statevector;
pub mod toyhash;

pub use circuit::{Circuit, Control, Gate, GateStats, Polarity};
pub use error::{Error, Result};
pub use statevector::{MeasurementOutcome, StateVector};
