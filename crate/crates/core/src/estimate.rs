//! Classical vs quantum mining cost at full scale.
//!
//! The classical miner needs `2^n` hashes; the quantum miner needs
//! `⌊π·√(2^n)/4⌋` Grover iterations. Wall-clock figures depend on the
//! assumed hash rate, gate time and gates per iteration, so all three are
//! carried in the result.

use std::f64::consts::PI;

use crate::error::{arg_err, Result};

/// Largest nonce width whose counts fit the `u128` fields exactly.
pub const MAX_ESTIMATE_BITS: u32 = 126;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assumptions {
    /// Classical hashes per second.
    pub hash_rate: f64,
    /// Seconds per quantum gate.
    pub gate_time: f64,
    pub gates_per_iteration: u64,
}

impl Default for Assumptions {
    /// 7·10⁶ hashes/s, 1 ns per gate, one gate per iteration.
    fn default() -> Self {
        Assumptions { hash_rate: 7.0e6, gate_time: 1.0e-9, gates_per_iteration: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResourceEstimate {
    pub nonce_bits: u32,
    pub classical_hashes: u128,
    pub classical_seconds: f64,
    pub classical_hours: f64,
    pub classical_days: f64,
    pub quantum_iterations: u128,
    pub quantum_gate_count: u128,
    /// `quantum_iterations × gates_per_iteration × gate_time`.
    pub quantum_seconds: f64,
    /// `quantum_iterations / hash_rate`: Grover iterations priced like
    /// classical hashes.
    pub quantum_seconds_at_hash_rate: f64,
    pub assumptions: Assumptions,
}

pub fn estimate_resources(nonce_bits: u32, assumptions: Assumptions) -> Result<ResourceEstimate> {
    if nonce_bits > MAX_ESTIMATE_BITS {
        return arg_err(format!("nonce width {nonce_bits} exceeds {MAX_ESTIMATE_BITS} bits"));
    }
    if !(assumptions.hash_rate > 0.0 && assumptions.hash_rate.is_finite()) {
        return arg_err("hash rate must be positive");
    }
    if !(assumptions.gate_time > 0.0 && assumptions.gate_time.is_finite()) {
        return arg_err("gate time must be positive");
    }
    if assumptions.gates_per_iteration == 0 {
        return arg_err("gates per iteration must be positive");
    }
    let classical_hashes = 1u128 << nonce_bits;
    let classical_seconds = classical_hashes as f64 / assumptions.hash_rate;
    // exact for even n, where √(2^n) is a power of two
    let quantum_iterations = (PI * 2f64.powf(nonce_bits as f64 / 2.0) / 4.0).floor() as u128;
    let quantum_gate_count = quantum_iterations * u128::from(assumptions.gates_per_iteration);
    Ok(ResourceEstimate {
        nonce_bits,
        classical_hashes,
        classical_seconds,
        classical_hours: classical_seconds / 3600.0,
        classical_days: classical_seconds / 86_400.0,
        quantum_iterations,
        quantum_gate_count,
        quantum_seconds: quantum_gate_count as f64 * assumptions.gate_time,
        quantum_seconds_at_hash_rate: quantum_iterations as f64 / assumptions.hash_rate,
        assumptions,
    })
}
