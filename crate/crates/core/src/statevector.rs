//! Dense state-vector simulation core.
//!
//! A [`StateVector`] owns `2^q` complex amplitudes. Qubit `k` is bit `k` of
//! the basis index (qubit 0 is the least significant bit). Gate kernels walk
//! the amplitude array in blocks of `2 * stride` and fan out over rayon once
//! the state is large enough; each gate is still observed as one sequential
//! step.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::circuit::{Circuit, Gate, GateStats, Polarity};
use crate::error::{arg_err, Error, Result};

/// Default qubit cap: 2^26 amplitudes, about 1 GiB.
pub const DEFAULT_QUBIT_CAP: usize = 26;
/// Hard ceiling for a configured cap.
pub const MAX_QUBIT_CAP: usize = 28;

const PARALLEL_THRESHOLD: usize = 1 << 14;
const GROUP_SIZE: usize = 1 << 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
    stats: GateStats,
}

/// A sampled register readout. `bits[i]` is the value of `register[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome {
    pub bits: Vec<bool>,
    /// Born-rule probability of this register value at sampling time.
    pub probability: f64,
}

impl MeasurementOutcome {
    /// The readout as an integer, `bits[i]` mapped to bit `i`.
    pub fn value(&self) -> u64 {
        self.bits.iter().enumerate().fold(0, |acc, (i, &b)| acc | (u64::from(b) << i))
    }
}

impl StateVector {
    /// `|0…0⟩` on `num_qubits` qubits under the default cap.
    pub fn new_zero(num_qubits: usize) -> Result<Self> {
        Self::new_zero_with_cap(num_qubits, DEFAULT_QUBIT_CAP)
    }

    pub fn new_zero_with_cap(num_qubits: usize, cap: usize) -> Result<Self> {
        if cap > MAX_QUBIT_CAP {
            return Err(Error::Capacity { requested: cap, cap: MAX_QUBIT_CAP });
        }
        if num_qubits == 0 {
            return arg_err("a state vector needs at least one qubit");
        }
        if num_qubits > cap {
            return Err(Error::Capacity { requested: num_qubits, cap });
        }
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        amplitudes[0] = ONE;
        Ok(StateVector { num_qubits, amplitudes, stats: GateStats::default() })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let mut state = Self::new_zero(num_qubits)?;
        if index >= state.amplitudes.len() {
            return arg_err(format!("basis index {index} out of range for {num_qubits} qubits"));
        }
        state.amplitudes[0] = ZERO;
        state.amplitudes[index] = ONE;
        Ok(state)
    }

    /// Wraps raw amplitudes. The length must be a power of two; no
    /// normalisation is applied.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return arg_err(format!("amplitude count {len} is not a power of two >= 2"));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBIT_CAP {
            return Err(Error::Capacity { requested: num_qubits, cap: MAX_QUBIT_CAP });
        }
        Ok(StateVector { num_qubits, amplitudes, stats: GateStats::default() })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Gates applied to this state so far, by kind.
    pub fn stats(&self) -> GateStats {
        self.stats
    }

    /// Returns to `|0…0⟩`, keeping the gate statistics.
    pub fn reset(&mut self) {
        self.amplitudes.fill(ZERO);
        self.amplitudes[0] = ONE;
    }

    pub fn reset_stats(&mut self) {
        self.stats = GateStats::default();
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        match gate {
            Gate::H(q) => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                for_each_block(&mut self.amplitudes, 1 << q, |_, lo, hi| {
                    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                        let (x, y) = (*a, *b);
                        *a = (x + y) * s;
                        *b = (x - y) * s;
                    }
                });
            }
            Gate::X(q) => {
                for_each_block(&mut self.amplitudes, 1 << q, |_, lo, hi| lo.swap_with_slice(hi));
            }
            Gate::Swap(p, q) => {
                let (low, high) = if p < q { (*p, *q) } else { (*q, *p) };
                let low_bit = 1usize << low;
                // lo half has the high bit clear; swap |high=0,low=1⟩ with |high=1,low=0⟩
                for_each_block(&mut self.amplitudes, 1 << high, |_, lo, hi| {
                    for j in (0..lo.len()).filter(|j| j & low_bit != 0) {
                        std::mem::swap(&mut lo[j], &mut hi[j ^ low_bit]);
                    }
                });
            }
            Gate::Mcx { controls, target } => {
                let mut mask = 0usize;
                let mut want = 0usize;
                for c in controls {
                    mask |= 1 << c.qubit;
                    if c.polarity == Polarity::Positive {
                        want |= 1 << c.qubit;
                    }
                }
                for_each_block(&mut self.amplitudes, 1 << target, |base, lo, hi| {
                    for (j, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                        if (base + j) & mask == want {
                            std::mem::swap(a, b);
                        }
                    }
                });
            }
        }
        self.stats.record(gate);
        Ok(())
    }

    /// Applies every gate of `circuit` in order.
    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.num_qubits() > self.num_qubits {
            return arg_err(format!(
                "circuit '{}' spans {} qubits but the state has {}",
                circuit.label(),
                circuit.num_qubits(),
                self.num_qubits
            ));
        }
        for gate in circuit.gates() {
            self.apply_gate(gate)?;
        }
        Ok(())
    }

    /// Total probability of the basis states consistent with a partial
    /// assignment `(qubit, value)`.
    pub fn probability_of(&self, assignment: &[(usize, bool)]) -> Result<f64> {
        let Some((mask, want)) = self.assignment_mask(assignment)? else {
            return Ok(0.0);
        };
        Ok(self.amplitudes.iter().enumerate().filter(|(i, _)| i & mask == want).map(|(_, a)| a.norm_sqr()).sum())
    }

    /// Probability that `register` reads `value` (bit `i` of `value` is
    /// `register[i]`).
    pub fn probability_of_value(&self, register: &[usize], value: u64) -> Result<f64> {
        let assignment: Vec<(usize, bool)> =
            register.iter().enumerate().map(|(i, &q)| (q, (value >> i) & 1 == 1)).collect();
        self.probability_of(&assignment)
    }

    /// Marginal distribution over all `2^len` values of `register`.
    pub fn register_distribution(&self, register: &[usize]) -> Result<Vec<f64>> {
        self.check_register(register)?;
        if register.len() > 24 {
            return arg_err("register too wide for a dense marginal distribution");
        }
        let mut dist = vec![0.0; 1 << register.len()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            dist[extract(i, register)] += a.norm_sqr();
        }
        Ok(dist)
    }

    /// Samples `register` with the Born rule. The state is left untouched.
    pub fn measure_register<R: Rng + ?Sized>(&self, register: &[usize], rng: &mut R) -> Result<MeasurementOutcome> {
        if register.is_empty() {
            return arg_err("cannot measure an empty register");
        }
        self.check_register(register)?;
        let total = self.norm_sqr();
        let threshold = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = None;
        let mut last_nonzero = 0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 {
                last_nonzero = i;
            }
            acc += p;
            if acc > threshold {
                chosen = Some(i);
                break;
            }
        }
        // rounding can leave acc a hair under threshold
        let index = chosen.unwrap_or(last_nonzero);
        let bits: Vec<bool> = register.iter().map(|&q| (index >> q) & 1 == 1).collect();
        let assignment: Vec<(usize, bool)> = register.iter().copied().zip(bits.iter().copied()).collect();
        let probability = self.probability_of(&assignment)?;
        Ok(MeasurementOutcome { bits, probability })
    }

    fn check_register(&self, register: &[usize]) -> Result<()> {
        for (i, &q) in register.iter().enumerate() {
            if q >= self.num_qubits {
                return Err(Error::QubitIndex { index: q, num_qubits: self.num_qubits });
            }
            if register[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    /// `None` when the assignment contradicts itself.
    fn assignment_mask(&self, assignment: &[(usize, bool)]) -> Result<Option<(usize, usize)>> {
        let mut mask = 0usize;
        let mut want = 0usize;
        for &(q, v) in assignment {
            if q >= self.num_qubits {
                return Err(Error::QubitIndex { index: q, num_qubits: self.num_qubits });
            }
            let bit = 1 << q;
            if mask & bit != 0 {
                if (want & bit != 0) != v {
                    return Ok(None);
                }
                continue;
            }
            mask |= bit;
            if v {
                want |= bit;
            }
        }
        Ok(Some((mask, want)))
    }
}

fn extract(index: usize, register: &[usize]) -> usize {
    register.iter().enumerate().fold(0, |acc, (i, &q)| acc | (((index >> q) & 1) << i))
}

/// Calls `f(base, lo, hi)` for every block of `2 * stride` amplitudes, where
/// `lo` holds the indices with the stride bit clear and `hi` those with it set;
/// `base` is the index of `lo[0]`.
fn for_each_block<F>(amps: &mut [Complex64], stride: usize, f: F)
where
    F: Fn(usize, &mut [Complex64], &mut [Complex64]) + Sync,
{
    let block = 2 * stride;
    let group = block.max(GROUP_SIZE);
    let run = |(gi, chunk): (usize, &mut [Complex64])| {
        for (bi, blk) in chunk.chunks_mut(block).enumerate() {
            let (lo, hi) = blk.split_at_mut(stride);
            f(gi * group + bi * block, lo, hi);
        }
    };
    if amps.len() >= PARALLEL_THRESHOLD {
        amps.par_chunks_mut(group).enumerate().for_each(run);
    } else {
        amps.chunks_mut(group).enumerate().for_each(run);
    }
}
