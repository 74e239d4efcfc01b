//! Nonce-register Grover search for proof-of-work.
//!
//! One iteration computes the hash of every nonce branch into the hash
//! register, flips the phase of branches whose digest has `z` leading zeros
//! (functional qubit held in `|−⟩`), uncomputes the hash so the hash and
//! service registers return to `|0…0⟩`, and only then reflects the nonce
//! register about its uniform superposition. Without the uncompute the
//! nonce register stays entangled with the hash and the diffusion step no
//! longer amplifies the marked nonces.

use std::f64::consts::FRAC_PI_4;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Control, Gate, GateStats};
use crate::error::{arg_err, Error, Result};
use crate::statevector::{StateVector, DEFAULT_QUBIT_CAP};
use crate::toyhash::{self, Digest, HashParams};

/// Budget growth ratio for the unknown-solution-count schedule.
pub const SCHEDULE_RATIO: f64 = 6.0 / 5.0;

/// Qubit partition: nonce `0..n`, hash `n..n+m`, then service, then the
/// functional qubit last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    nonce: Vec<usize>,
    hash: Vec<usize>,
    service: Vec<usize>,
    functional: usize,
}

impl RegisterLayout {
    pub fn new(nonce_bits: usize, hash_bits: usize, service_bits: usize) -> Result<Self> {
        if nonce_bits == 0 || hash_bits == 0 {
            return arg_err("nonce and hash registers need at least one qubit each");
        }
        let hash_start = nonce_bits;
        let service_start = hash_start + hash_bits;
        let functional = service_start + service_bits;
        Ok(RegisterLayout {
            nonce: (0..hash_start).collect(),
            hash: (hash_start..service_start).collect(),
            service: (service_start..functional).collect(),
            functional,
        })
    }

    pub fn nonce(&self) -> &[usize] {
        &self.nonce
    }

    pub fn hash(&self) -> &[usize] {
        &self.hash
    }

    pub fn service(&self) -> &[usize] {
        &self.service
    }

    pub fn functional(&self) -> usize {
        self.functional
    }

    pub fn nonce_bits(&self) -> u32 {
        self.nonce.len() as u32
    }

    pub fn total_qubits(&self) -> usize {
        self.functional + 1
    }

    /// Hash and service qubits, i.e. everything that must be back at `|0⟩`
    /// before diffusion.
    pub fn scratch(&self) -> Vec<usize> {
        self.hash.iter().chain(&self.service).copied().collect()
    }
}

/// How the nonce register is read out at the end of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Readout {
    /// Born-rule sample with the run's seed.
    #[default]
    Sampled,
    /// Most probable nonce, smallest on ties.
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiningParams {
    pub difficulty_zeros: u32,
    pub hash_params: HashParams,
    /// Multiplier on `⌈π/4·√2^n⌉` bounding the cumulative iterations of the
    /// unknown-count schedule.
    pub max_grover_rounds: u64,
    pub solution_count_hint: Option<u64>,
    pub rng_seed: u64,
    pub readout: Readout,
    pub qubit_cap: usize,
}

impl MiningParams {
    pub fn new(difficulty_zeros: u32, hash_params: HashParams) -> Result<Self> {
        let params = MiningParams {
            difficulty_zeros,
            hash_params,
            max_grover_rounds: 4,
            solution_count_hint: None,
            rng_seed: 0,
            readout: Readout::Sampled,
            qubit_cap: DEFAULT_QUBIT_CAP,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.difficulty_zeros > self.hash_params.width() {
            return arg_err(format!(
                "difficulty {} exceeds hash width {}",
                self.difficulty_zeros,
                self.hash_params.width()
            ));
        }
        if self.max_grover_rounds == 0 {
            return arg_err("max_grover_rounds must be at least 1");
        }
        if self.solution_count_hint == Some(0) {
            return arg_err("solution count hint must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiningResult {
    pub nonce: u64,
    pub digest: Digest,
    pub success: bool,
    pub grover_iterations_used: u64,
    /// Probability that the final readout lands on a valid nonce.
    pub success_probability_at_measurement: f64,
    pub total_gates: u64,
    pub gate_stats: GateStats,
    /// Classical hash evaluations: all tried nonces for the brute-force
    /// miner, one verification per readout for the quantum miner.
    pub hashes_tried: u64,
}

/// H on every nonce qubit; X then H on the functional qubit.
pub fn prepare(state: &mut StateVector, layout: &RegisterLayout) -> Result<()> {
    for &q in layout.nonce() {
        state.apply_gate(&Gate::H(q))?;
    }
    state.apply_gate(&Gate::X(layout.functional()))?;
    state.apply_gate(&Gate::H(layout.functional()))
}

/// Single MCX onto the functional qubit, negatively controlled on the top
/// `zeros` hash qubits. With `zeros = 0` it is an unconditional X.
pub fn build_oracle(layout: &RegisterLayout, zeros: u32) -> Result<Circuit> {
    let hash = layout.hash();
    let zeros = zeros as usize;
    if zeros > hash.len() {
        return arg_err(format!("difficulty {zeros} exceeds hash width {}", hash.len()));
    }
    let mut circuit = Circuit::new(layout.total_qubits(), "oracle");
    if zeros == 0 {
        circuit.push(Gate::X(layout.functional()))?;
    } else {
        let controls = hash.iter().rev().take(zeros).map(|&q| Control::negative(q)).collect();
        circuit.push(Gate::mcx(controls, layout.functional()))?;
    }
    Ok(circuit)
}

/// `2|s⟩⟨s| − I` on the nonce register, up to global phase.
pub fn build_diffusion(layout: &RegisterLayout) -> Result<Circuit> {
    let nonce = layout.nonce();
    let Some((&last, rest)) = nonce.split_last() else {
        return arg_err("diffusion needs a non-empty nonce register");
    };
    let mut circuit = Circuit::new(layout.total_qubits(), "diffusion");
    for &q in nonce {
        circuit.push(Gate::H(q))?;
    }
    for &q in nonce {
        circuit.push(Gate::X(q))?;
    }
    // multi-controlled Z on |1…1⟩ as H·MCX·H on the last qubit
    circuit.push(Gate::H(last))?;
    if rest.is_empty() {
        circuit.push(Gate::X(last))?;
    } else {
        circuit.push(Gate::mcx(rest.iter().map(|&q| Control::positive(q)).collect(), last))?;
    }
    circuit.push(Gate::H(last))?;
    for &q in nonce {
        circuit.push(Gate::X(q))?;
    }
    for &q in nonce {
        circuit.push(Gate::H(q))?;
    }
    Ok(circuit)
}

/// One compute / mark / uncompute / diffuse step, with the inverse hash
/// circuit built once.
#[derive(Debug, Clone)]
pub struct GroverIteration {
    hash: Circuit,
    unhash: Circuit,
    oracle: Circuit,
    diffusion: Circuit,
}

impl GroverIteration {
    pub fn new(hash: Circuit, oracle: Circuit, diffusion: Circuit) -> Self {
        let unhash = hash.invert();
        GroverIteration { hash, unhash, oracle, diffusion }
    }

    pub fn hash_circuit(&self) -> &Circuit {
        &self.hash
    }

    pub fn oracle(&self) -> &Circuit {
        &self.oracle
    }

    pub fn diffusion(&self) -> &Circuit {
        &self.diffusion
    }

    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        state.apply_circuit(&self.hash)?;
        state.apply_circuit(&self.oracle)?;
        state.apply_circuit(&self.unhash)?;
        state.apply_circuit(&self.diffusion)
    }

    /// Gates executed by one call to [`GroverIteration::apply`].
    pub fn gates_per_iteration(&self) -> u64 {
        (self.hash.len() + self.oracle.len() + self.unhash.len() + self.diffusion.len()) as u64
    }
}

/// Applies hash, oracle, inverse hash and diffusion in that order.
pub fn grover_iteration(
    state: &mut StateVector,
    hash_circuit: &Circuit,
    oracle: &Circuit,
    diffusion: &Circuit,
) -> Result<()> {
    state.apply_circuit(hash_circuit)?;
    state.apply_circuit(oracle)?;
    state.apply_circuit(&hash_circuit.invert())?;
    state.apply_circuit(diffusion)
}

fn search_space(nonce_bits: u32) -> Result<f64> {
    if nonce_bits > 127 {
        return arg_err(format!("{nonce_bits} nonce bits is beyond the supported range"));
    }
    Ok(2f64.powi(nonce_bits as i32))
}

fn check_solution_count(nonce_bits: u32, solutions: u64) -> Result<f64> {
    let space = search_space(nonce_bits)?;
    if solutions == 0 {
        return arg_err("solution count must be at least 1");
    }
    if nonce_bits < 64 && solutions > 1u64 << nonce_bits {
        return arg_err(format!("{solutions} solutions exceed the 2^{nonce_bits} nonce space"));
    }
    Ok(space)
}

/// `⌊π/4 · √(2^n / M)⌋`, at least 1 unless every nonce is a solution (then 0).
pub fn iteration_count(nonce_bits: u32, solutions: u64) -> Result<u64> {
    let space = check_solution_count(nonce_bits, solutions)?;
    if solutions as f64 == space {
        return Ok(0);
    }
    let k = (FRAC_PI_4 * (space / solutions as f64).sqrt()).floor() as u64;
    Ok(k.max(1))
}

/// `sin²((2k+1)·θ)` with `θ = arcsin(√(M/2^n))`.
pub fn analytic_success_probability(nonce_bits: u32, solutions: u64, iterations: u64) -> Result<f64> {
    let space = check_solution_count(nonce_bits, solutions)?;
    let theta = (solutions as f64 / space).sqrt().asin();
    Ok(((2 * iterations + 1) as f64 * theta).sin().powi(2))
}

/// Iteration cap for the unknown-count schedule: `rounds · ⌈π/4·√2^n⌉`.
pub fn schedule_limit(nonce_bits: u32, max_grover_rounds: u64) -> Result<u64> {
    let single = (FRAC_PI_4 * search_space(nonce_bits)?.sqrt()).ceil() as u64;
    Ok(max_grover_rounds.saturating_mul(single))
}

/// Iteration budgets `⌈(6/5)^t⌉`, t = 0, 1, …, truncated so the cumulative
/// total stays within `limit`.
pub fn schedule_budgets(limit: u64) -> Vec<u64> {
    let mut budgets = Vec::new();
    let mut total = 0u64;
    for t in 0.. {
        let budget = SCHEDULE_RATIO.powi(t).ceil() as u64;
        if total + budget > limit {
            break;
        }
        total += budget;
        budgets.push(budget);
    }
    budgets
}

/// Probability that the nonce register currently reads a nonce whose digest
/// meets `zeros`, measured by hashing into the hash register and uncomputing.
fn readout_success_probability(
    state: &mut StateVector,
    layout: &RegisterLayout,
    grover: &GroverIteration,
    zeros: u32,
) -> Result<f64> {
    state.apply_circuit(&grover.hash)?;
    let top: Vec<(usize, bool)> = layout.hash().iter().rev().take(zeros as usize).map(|&q| (q, false)).collect();
    let p = state.probability_of(&top)?;
    state.apply_circuit(&grover.unhash)?;
    Ok(p)
}

fn read_nonce(state: &StateVector, layout: &RegisterLayout, readout: Readout, rng: &mut ChaCha8Rng) -> Result<u64> {
    match readout {
        Readout::Sampled => Ok(state.measure_register(layout.nonce(), rng)?.value()),
        Readout::Exact => {
            let dist = state.register_distribution(layout.nonce())?;
            let mut best = 0;
            for (v, &p) in dist.iter().enumerate() {
                if p > dist[best] {
                    best = v;
                }
            }
            Ok(best as u64)
        }
    }
}

/// Builds the hash, oracle and diffusion circuits for one header.
pub fn build_grover_iteration(
    header_blocks: &[u32],
    layout: &RegisterLayout,
    params: &MiningParams,
) -> Result<GroverIteration> {
    params.validate()?;
    let hash = toyhash::build_hash_circuit(layout, header_blocks, &params.hash_params)?;
    let oracle = build_oracle(layout, params.difficulty_zeros)?;
    let diffusion = build_diffusion(layout)?;
    Ok(GroverIteration::new(hash, oracle, diffusion))
}

/// Runs the full quantum mining procedure and verifies the readout with the
/// classical hash.
///
/// With a solution-count hint `M` it runs exactly `iteration_count(n, M)`
/// iterations and reads out once. Otherwise it re-prepares the state for
/// rounds of `⌈(6/5)^t⌉` iterations, reading out and verifying after each,
/// until a valid nonce appears or the cumulative budget is spent.
pub fn mine_quantum(header_blocks: &[u32], layout: &RegisterLayout, params: &MiningParams) -> Result<MiningResult> {
    let grover = build_grover_iteration(header_blocks, layout, params)?;
    let n = layout.nonce_bits();
    let mut state = StateVector::new_zero_with_cap(layout.total_qubits(), params.qubit_cap)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);

    let budgets = match params.solution_count_hint {
        Some(m) => vec![iteration_count(n, m)?],
        None => schedule_budgets(schedule_limit(n, params.max_grover_rounds)?),
    };

    let mut used = 0u64;
    let mut hashes = 0u64;
    let mut last = None;
    for budget in budgets {
        state.reset();
        prepare(&mut state, layout)?;
        for _ in 0..budget {
            grover.apply(&mut state)?;
        }
        used += budget;
        let p_success = readout_success_probability(&mut state, layout, &grover, params.difficulty_zeros)?;
        let nonce = read_nonce(&state, layout, params.readout, &mut rng)?;
        let digest = toyhash::hash_with_nonce(header_blocks, nonce, &params.hash_params)?;
        hashes += 1;
        let success = digest.meets_difficulty(params.difficulty_zeros);
        last = Some((nonce, digest, success, p_success));
        if success {
            break;
        }
    }
    let stats = state.stats();
    let (nonce, digest, success, p_success) =
        last.ok_or_else(|| Error::Argument("iteration budget admits no mining round".into()))?;
    Ok(MiningResult {
        nonce,
        digest,
        success,
        grover_iterations_used: used,
        success_probability_at_measurement: p_success,
        total_gates: stats.total(),
        gate_stats: stats,
        hashes_tried: hashes,
    })
}

/// Simulated probability of reading a nonce from `solutions` after each of
/// `0..=max_iterations` Grover iterations.
pub fn success_curve(
    header_blocks: &[u32],
    layout: &RegisterLayout,
    params: &MiningParams,
    solutions: &[u64],
    max_iterations: u64,
) -> Result<Vec<f64>> {
    let grover = build_grover_iteration(header_blocks, layout, params)?;
    let mut state = StateVector::new_zero_with_cap(layout.total_qubits(), params.qubit_cap)?;
    prepare(&mut state, layout)?;
    let mut curve = Vec::with_capacity(max_iterations as usize + 1);
    for k in 0..=max_iterations {
        if k > 0 {
            grover.apply(&mut state)?;
        }
        curve.push(nonce_set_probability(&state, layout, solutions)?);
    }
    Ok(curve)
}

/// Total probability of the nonce register reading any value in `nonces`.
pub fn nonce_set_probability(state: &StateVector, layout: &RegisterLayout, nonces: &[u64]) -> Result<f64> {
    nonces.iter().map(|&v| state.probability_of_value(layout.nonce(), v)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn uniform_prepared(layout: &RegisterLayout) -> StateVector {
        let mut s = StateVector::new_zero(layout.total_qubits()).unwrap();
        prepare(&mut s, layout).unwrap();
        s
    }

    #[test]
    fn layout_order() {
        let l = RegisterLayout::new(3, 4, 2).unwrap();
        assert_eq!(l.nonce(), &[0, 1, 2]);
        assert_eq!(l.hash(), &[3, 4, 5, 6]);
        assert_eq!(l.service(), &[7, 8]);
        assert_eq!(l.functional(), 9);
        assert_eq!(l.total_qubits(), 10);
        assert!(RegisterLayout::new(0, 4, 0).is_err());
    }

    #[test]
    fn prepare_distributions() {
        let l = RegisterLayout::new(2, 4, 0).unwrap();
        let s = uniform_prepared(&l);
        for v in 0..4 {
            assert!((s.probability_of_value(l.nonce(), v).unwrap() - 0.25).abs() < 1e-12);
        }
        assert!((s.probability_of(&[(l.functional(), false)]).unwrap() - 0.5).abs() < 1e-12);
        assert!((s.probability_of(&[(l.functional(), true)]).unwrap() - 0.5).abs() < 1e-12);
        assert!((s.probability_of_value(l.hash(), 0).unwrap() - 1.0).abs() < 1e-12);
        // functional qubit is |−⟩: amplitude sign flips with the functional bit
        let a0 = s.amplitudes()[0];
        let a1 = s.amplitudes()[1 << l.functional()];
        assert!((a0 + a1).norm() < 1e-12);
    }

    #[test]
    fn oracle_shape() {
        let l = RegisterLayout::new(2, 4, 0).unwrap();
        let o = build_oracle(&l, 2).unwrap();
        assert_eq!(o.gates(), &[Gate::mcx(vec![Control::negative(5), Control::negative(4)], 6)]);
        assert_eq!(build_oracle(&l, 0).unwrap().gates(), &[Gate::X(6)]);
        assert!(build_oracle(&l, 5).is_err());
    }

    #[test]
    fn oracle_phase_on_two_bit_hash() {
        // nonce 1 qubit (idle), hash 2 qubits, functional in |−⟩
        let l = RegisterLayout::new(1, 2, 0).unwrap();
        let oracle = build_oracle(&l, 1).unwrap();
        for h in 0..4usize {
            let mut s = StateVector::basis(l.total_qubits(), h << 1).unwrap();
            s.apply_gate(&Gate::X(l.functional())).unwrap();
            s.apply_gate(&Gate::H(l.functional())).unwrap();
            let before = s.clone();
            s.apply_circuit(&oracle).unwrap();
            // top hash bit (qubit 2) zero → phase −1
            let sign = if h & 0b10 == 0 { -1.0 } else { 1.0 };
            for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
                assert!((a - b * sign).norm() < 1e-12, "hash {h:02b}");
            }
        }
    }

    #[test]
    fn oracle_zero_is_global_phase() {
        let l = RegisterLayout::new(2, 4, 0).unwrap();
        let mut s = uniform_prepared(&l);
        let before = s.clone();
        s.apply_circuit(&build_oracle(&l, 0).unwrap()).unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a + b).norm() < 1e-12);
        }
    }

    #[test]
    fn oracle_full_width_flips_zero_hash_branch() {
        let l = RegisterLayout::new(1, 3, 0).unwrap();
        let mut s = uniform_prepared(&l);
        let before = s.clone();
        s.apply_circuit(&build_oracle(&l, 3).unwrap()).unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a + b).norm() < 1e-12);
        }
    }

    #[test]
    fn diffusion_fixes_uniform_superposition() {
        let l = RegisterLayout::new(3, 4, 0).unwrap();
        let d = build_diffusion(&l).unwrap();
        let mut s = StateVector::new_zero(l.total_qubits()).unwrap();
        for &q in l.nonce() {
            s.apply_gate(&Gate::H(q)).unwrap();
        }
        let before = s.clone();
        s.apply_circuit(&d).unwrap();
        // equal up to a global phase: a / b constant on the support
        let phase = s.amplitudes()[0] / before.amplitudes()[0];
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a - b * phase).norm() < 1e-12);
        }
    }

    #[test]
    fn diffusion_on_basis_state() {
        let l = RegisterLayout::new(2, 4, 0).unwrap();
        let d = build_diffusion(&l).unwrap();
        let mut s = StateVector::new_zero(l.total_qubits()).unwrap();
        s.apply_circuit(&d).unwrap();
        let amps = &s.amplitudes()[..4];
        // (2|s⟩⟨s| − I)|00⟩ = −½|00⟩ + ½(others), up to a global sign
        let phase = if amps[0].re < 0.0 { 1.0 } else { -1.0 };
        let expected = [-0.5, 0.5, 0.5, 0.5];
        for (a, e) in amps.iter().zip(expected) {
            assert!((a - Complex64::new(e * phase, 0.0)).norm() < 1e-12, "{amps:?}");
        }
    }

    #[test]
    fn diffusion_twice_is_identity() {
        for n in 1..=4 {
            let l = RegisterLayout::new(n, 4, 0).unwrap();
            let d = build_diffusion(&l).unwrap();
            assert!(d.gates().iter().all(|g| g.qubits().iter().all(|q| l.nonce().contains(q))));
            for v in 0..(1usize << n) {
                let mut s = StateVector::basis(l.total_qubits(), v).unwrap();
                let before = s.clone();
                s.apply_circuit(&d).unwrap();
                s.apply_circuit(&d).unwrap();
                for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
                    assert!((a - b).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn empty_nonce_register_rejected() {
        let l = RegisterLayout { nonce: vec![], hash: vec![0], service: vec![], functional: 1 };
        assert!(build_diffusion(&l).is_err());
    }

    #[test]
    fn iteration_counts() {
        assert_eq!(iteration_count(8, 1).unwrap(), 12);
        assert_eq!(iteration_count(2, 1).unwrap(), 1);
        assert_eq!(iteration_count(48, 1).unwrap(), 13_176_794);
        assert_eq!(iteration_count(2, 4).unwrap(), 0);
        assert_eq!(iteration_count(2, 3).unwrap(), 1);
        assert!(iteration_count(4, 0).is_err());
        assert!(iteration_count(2, 5).is_err());
    }

    #[test]
    fn analytic_values() {
        assert!((analytic_success_probability(2, 1, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!((analytic_success_probability(8, 1, 12).unwrap() - 0.999_947_042_103_273_6).abs() < 1e-12);
        assert!((analytic_success_probability(5, 3, 0).unwrap() - 3.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn schedule() {
        assert_eq!(schedule_limit(4, 4).unwrap(), 16);
        let b = schedule_budgets(16);
        assert_eq!(&b[..6], &[1, 2, 2, 2, 3, 3]);
        assert!(b.iter().sum::<u64>() <= 16);
        assert!(schedule_budgets(0).is_empty());
    }

    #[test]
    fn bad_mining_params() {
        let hp = HashParams::new(8, 1).unwrap();
        assert!(MiningParams::new(9, hp).is_err());
        let mut p = MiningParams::new(3, hp).unwrap();
        p.max_grover_rounds = 0;
        assert!(p.validate().is_err());
        p.max_grover_rounds = 1;
        p.solution_count_hint = Some(0);
        assert!(p.validate().is_err());
    }

    #[test]
    fn capacity_error_propagates() {
        let hp = HashParams::new(16, 1).unwrap();
        let mut p = MiningParams::new(4, hp).unwrap();
        p.qubit_cap = 20;
        let l = RegisterLayout::new(8, 16, 0).unwrap();
        assert!(matches!(mine_quantum(&[], &l, &p), Err(Error::Capacity { requested: 25, cap: 20 })));
    }
}
