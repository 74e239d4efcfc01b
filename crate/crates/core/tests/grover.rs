mod common;

use common::{find_header, header, header_with_solution_count};
use qmine::chain::{classical_solutions, mine_classical};
use qmine::miner::{
    analytic_success_probability, build_diffusion, build_grover_iteration, build_oracle, grover_iteration,
    iteration_count, mine_quantum, prepare, success_curve, MiningParams, Readout, RegisterLayout,
};
use qmine::statevector::StateVector;
use qmine::toyhash::{build_hash_circuit, HashParams};

fn mining_params(zeros: u32, hash: HashParams) -> MiningParams {
    MiningParams::new(zeros, hash).unwrap()
}

#[test]
fn exact_two_qubit_search() {
    let hp = HashParams::new(8, 2).unwrap();
    let (blocks, zeros, sols) = header_with_solution_count(2, 1, &hp);
    let layout = RegisterLayout::new(2, 8, 0).unwrap();
    let hash = build_hash_circuit(&layout, &blocks, &hp).unwrap();
    let oracle = build_oracle(&layout, zeros).unwrap();
    let diffusion = build_diffusion(&layout).unwrap();
    let mut s = StateVector::new_zero(layout.total_qubits()).unwrap();
    prepare(&mut s, &layout).unwrap();
    grover_iteration(&mut s, &hash, &oracle, &diffusion).unwrap();
    let p = s.probability_of_value(layout.nonce(), sols[0]).unwrap();
    assert!((p - 1.0).abs() < 1e-10, "p = {p}");
    assert!((s.probability_of_value(layout.hash(), 0).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn all_marked_keeps_uniform() {
    let hp = HashParams::new(6, 1).unwrap();
    let layout = RegisterLayout::new(3, 6, 0).unwrap();
    let grover = build_grover_iteration(&header(1, 0, &hp), &layout, &mining_params(0, hp)).unwrap();
    let mut s = StateVector::new_zero(layout.total_qubits()).unwrap();
    prepare(&mut s, &layout).unwrap();
    for _ in 0..3 {
        grover.apply(&mut s).unwrap();
        for v in 0..8 {
            assert!((s.probability_of_value(layout.nonce(), v).unwrap() - 0.125).abs() < 1e-12);
        }
    }
}

#[test]
fn simulated_matches_analytic_with_service_register() {
    // service qubits present but idle must not disturb the dynamics
    let hp = HashParams::new(6, 2).unwrap();
    let (blocks, zeros, sols) = header_with_solution_count(4, 2, &hp);
    let layout = RegisterLayout::new(4, 6, 2).unwrap();
    let curve = success_curve(&blocks, &layout, &mining_params(zeros, hp), &sols, 5).unwrap();
    for (k, p) in curve.iter().enumerate() {
        let a = analytic_success_probability(4, 2, k as u64).unwrap();
        assert!((p - a).abs() < 1e-9, "k={k}: {p} vs {a}");
    }
}

#[test]
fn marked_phases_match_classical_solution_set() {
    for n in 1..=6u32 {
        let hp = HashParams::new(8, 2).unwrap();
        let layout = RegisterLayout::new(n as usize, 8, 0).unwrap();
        for ts in 0..4 {
            let zeros = n.min(8);
            let blocks = header(ts, zeros, &hp);
            let grover = build_grover_iteration(&blocks, &layout, &mining_params(zeros, hp)).unwrap();
            let mut s = StateVector::new_zero(layout.total_qubits()).unwrap();
            prepare(&mut s, &layout).unwrap();
            s.apply_circuit(grover.hash_circuit()).unwrap();
            s.apply_circuit(&build_oracle(&layout, zeros).unwrap()).unwrap();
            s.apply_circuit(&grover.hash_circuit().invert()).unwrap();
            // basis index v is |nonce=v, hash=0, functional=0⟩
            let marked: Vec<u64> = (0..1u64 << n).filter(|&v| s.amplitudes()[v as usize].re < 0.0).collect();
            assert_eq!(marked, classical_solutions(&blocks, n, zeros, &hp).unwrap(), "n={n} ts={ts}");
        }
    }
}

#[test]
fn success_rises_to_optimum_then_falls() {
    let hp = HashParams::new(8, 1).unwrap();
    let (blocks, zeros, sols) = header_with_solution_count(6, 1, &hp);
    let layout = RegisterLayout::new(6, 8, 0).unwrap();
    let best = iteration_count(6, 1).unwrap();
    let curve = success_curve(&blocks, &layout, &mining_params(zeros, hp), &sols, 2 * best + 1).unwrap();
    for k in 1..=best as usize {
        assert!(curve[k] >= curve[k - 1] - 1e-12, "k={k}");
    }
    assert!(curve[best as usize + 1] < curve[best as usize]);
    assert!(curve[2 * best as usize + 1] < 0.5);
}

#[test]
fn functional_qubit_stays_separable() {
    let hp = HashParams::new(6, 2).unwrap();
    let (blocks, zeros, _) = header_with_solution_count(4, 1, &hp);
    let layout = RegisterLayout::new(4, 6, 0).unwrap();
    let grover = build_grover_iteration(&blocks, &layout, &mining_params(zeros, hp)).unwrap();
    let mut s = StateVector::new_zero(layout.total_qubits()).unwrap();
    prepare(&mut s, &layout).unwrap();
    let f = layout.functional();
    for _ in 0..3 {
        grover.apply(&mut s).unwrap();
        assert!((s.probability_of(&[(f, false)]).unwrap() - 0.5).abs() < 1e-12);
        for v in 0..16u64 {
            let marginal = s.probability_of_value(layout.nonce(), v).unwrap();
            let mut joint: Vec<(usize, bool)> =
                layout.nonce().iter().enumerate().map(|(i, &q)| (q, (v >> i) & 1 == 1)).collect();
            joint.push((f, true));
            assert!((s.probability_of(&joint).unwrap() - 0.5 * marginal).abs() < 1e-12);
        }
        // amplitudes stay real
        assert!(s.amplitudes().iter().all(|a| a.im.abs() < 1e-12));
    }
}

#[test]
fn unique_solution_exact_readout() {
    let hp = HashParams::new(8, 2).unwrap();
    let (blocks, sols) = find_header(4, 4, &hp, |s| s.len() == 1).unwrap();
    let layout = RegisterLayout::new(4, 8, 0).unwrap();
    let mut params = mining_params(4, hp);
    params.solution_count_hint = Some(1);
    params.readout = Readout::Exact;
    let q = mine_quantum(&blocks, &layout, &params).unwrap();
    let c = mine_classical(&blocks, 4, &params).unwrap();
    assert!(q.success && c.success);
    assert_eq!(q.nonce, sols[0]);
    assert_eq!(q.nonce, c.nonce);
    assert_eq!(q.grover_iterations_used, 3);
    let analytic = analytic_success_probability(4, 1, 3).unwrap();
    assert!((q.success_probability_at_measurement - analytic).abs() < 1e-9);
    assert!(q.success_probability_at_measurement >= 0.96);
    assert!(q.total_gates > 0);
    assert_eq!(q.total_gates, q.gate_stats.total());
}

#[test]
fn zero_difficulty_succeeds_first_sample() {
    let hp = HashParams::new(8, 2).unwrap();
    let layout = RegisterLayout::new(4, 8, 0).unwrap();
    for seed in 0..5 {
        let mut params = mining_params(0, hp);
        params.rng_seed = seed;
        let r = mine_quantum(&header(3, 0, &hp), &layout, &params).unwrap();
        assert!(r.success);
        assert_eq!(r.hashes_tried, 1);
    }
}

#[test]
fn no_solution_exhausts_budget() {
    let hp = HashParams::new(8, 2).unwrap();
    let (blocks, _) = find_header(4, 8, &hp, |s| s.is_empty()).unwrap();
    let layout = RegisterLayout::new(4, 8, 0).unwrap();
    let params = mining_params(8, hp);
    let r = mine_quantum(&blocks, &layout, &params).unwrap();
    assert!(!r.success);
    assert!(r.grover_iterations_used <= 16);
    assert!(r.success_probability_at_measurement < 1e-12);
    assert!(!mine_classical(&blocks, 4, &params).unwrap().success);
}

#[test]
fn unknown_count_schedule_lands_in_solution_set() {
    let hp = HashParams::new(8, 2).unwrap();
    for n in 2..=6u32 {
        let layout = RegisterLayout::new(n as usize, 8, 0).unwrap();
        for ts in 0..6 {
            let blocks = header(ts, n, &hp);
            let sols = classical_solutions(&blocks, n, n, &hp).unwrap();
            let mut params = mining_params(n, hp);
            params.rng_seed = ts * 31 + u64::from(n);
            let r = mine_quantum(&blocks, &layout, &params).unwrap();
            if r.success {
                assert!(sols.contains(&r.nonce), "n={n} ts={ts}");
            } else {
                assert!(!r.digest.meets_difficulty(n));
            }
        }
    }
}

#[test]
fn seeded_runs_are_reproducible() {
    let hp = HashParams::new(8, 2).unwrap();
    let layout = RegisterLayout::new(5, 8, 0).unwrap();
    let mut params = mining_params(4, hp);
    params.rng_seed = 99;
    let a = mine_quantum(&header(4, 4, &hp), &layout, &params).unwrap();
    let b = mine_quantum(&header(4, 4, &hp), &layout, &params).unwrap();
    assert_eq!(a, b);
}
