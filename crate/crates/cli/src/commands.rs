use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qmine::chain::{classical_solutions, mine_classical, serialize_header, Block, BlockHeader, Chain, ChainParams};
use qmine::estimate::{estimate_resources, Assumptions};
use qmine::miner::{
    analytic_success_probability, build_grover_iteration, iteration_count, mine_quantum, success_curve, MiningParams,
    MiningResult, Readout, RegisterLayout,
};
use qmine::GateStats;

use crate::config::{Mode, RunConfig};
use crate::format::general;

/// Why a command did not finish cleanly; each maps to a fixed exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Exhausted,
    Check(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Exhausted => 3,
        }
    }
}

impl From<qmine::Error> for Failure {
    fn from(e: qmine::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Usage(s)
    }
}

type Outcome = Result<(), Failure>;

const SWEEP_TOLERANCE: f64 = 1e-9;

fn write_out(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn chain_params(cfg: &RunConfig) -> ChainParams {
    ChainParams { hash_params: cfg.hash_params, nonce_bits: cfg.n }
}

/// Loads the chain file if it exists, else starts an empty chain; either way
/// its parameters must agree with the run.
fn open_chain(path: &Path, cfg: &RunConfig) -> Result<Chain, Failure> {
    if !path.exists() {
        return Ok(Chain::new(chain_params(cfg)));
    }
    let chain = Chain::load(path)?;
    if chain.params != chain_params(cfg) {
        let p = chain.params;
        return Err(Failure::Usage(format!(
            "chain {} uses n={} m={} rounds={} true_chi={}, which differs from this run",
            path.display(),
            p.nonce_bits,
            p.hash_params.width(),
            p.hash_params.rounds(),
            p.hash_params.true_chi()
        )));
    }
    Ok(chain)
}

struct Target {
    header: BlockHeader,
    blocks: Vec<u32>,
    solutions: Vec<u64>,
}

/// Builds the header, scanning timestamps when a solution count is requested.
fn resolve_target(cfg: &RunConfig, tip: u32) -> Result<Target, Failure> {
    let hp = &cfg.hash_params;
    let base = BlockHeader {
        prev_digest: cfg.prev.unwrap_or(tip),
        payload_digest: cfg.payload,
        timestamp: cfg.timestamp,
        difficulty_zeros: cfg.zeros,
        nonce: 0,
    };
    let build = |timestamp: u64| -> Result<Target, Failure> {
        let header = BlockHeader { timestamp, ..base };
        let blocks = serialize_header(&header, hp)?;
        let solutions = classical_solutions(&blocks, cfg.n, cfg.zeros, hp)?;
        Ok(Target { header, blocks, solutions })
    };
    let Some(want) = cfg.solutions else {
        return build(cfg.timestamp);
    };
    // only the low m bits of the timestamp reach the hash
    for step in 0..1u64 << hp.width() {
        let target = build(cfg.timestamp.wrapping_add(step))?;
        if target.solutions.len() as u64 == want {
            return Ok(target);
        }
    }
    Err(Failure::Usage(format!("no timestamp gives exactly {want} solutions at z={}", cfg.zeros)))
}

fn mining_params(cfg: &RunConfig, solutions: &[u64]) -> Result<MiningParams, Failure> {
    let mut p = MiningParams::new(cfg.zeros, cfg.hash_params)?;
    p.rng_seed = cfg.seed;
    p.max_grover_rounds = cfg.max_grover_rounds;
    p.qubit_cap = cfg.qubit_cap;
    p.readout = if cfg.exact { Readout::Exact } else { Readout::Sampled };
    if cfg.hint && !solutions.is_empty() {
        p.solution_count_hint = Some(solutions.len() as u64);
    }
    p.validate()?;
    Ok(p)
}

fn row(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key:<30}{value}");
}

fn gate_summary(s: &GateStats) -> String {
    format!("{} (h={} x={} swap={} mcx={})", s.total(), s.h, s.x, s.swap, s.mcx)
}

fn report_result(out: &mut String, label: &str, r: &MiningResult, quantum: bool) {
    let _ = writeln!(out, "[{label}]");
    row(out, "success", r.success);
    row(out, "nonce", r.nonce);
    row(out, "digest", r.digest.to_hex());
    row(out, "hashes_tried", r.hashes_tried);
    if quantum {
        row(out, "grover_iterations", r.grover_iterations_used);
        row(out, "success_probability", general(r.success_probability_at_measurement, 12));
        row(out, "gates", gate_summary(&r.gate_stats));
    }
}

pub fn mine(cfg: &RunConfig, dump_circuit: Option<&PathBuf>) -> Outcome {
    let mut chain = cfg.chain_file.as_deref().map(|p| open_chain(p, cfg)).transpose()?;
    let target = resolve_target(cfg, chain.as_ref().map_or(0, Chain::tip))?;
    let params = mining_params(cfg, &target.solutions)?;
    let layout = RegisterLayout::new(cfg.n as usize, cfg.hash_params.width() as usize, 0)?;
    let h = &target.header;

    let mut out = String::new();
    row(&mut out, "nonce_bits", cfg.n);
    row(
        &mut out,
        "hash",
        format!(
            "m={} rounds={} true_chi={}",
            cfg.hash_params.width(),
            cfg.hash_params.rounds(),
            cfg.hash_params.true_chi()
        ),
    );
    row(&mut out, "difficulty_zeros", cfg.zeros);
    row(
        &mut out,
        "header",
        format!("prev={:x} payload={:x} timestamp={}", h.prev_digest, h.payload_digest, h.timestamp),
    );
    row(&mut out, "solutions", target.solutions.len());

    let mut winners = Vec::new();
    let mut all_succeeded = true;
    if matches!(cfg.mode, Mode::Classical | Mode::Both) {
        let r = mine_classical(&target.blocks, cfg.n, &params)?;
        report_result(&mut out, "classical", &r, false);
        all_succeeded &= r.success;
        winners.push(r);
    }
    if matches!(cfg.mode, Mode::Quantum | Mode::Both) {
        let grover = build_grover_iteration(&target.blocks, &layout, &params)?;
        if let Some(path) = dump_circuit {
            let text = [grover.hash_circuit().dump(), grover.oracle().dump(), grover.diffusion().dump()].concat();
            write_out(path, &text)?;
        }
        let r = mine_quantum(&target.blocks, &layout, &params)?;
        report_result(&mut out, "quantum", &r, true);
        row(&mut out, "qubits", layout.total_qubits());
        row(&mut out, "gates_per_iteration", grover.gates_per_iteration());
        all_succeeded &= r.success;
        winners.push(r);
    }
    if cfg.mode == Mode::Both {
        let agree = winners.iter().all(|r| r.success && target.solutions.contains(&r.nonce));
        row(&mut out, "cross_check", if agree { "both nonces in solution set" } else { "incomplete" });
    }

    // the last successful miner supplies the block (quantum when it ran)
    if let (Some(chain), Some(path)) = (chain.as_mut(), cfg.chain_file.as_deref()) {
        if let Some(r) = winners.iter().rev().find(|r| r.success) {
            let block = Block::seal(BlockHeader { nonce: r.nonce, ..target.header }, &cfg.hash_params)?;
            chain.push(block);
            chain.save(path)?;
            row(&mut out, "chain_height", chain.blocks.len());
        }
    }
    print!("{out}");
    if all_succeeded {
        Ok(())
    } else {
        Err(Failure::Exhausted)
    }
}

pub fn sweep(cfg: &RunConfig, k_min: u64, k_max: Option<u64>) -> Outcome {
    let target = resolve_target(cfg, 0)?;
    let solutions = target.solutions.len() as u64;
    if solutions == 0 {
        return Err(Failure::Usage(format!(
            "header has no solutions at z={}; pick another timestamp or pass --solutions",
            cfg.zeros
        )));
    }
    let params = mining_params(cfg, &target.solutions)?;
    let layout = RegisterLayout::new(cfg.n as usize, cfg.hash_params.width() as usize, 0)?;
    let k_max = match k_max {
        Some(k) => k,
        None => 2 * iteration_count(cfg.n, solutions)? + 1,
    };
    if k_min > k_max {
        return Err(Failure::Usage(format!("--k-min {k_min} exceeds --k-max {k_max}")));
    }
    let curve = success_curve(&target.blocks, &layout, &params, &target.solutions, k_max)?;

    let mut csv = String::from("k,simulated_p,analytic_p,abs_diff\n");
    let mut worst = 0.0f64;
    for k in k_min..=k_max {
        let sim = curve[k as usize];
        let analytic = analytic_success_probability(cfg.n, solutions, k)?;
        let diff = (sim - analytic).abs();
        worst = worst.max(diff);
        let _ = writeln!(csv, "{k},{},{},{}", general(sim, 12), general(analytic, 12), general(diff, 12));
    }
    match &cfg.csv_out {
        Some(path) => {
            write_out(path, &csv)?;
            let mut out = String::new();
            row(&mut out, "solutions", solutions);
            row(&mut out, "timestamp", target.header.timestamp);
            row(&mut out, "optimal_iterations", iteration_count(cfg.n, solutions)?);
            row(&mut out, "rows", k_max - k_min + 1);
            row(&mut out, "max_abs_diff", general(worst, 12));
            print!("{out}");
        }
        None => print!("{csv}"),
    }
    if worst < SWEEP_TOLERANCE {
        Ok(())
    } else {
        Err(Failure::Check(format!("simulated and analytic curves differ by {worst:e}")))
    }
}

pub struct EstimateOptions {
    pub nonce_bits: u32,
    pub assumptions: Assumptions,
    /// Hash width and rounds of the circuit whose gate count is measured.
    pub measured: Option<(u32, u32)>,
}

pub fn estimate(opts: &EstimateOptions) -> Outcome {
    let mut assumptions = opts.assumptions;
    let mut measured_note = None;
    if let Some((m, rounds)) = opts.measured {
        let hp = qmine::toyhash::HashParams::new(m, rounds)?;
        let n = opts.nonce_bits.min(m);
        let layout = RegisterLayout::new(n as usize, m as usize, 0)?;
        let params = MiningParams::new(m.min(n + 1), hp)?;
        let header = serialize_header(
            &BlockHeader {
                prev_digest: 0,
                payload_digest: 0,
                timestamp: 0,
                difficulty_zeros: params.difficulty_zeros,
                nonce: 0,
            },
            &hp,
        )?;
        let grover = build_grover_iteration(&header, &layout, &params)?;
        assumptions.gates_per_iteration = grover.gates_per_iteration();
        measured_note = Some(format!(" (measured: n={n} m={m} rounds={rounds})"));
    }
    let e = estimate_resources(opts.nonce_bits, assumptions)?;
    let mut out = String::new();
    row(&mut out, "nonce_bits", e.nonce_bits);
    row(&mut out, "hash_rate_per_s", general(assumptions.hash_rate, 12));
    row(&mut out, "gate_time_s", general(assumptions.gate_time, 12));
    row(
        &mut out,
        "gates_per_iteration",
        format!("{}{}", assumptions.gates_per_iteration, measured_note.unwrap_or_default()),
    );
    row(&mut out, "classical_hashes", e.classical_hashes);
    row(&mut out, "classical_seconds", general(e.classical_seconds, 12));
    row(&mut out, "classical_hours", general(e.classical_hours, 12));
    row(&mut out, "classical_days", general(e.classical_days, 12));
    row(&mut out, "quantum_iterations", e.quantum_iterations);
    row(&mut out, "quantum_gate_count", e.quantum_gate_count);
    row(&mut out, "quantum_seconds", general(e.quantum_seconds, 12));
    row(&mut out, "quantum_seconds_at_hash_rate", general(e.quantum_seconds_at_hash_rate, 12));
    print!("{out}");
    Ok(())
}

fn load_existing(path: &Path) -> Result<Chain, Failure> {
    if !path.exists() {
        return Err(Failure::Usage(format!("chain file {} does not exist", path.display())));
    }
    Ok(Chain::load(path)?)
}

pub fn chain_validate(path: &Path) -> Outcome {
    let chain = load_existing(path)?;
    let v = chain.validate();
    for (i, reason) in &v.failures {
        println!("block {i}: {reason}");
    }
    if v.is_valid() {
        println!("valid: {} blocks", chain.blocks.len());
        Ok(())
    } else {
        Err(Failure::Check(format!("{} problem(s) in {}", v.failures.len(), path.display())))
    }
}

pub fn chain_show(path: &Path) -> Outcome {
    let chain = load_existing(path)?;
    let p = chain.params;
    let v = chain.validate();
    println!(
        "n={} m={} rounds={} true_chi={} blocks={}",
        p.nonce_bits,
        p.hash_params.width(),
        p.hash_params.rounds(),
        p.hash_params.true_chi(),
        chain.blocks.len()
    );
    println!(
        "{:>5}  {:>6}  {:>7}  {:>10}  {:>5}  {:>6}  {:>6}  status",
        "index", "prev", "payload", "timestamp", "zeros", "nonce", "digest"
    );
    for (i, b) in chain.blocks.iter().enumerate() {
        let h = &b.header;
        let reasons: Vec<&str> = v.failures.iter().filter(|(j, _)| *j == i).map(|(_, r)| r.code()).collect();
        let status = if reasons.is_empty() { "ok".to_string() } else { reasons.join(",") };
        println!(
            "{i:>5}  {:>6x}  {:>7x}  {:>10}  {:>5}  {:>6}  {:>6}  {status}",
            h.prev_digest,
            h.payload_digest,
            h.timestamp,
            h.difficulty_zeros,
            h.nonce,
            b.digest.to_hex()
        );
    }
    Ok(())
}
